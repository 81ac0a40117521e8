#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <set>
#include <vector>

#include "grwsim/errors.hpp"
#include "grwsim/sparse_state.hpp"

namespace grwsim {

/// Dense column vector over the full configuration space, mixed-radix
/// indexed in roster order. Test oracle; guarded by the dense limit.
inline Eigen::VectorXcd to_dense(const SparseState& state, int dense_limit = kDefaultDenseLimit) {
  const double space = state.roster().config_space_size();
  if (space > static_cast<double>(std::size_t{1} << dense_limit))
    throw CapacityError("dense oracle over the configured limit");
  const auto dim = static_cast<Eigen::Index>(space);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  const int n = state.roster().size();
  for (const auto& [cfg, amp] : state.terms()) {
    std::size_t idx = 0;
    for (int s = 0; s < n; ++s)
      idx = idx * state.roster().at(s).alphabet.size() + cfg[static_cast<std::size_t>(s)];
    v[static_cast<Eigen::Index>(idx)] = amp.to_complex();
  }
  return v;
}

struct SchmidtCheck {
  bool is_product = false;
  double deviation = 0.0;  // second singular value / largest
};

/// Rank-one test across a bipartition: reshape the coefficient table into
/// a (left configurations) x (right configurations) matrix and compare the
/// two largest singular values. Magnitudes are rescaled by the largest
/// log magnitude first, so the ratio is meaningful even for states whose
/// coefficients sit far below double range.
inline SchmidtCheck schmidt_rank_one_check(const SparseState& state,
                                           const std::set<int>& left_subsystems,
                                           int dense_limit = kDefaultDenseLimit) {
  const int n = state.roster().size();
  if (left_subsystems.empty()) throw ShapeError("left side of the bipartition is empty");
  for (int s : left_subsystems)
    if (s < 0 || s >= n) throw ShapeError("bipartition names unknown subsystem " + std::to_string(s));
  if (static_cast<int>(left_subsystems.size()) == n)
    throw ShapeError("right side of the bipartition is empty");

  std::vector<int> left, right;
  for (int s = 0; s < n; ++s)
    (left_subsystems.count(s) ? left : right).push_back(s);

  double ldim = 1.0, rdim = 1.0;
  for (int s : left) ldim *= static_cast<double>(state.roster().at(s).alphabet.size());
  for (int s : right) rdim *= static_cast<double>(state.roster().at(s).alphabet.size());
  if (ldim * rdim > static_cast<double>(std::size_t{1} << dense_limit))
    throw CapacityError("bipartite matrix over the configured dense limit");

  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& [cfg, amp] : state.terms())
    shift = std::max(shift, amp.log_magnitude());
  if (std::isinf(shift)) throw DegenerateStateError("rank check on an all-zero state");

  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(ldim),
                                              static_cast<Eigen::Index>(rdim));
  for (const auto& [cfg, amp] : state.terms()) {
    std::size_t li = 0, ri = 0;
    for (int s : left) li = li * state.roster().at(s).alphabet.size() + cfg[static_cast<std::size_t>(s)];
    for (int s : right) ri = ri * state.roster().at(s).alphabet.size() + cfg[static_cast<std::size_t>(s)];
    m(static_cast<Eigen::Index>(li), static_cast<Eigen::Index>(ri)) = amp.to_complex_shifted(shift);
  }

  SchmidtCheck out;
  if (m.rows() == 1 || m.cols() == 1) {
    out.deviation = 0.0;
    out.is_product = true;
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  out.deviation = sv[0] > 0.0 ? sv[1] / sv[0] : 1.0;
  out.is_product = out.deviation < 1e-10;
  return out;
}

}  // namespace grwsim
