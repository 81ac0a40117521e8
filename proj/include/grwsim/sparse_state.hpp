#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "grwsim/amplitude.hpp"
#include "grwsim/errors.hpp"
#include "grwsim/product_state.hpp"

namespace grwsim {

inline constexpr int kDefaultDenseLimit = 20;  // cap on log2(term count)

/// One subsystem and its declared label alphabet. The roster fixes both
/// the subsystem order and each alphabet's label order, so configurations
/// (and therefore serialized states) are deterministic.
struct Subsystem {
  std::string name;
  std::vector<std::string> alphabet;

  int label_index(const std::string& label) const {
    for (std::size_t i = 0; i < alphabet.size(); ++i)
      if (alphabet[i] == label) return static_cast<int>(i);
    throw ShapeError("label '" + label + "' not in alphabet of subsystem " + name);
  }

  bool operator==(const Subsystem& o) const { return name == o.name && alphabet == o.alphabet; }
};

/// A basis configuration: one alphabet index per subsystem, roster order.
using Configuration = std::vector<std::uint8_t>;

/// Roster storage is shared and immutable, so roster copies (every state
/// copy carries one) are reference bumps.
class SubsystemRoster {
 public:
  SubsystemRoster() : subs_(empty_subs()) {}
  explicit SubsystemRoster(std::vector<Subsystem> subs)
      : subs_(std::make_shared<const std::vector<Subsystem>>(std::move(subs))) {
    for (const auto& s : *subs_) {
      if (s.alphabet.empty()) throw ShapeError("subsystem " + s.name + " has an empty alphabet");
      if (s.alphabet.size() > 255) throw ShapeError("subsystem " + s.name + " alphabet too large");
    }
  }

  /// Roster of n marbles named m1..mn with alphabet {in, out}.
  static SubsystemRoster marbles(int n) {
    std::vector<Subsystem> subs;
    subs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      subs.push_back({"m" + std::to_string(i + 1), {"in", "out"}});
    return SubsystemRoster(std::move(subs));
  }

  const std::vector<Subsystem>& subsystems() const { return *subs_; }
  int size() const { return static_cast<int>(subs_->size()); }

  const Subsystem& at(int i) const {
    if (i < 0 || i >= size()) throw ShapeError("unknown subsystem index " + std::to_string(i));
    return (*subs_)[static_cast<std::size_t>(i)];
  }

  int index_of(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
      if ((*subs_)[static_cast<std::size_t>(i)].name == name) return i;
    throw ShapeError("unknown subsystem '" + name + "'");
  }

  SubsystemRoster extended(Subsystem extra) const {
    std::vector<Subsystem> subs = *subs_;
    subs.push_back(std::move(extra));
    return SubsystemRoster(std::move(subs));
  }

  /// Product of alphabet sizes, saturating at 2^62.
  double config_space_size() const {
    double total = 1.0;
    for (const auto& s : *subs_) total *= static_cast<double>(s.alphabet.size());
    return total;
  }

  bool operator==(const SubsystemRoster& o) const {
    return subs_ == o.subs_ || *subs_ == *o.subs_;
  }

 private:
  static std::shared_ptr<const std::vector<Subsystem>> empty_subs() {
    static const auto kEmpty = std::make_shared<const std::vector<Subsystem>>();
    return kEmpty;
  }

  std::shared_ptr<const std::vector<Subsystem>> subs_;
};

/// Entangled state as a sorted configuration -> amplitude table.
///
/// Invariants: terms are lexicographically sorted and unique, no term
/// stores an exact-zero amplitude, and labels fit their alphabets. States
/// are immutable values; every operation builds a new one.
class SparseState {
 public:
  using Term = std::pair<Configuration, Amplitude>;

  SparseState() = default;

  static SparseState from_terms(SubsystemRoster roster, std::vector<Term> terms) {
    for (auto& [cfg, amp] : terms) {
      if (static_cast<int>(cfg.size()) != roster.size())
        throw ShapeError("configuration length does not match roster");
      for (int s = 0; s < roster.size(); ++s)
        if (cfg[static_cast<std::size_t>(s)] >= roster.at(s).alphabet.size())
          throw ShapeError("label index out of alphabet for subsystem " + roster.at(s).name);
    }
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return a.first < b.first; });
    std::vector<Term> merged;
    merged.reserve(terms.size());
    for (auto& t : terms) {
      if (!merged.empty() && merged.back().first == t.first)
        merged.back().second = merged.back().second + t.second;
      else
        merged.push_back(std::move(t));
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const Term& t) { return t.second.is_zero(); }),
                 merged.end());
    SparseState st;
    st.roster_ = std::move(roster);
    st.terms_ = std::move(merged);
    return st;
  }

  /// Construction bypass for callers that already hold sorted, unique,
  /// validated, nonzero terms (the hit path rescales existing states and
  /// never disturbs key order).
  static SparseState from_sorted_terms_unchecked(SubsystemRoster roster,
                                                 std::vector<Term> terms) {
    SparseState st;
    st.roster_ = std::move(roster);
    st.terms_ = std::move(terms);
    return st;
  }

  /// Salvage the term storage of an expiring state.
  static std::vector<Term> take_terms(SparseState&& st) { return std::move(st.terms_); }

  const SubsystemRoster& roster() const { return roster_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  double log_total_mass() const {
    LogMassAccumulator acc;
    for (const auto& [cfg, amp] : terms_) acc.add_log(amp.log_squared_magnitude());
    return acc.log_total();
  }

  double total_mass() const { return std::exp(log_total_mass()); }

  /// Rescaled to unit total mass; relative weights untouched.
  SparseState normalized() const {
    const double log_mass = log_total_mass();
    if (terms_.empty() || (std::isinf(log_mass) && log_mass < 0))
      throw DegenerateStateError("cannot normalize a state with zero total mass");
    SparseState st;
    st.roster_ = roster_;
    st.terms_.reserve(terms_.size());
    const double half = 0.5 * log_mass;
    for (const auto& [cfg, amp] : terms_)
      st.terms_.emplace_back(cfg, amp.scaled_mag(-half));
    return st;
  }

  /// Squared mass of the configurations satisfying the predicate,
  /// accumulated in the log domain then exponentiated.
  double branch_mass(const std::function<bool(const Configuration&)>& predicate) const {
    return std::exp(log_branch_mass(predicate));
  }

  double log_branch_mass(const std::function<bool(const Configuration&)>& predicate) const {
    LogMassAccumulator acc;
    for (const auto& [cfg, amp] : terms_)
      if (predicate(cfg)) acc.add_log(amp.log_squared_magnitude());
    return acc.log_total();
  }

  /// Per-label log masses for one subsystem, alphabet order.
  std::vector<double> subsystem_log_masses(int subsystem) const {
    if (subsystem < 0 || subsystem >= roster_.size())
      throw ShapeError("unknown subsystem index " + std::to_string(subsystem));
    std::vector<LogMassAccumulator> acc(roster_.at(subsystem).alphabet.size());
    for (const auto& [cfg, amp] : terms_)
      acc[cfg[static_cast<std::size_t>(subsystem)]].add_log(amp.log_squared_magnitude());
    std::vector<double> out;
    out.reserve(acc.size());
    for (const auto& a : acc) out.push_back(a.log_total());
    return out;
  }

  std::vector<double> subsystem_masses(int subsystem) const {
    std::vector<double> v = subsystem_log_masses(subsystem);
    for (double& x : v) x = std::exp(x);
    return v;
  }

  /// Deterministic text form, one sorted line per term:
  /// `m1=in,m2=out | <log_mag> <phase>`.
  std::string serialize() const {
    std::string out;
    char buf[64];
    for (const auto& [cfg, amp] : terms_) {
      for (int s = 0; s < roster_.size(); ++s) {
        if (s) out += ',';
        const Subsystem& sub = roster_.at(s);
        out += sub.name;
        out += '=';
        out += sub.alphabet[cfg[static_cast<std::size_t>(s)]];
      }
      std::snprintf(buf, sizeof buf, " | %.17g %.17g", amp.log_magnitude(), amp.phase());
      out += buf;
      out += '\n';
    }
    return out;
  }

  std::string config_string(const Configuration& cfg) const {
    std::string out;
    for (int s = 0; s < roster_.size(); ++s) {
      if (s) out += ',';
      out += roster_.at(s).name;
      out += '=';
      out += roster_.at(s).alphabet[cfg[static_cast<std::size_t>(s)]];
    }
    return out;
  }

 private:
  SubsystemRoster roster_;
  std::vector<Term> terms_;
};

/// Conjugate-bilinear inner product <x|y> over a shared roster.
inline Amplitude inner_product(const SparseState& x, const SparseState& y) {
  if (!(x.roster() == y.roster()))
    throw ShapeError("inner product requires identical subsystem rosters");
  Amplitude sum = Amplitude::zero();
  auto xi = x.terms().begin();
  auto yi = y.terms().begin();
  while (xi != x.terms().end() && yi != y.terms().end()) {
    if (xi->first < yi->first) {
      ++xi;
    } else if (yi->first < xi->first) {
      ++yi;
    } else {
      sum = sum + xi->second.conj() * yi->second;
      ++xi;
      ++yi;
    }
  }
  return sum;
}

/// Expand a factorized n-marble state into its 2^n-term sparse form.
/// Throws CapacityError above the dense limit.
inline SparseState expand(const ProductState& ps, int dense_limit = kDefaultDenseLimit) {
  const int n = ps.size();
  if (n < 1) throw ValidationError("cannot expand an empty product state");
  if (n > dense_limit)
    throw CapacityError("expanding " + std::to_string(n) + " marbles needs 2^" +
                        std::to_string(n) + " terms, over the dense limit 2^" +
                        std::to_string(dense_limit));
  SubsystemRoster roster = SubsystemRoster::marbles(n);
  std::vector<SparseState::Term> terms;
  const std::size_t count = std::size_t{1} << n;
  terms.reserve(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    Configuration cfg(static_cast<std::size_t>(n));
    Amplitude amp = Amplitude::one();
    for (int k = 0; k < n; ++k) {
      const int bit = static_cast<int>((idx >> (n - 1 - k)) & 1u);
      cfg[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(bit);
      amp = amp * ps.marbles()[static_cast<std::size_t>(k)].amp(static_cast<Region>(bit));
    }
    if (!amp.is_zero()) terms.emplace_back(std::move(cfg), amp);
  }
  return SparseState::from_terms(std::move(roster), std::move(terms));
}

/// Predicate matching every subsystem assignment in `wanted` (index -> label).
inline std::function<bool(const Configuration&)> matches_assignment(
    std::map<int, int> wanted) {
  return [wanted = std::move(wanted)](const Configuration& cfg) {
    for (const auto& [sub, label] : wanted)
      if (cfg[static_cast<std::size_t>(sub)] != label) return false;
    return true;
  };
}

}  // namespace grwsim
