#pragma once

#include <string>
#include <vector>

#include "grwsim/sparse_state.hpp"

namespace grwsim {

/// Premeasurement couplings. Each one is the ideal veridical unitary
/// restricted to a ready apparatus: it extends every term with a pointer
/// label that is a deterministic function of that term's marble labels,
/// so term count and branch masses are unchanged.

/// Attach one record apparatus per marble subsystem: |in>|ready> ->
/// |in>|'in'>, |out>|ready> -> |out>|'out'>. Apparatuses are named by
/// prefix + marble position (M1..Mn) and keep `ready` in their alphabet.
inline SparseState couple_records(const SparseState& state,
                                  const std::vector<int>& marble_subsystems,
                                  const std::string& prefix = "M") {
  SubsystemRoster roster = state.roster();
  for (std::size_t i = 0; i < marble_subsystems.size(); ++i) {
    const Subsystem& marble = state.roster().at(marble_subsystems[i]);
    std::vector<std::string> alphabet = {"ready"};
    alphabet.insert(alphabet.end(), marble.alphabet.begin(), marble.alphabet.end());
    roster = roster.extended({prefix + std::to_string(i + 1), std::move(alphabet)});
  }
  std::vector<SparseState::Term> terms;
  terms.reserve(state.term_count());
  for (const auto& [cfg, amp] : state.terms()) {
    Configuration extended = cfg;
    for (int sub : marble_subsystems)
      extended.push_back(static_cast<std::uint8_t>(1 + cfg[static_cast<std::size_t>(sub)]));
    terms.emplace_back(std::move(extended), amp);
  }
  return SparseState::from_terms(std::move(roster), std::move(terms));
}

/// Count of marbles reading `in` (label index 0) in one term.
inline int count_in(const Configuration& cfg, const std::vector<int>& marble_subsystems) {
  int k = 0;
  for (int sub : marble_subsystems)
    if (cfg[static_cast<std::size_t>(sub)] == 0) ++k;
  return k;
}

/// Attach the counting apparatus measuring "how many marbles are in the
/// box": alphabet {ready, O=0..O=n}, pointer label O=k on every term of
/// the k-in configuration class.
inline SparseState couple_counter(const SparseState& state,
                                  const std::vector<int>& marble_subsystems,
                                  const std::string& name = "M") {
  const int n = static_cast<int>(marble_subsystems.size());
  std::vector<std::string> alphabet = {"ready"};
  for (int k = 0; k <= n; ++k) alphabet.push_back("O=" + std::to_string(k));
  SubsystemRoster roster = state.roster().extended({name, std::move(alphabet)});
  std::vector<SparseState::Term> terms;
  terms.reserve(state.term_count());
  for (const auto& [cfg, amp] : state.terms()) {
    Configuration extended = cfg;
    extended.push_back(static_cast<std::uint8_t>(1 + count_in(cfg, marble_subsystems)));
    terms.emplace_back(std::move(extended), amp);
  }
  return SparseState::from_terms(std::move(roster), std::move(terms));
}

/// Attach an observer memory forming an opinion about the marble count —
/// the same veridical coupling the counter instantiates, one subsystem
/// further down the chain. Alphabet {count?, count=0..count=n}.
inline SparseState couple_observer(const SparseState& state,
                                   const std::vector<int>& marble_subsystems,
                                   const std::string& name = "Obs") {
  const int n = static_cast<int>(marble_subsystems.size());
  std::vector<std::string> alphabet = {"count?"};
  for (int k = 0; k <= n; ++k) alphabet.push_back("count=" + std::to_string(k));
  SubsystemRoster roster = state.roster().extended({name, std::move(alphabet)});
  std::vector<SparseState::Term> terms;
  terms.reserve(state.term_count());
  for (const auto& [cfg, amp] : state.terms()) {
    Configuration extended = cfg;
    extended.push_back(static_cast<std::uint8_t>(1 + count_in(cfg, marble_subsystems)));
    terms.emplace_back(std::move(extended), amp);
  }
  return SparseState::from_terms(std::move(roster), std::move(terms));
}

/// Pointer value encoded by a counter/observer label index, or -1 for
/// the ready state.
inline int pointer_count(int label_index) { return label_index - 1; }

}  // namespace grwsim
