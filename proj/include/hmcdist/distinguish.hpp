#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hmcdist/lp.hpp"
#include "hmcdist/model.hpp"
#include "hmcdist/rational.hpp"

namespace hmcdist {

/// Words whose emission probabilities characterise equivalence of
/// distribution pairs, with their per-state emission vectors.
struct TestSet {
  std::vector<Word> words;         // ε first
  std::vector<RatVector> eta1;     // eta1[k][s] = P_{1,s}(words[k] Σ^ω)
  std::vector<RatVector> eta2;
  std::size_t m = 0;               // |S1| + |S2|

  std::size_t size() const noexcept { return words.size(); }
  /// (eta1[k], -eta2[k]) as a single vector of length m.
  RatVector stacked(std::size_t k) const;
  Rat pr1(std::size_t k, const Dist& psi1) const;
  Rat pr2(std::size_t k, const Dist& psi2) const;
};

/// Basis worklist: FIFO over accepted words, letters in alphabet order,
/// candidate a·w kept iff its stacked vector extends the span.
TestSet compute_test_set(const Hmc& h1, const Hmc& h2);

/// ψ1 ≡ ψ2: equal emission probabilities for every test word.
bool equivalent(const TestSet& ts, const Dist& psi1, const Dist& psi2);
bool equivalent(const Hmc& h1, const Hmc& h2, const Dist& psi1, const Dist& psi2);
/// Initial distributions.
bool equivalent(const Hmc& h1, const Hmc& h2);

/// max over test words of |pr1(ψ1,u) - pr2(ψ2,u)|.
Rat dist(const TestSet& ts, const Dist& psi1, const Dist& psi2);

/// Event chosen by the profile function for a distribution pair.
struct ProfileSelection {
  std::size_t word_index = 0;
  Word word;
  bool direct = true;   // event = words with prefix `word`; else its complement
  Rat p1;               // event probability under chain 1
  Rat p2;
  Rat difference;       // p1 - p2 = dist(ψ1, ψ2)
  std::size_t length = 0;  // event words have this length (m)
};

/// Argmax over the test set, earliest word on ties.
ProfileSelection select_event(const TestSet& ts, const Dist& psi1, const Dist& psi2);

/// Membership of a length-m word in the selected event.
bool event_member(const ProfileSelection& sel, const Word& w);

struct ProfileLpResult {
  StateId dominating;  // s1
  LpOutcome outcome;
};

struct DistinguishabilityReport {
  bool distinguishable = false;
  Rat c;
  TestSet testset;
  std::vector<ProfileLpResult> lps;
  std::vector<std::pair<StateId, StateId>> reachable_pairs;
};

/// LP(s1) when `dominating` is set: ψ1 dominated by s1 and ψ2 restricted to
/// states reachable together with s1. Without it the LP ranges over all
/// distribution pairs. Variables: ψ1 (|S1|), ψ2 (|S2|), then x.
LpProblem build_profile_lp(const TestSet& ts, std::size_t states1, std::size_t states2,
                           std::optional<StateId> dominating,
                           const std::vector<std::pair<StateId, StateId>>& reachable_pairs);

/// Lower bound c on dist over reachable pairs; distinguishable iff c > 0.
DistinguishabilityReport profile_constant(const Hmc& h1, const Hmc& h2);

/// Supports (S1', S2') of reachable distribution pairs, found by a subset
/// construction over the synchronised product. Throws GuardExceeded beyond `guard` pairs.
std::vector<std::pair<std::vector<StateId>, std::vector<StateId>>> reachable_support_pairs(
    const Hmc& h1, const Hmc& h2, std::uint64_t guard);

/// min over reachable support pairs of min_{ψ1,ψ2} max_U pr1(ψ1,U) - pr2(ψ2,U),
/// U ranging over sets of length-m words. Throws GuardExceeded when |Σ|^m or the
/// number of support pairs exceeds `guard`.
Rat refined_constant(const Hmc& h1, const Hmc& h2, std::uint64_t guard);

/// Every word of the given length over an alphabet of size `symbols`, in
/// lexicographic order.
std::vector<Word> all_words(std::size_t symbols, std::size_t length);

}  // namespace hmcdist
