#pragma once

#include <string>
#include <vector>

#include "hmcdist/distinguish.hpp"
#include "hmcdist/model.hpp"
#include "hmcdist/rational.hpp"

namespace hmcdist {

/// Bottom strongly connected components, each sorted, ordered by smallest state.
std::vector<std::vector<StateId>> bsccs(const Hmc& h);

enum class Target { Bad, Good };

/// P_s(eventually in a `target` BSCC) for every state s, exact.
RatVector reach_probabilities(const ClassifiedHmc& c, Target target);

struct ConditionedPair {
  Hmc bad;   // conditioned on Bad
  Hmc good;  // conditioned on Good
};

/// Restricts to states that reach the target with positive probability and
/// rescales phi(s,t) by P_t/P_s. Requires P(target) > 0 at init; condition()
/// requires both.
Hmc condition_on(const ClassifiedHmc& c, Target target);
ConditionedPair condition(const ClassifiedHmc& c);

struct MonitorabilityResult {
  bool monitorable = false;
  ConditionedPair chains;
  DistinguishabilityReport report;
};

MonitorabilityResult decide_monitorable(const ClassifiedHmc& c);

/// Observation of the fresh initial state added by combine().
inline constexpr const char* kCombineSymbol = "^";

/// Fresh initial state emitting kCombineSymbol and moving to either chain's
/// initial state with probability 1/2. States are renamed "h1.<name>" and
/// "h2.<name>"; the BSCCs of h1 are bad and those of h2 are good.
ClassifiedHmc combine(const Hmc& h1, const Hmc& h2);

}  // namespace hmcdist
