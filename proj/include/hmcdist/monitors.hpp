#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hmcdist/distinguish.hpp"
#include "hmcdist/model.hpp"
#include "hmcdist/rational.hpp"
#include "hmcdist/stream.hpp"

namespace hmcdist {

/// Decision of a monitor. `chain` is 1-based; nullopt means no candidate
/// chain can generate the observed prefix (output 3 of the pairwise monitors).
struct Verdict {
  std::optional<std::size_t> chain;
  std::size_t observations = 0;

  bool impossible() const noexcept { return !chain.has_value(); }
  bool operator==(const Verdict&) const = default;
};

struct MonitorPlan {
  std::uint64_t phases = 1;  // N
  std::size_t m = 1;         // observations per phase
  Rat c;
  double target = 0.0;       // ε, or low for the one-sided monitor

  std::uint64_t observations() const { return phases * m; }
};

/// ⌈v⌉, except that values within a relative 1e-12 of an integer snap to it.
std::uint64_t tolerant_ceil(double v);

/// N = ⌈(18/c²)·ln(2/ε)⌉.
MonitorPlan plan_two_sided(const Rat& c, double eps, std::size_t m);
/// N = ⌈(18/c²)·ln(2k/ε)⌉.
MonitorPlan plan_multi(const Rat& c, double eps, std::size_t k, std::size_t m);
/// N0 = ⌈(36/c²)·ln(1/low)⌉, at least 1. `phases` holds N0.
MonitorPlan plan_one_sided(const Rat& c, const Rat& low, std::size_t m);

/// (36m/c²)·ln(1/low) + (147m/c²)·low + m, in observations.
double expected_alarm_bound(const Rat& c, double low, std::size_t m);

/// Change of the walk value x for one phase.
Rat walk_step(const Rat& p1, const Rat& p2, bool in_event);

/// Likelihood-ratio monitor: after N·m observations outputs 1 iff lr <= 1.
/// Stops early once either chain's probability becomes zero.
Verdict run_m2(const Hmc& h1, const Hmc& h2, ObservationSource& source, const MonitorPlan& plan);

/// Random-walk monitor driven by the profile of `report`, in exact arithmetic.
/// Phase k >= 2 evaluates the event on the window formed by the last symbol of
/// phase k-1 and the first m-1 symbols of phase k. `steps`, if given,
/// receives the change of x for every completed phase.
Verdict run_m2prime(const Hmc& h1, const Hmc& h2, const DistinguishabilityReport& report,
                    ObservationSource& source, const MonitorPlan& plan, std::vector<Rat>* steps = nullptr);

struct AlarmOutcome {
  enum class Kind { Alarm, NoAlarm, Impossible };
  Kind kind = Kind::NoAlarm;
  std::size_t observations = 0;

  bool operator==(const AlarmOutcome&) const = default;
};

/// One-sided monitor: alarms at the end of the first phase where lr <= low.
/// Never alarms once chain 1 cannot have produced the prefix.
AlarmOutcome run_m1(const Hmc& h1, const Hmc& h2, ObservationSource& source, const Rat& low, std::size_t m,
                    std::optional<std::uint64_t> horizon_phases = std::nullopt);

/// Pairwise profile reports for models[i], models[j], i < j, row by row.
std::vector<DistinguishabilityReport> pairwise_reports(const std::vector<Hmc>& models);
/// min over pairwise c; throws PreconditionError when some pair is not distinguishable.
Rat multi_constant(const std::vector<DistinguishabilityReport>& reports);

/// Smallest index of a maximal likelihood after N·m observations.
Verdict run_multi(const std::vector<Hmc>& models, const std::vector<DistinguishabilityReport>& reports,
                  ObservationSource& source, const MonitorPlan& plan);

/// "DECISION <1|2|3> AFTER n OBS" for pairwise monitors.
std::string format_pairwise(const Verdict& v);
/// "DECISION <i|NONE> AFTER n OBS".
std::string format_multi(const Verdict& v);
std::string format_alarm(const AlarmOutcome& a);

}  // namespace hmcdist
