#include "hmcdist/monitors.hpp"

#include <cmath>
#include <limits>

#include "hmcdist/errors.hpp"
#include "hmcdist/forward.hpp"

namespace hmcdist {
namespace {

constexpr double kTieWindow = 1e-9;
constexpr std::size_t kExactTieLength = 64;

double checked_c(const Rat& c) {
  if (sgn(c) <= 0) throw PreconditionError("profile constant must be positive (chains not distinguishable)");
  if (c > 1) throw PreconditionError("profile constant must not exceed 1");
  return to_double(c);
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("error bound must lie in (0, 1)");
}

Rat sum(const RatVector& v) {
  Rat total = 0;
  for (const Rat& x : v) total += x;
  return total;
}

}  // namespace

std::uint64_t tolerant_ceil(double v) {
  if (!std::isfinite(v) || v < 0) throw PreconditionError("phase count is not a finite nonnegative number");
  const double r = std::round(v);
  if (std::fabs(v - r) <= 1e-12 * std::max(1.0, std::fabs(v))) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(v));
}

MonitorPlan plan_two_sided(const Rat& c, double eps, std::size_t m) {
  return plan_multi(c, eps, 1, m);
}

MonitorPlan plan_multi(const Rat& c, double eps, std::size_t k, std::size_t m) {
  const double cd = checked_c(c);
  check_eps(eps);
  if (k == 0) throw PreconditionError("at least one model is required");
  if (m == 0) throw PreconditionError("phase length must be positive");
  MonitorPlan plan;
  plan.phases = std::max<std::uint64_t>(1, tolerant_ceil(18.0 / (cd * cd) * std::log(2.0 * static_cast<double>(k) / eps)));
  plan.m = m;
  plan.c = c;
  plan.target = eps;
  return plan;
}

MonitorPlan plan_one_sided(const Rat& c, const Rat& low, std::size_t m) {
  const double cd = checked_c(c);
  if (sgn(low) <= 0 || low > 1) throw PreconditionError("low must lie in (0, 1]");
  if (m == 0) throw PreconditionError("phase length must be positive");
  MonitorPlan plan;
  plan.phases = std::max<std::uint64_t>(1, tolerant_ceil(36.0 / (cd * cd) * -log_rat(low)));
  plan.m = m;
  plan.c = c;
  plan.target = to_double(low);
  return plan;
}

double expected_alarm_bound(const Rat& c, double low, std::size_t m) {
  const double cd = checked_c(c);
  if (!(low > 0.0 && low <= 1.0)) throw PreconditionError("low must lie in (0, 1]");
  const double md = static_cast<double>(m);
  return 36.0 * md / (cd * cd) * std::log(1.0 / low) + 147.0 * md / (cd * cd) * low + md;
}

Rat walk_step(const Rat& p1, const Rat& p2, bool in_event) {
  const Rat s = p1 + p2;
  if (s <= 1) return in_event ? Rat(-1) : Rat(s / (2 - s));
  return in_event ? Rat(-(2 - s) / s) : Rat(1);
}

// ---------------------------------------------------------------- M2

Verdict run_m2(const Hmc& h1, const Hmc& h2, ObservationSource& source, const MonitorPlan& plan) {
  StreamTracker tracker(h1, h2);
  const std::uint64_t total = plan.observations();
  const bool keep = total <= kExactTieLength;
  Word seen;
  for (std::uint64_t n = 0; n < total; ++n) {
    auto a = source.next();
    if (!a) throw TruncatedStream(static_cast<std::size_t>(n), static_cast<std::size_t>(total));
    tracker.step(*a);
    if (keep) seen.push_back(*a);
    const std::size_t count = static_cast<std::size_t>(n + 1);
    if (tracker.zero1() && tracker.zero2()) return {std::nullopt, count};
    if (tracker.zero1()) return {2, count};
    if (tracker.zero2()) return {1, count};
  }
  const double g = tracker.log_lr();
  if (keep && std::fabs(g) <= kTieWindow) {
    const LikelihoodRatio r = lr(h1, h2, seen);
    return {r.value <= 1 ? 1u : 2u, static_cast<std::size_t>(total)};
  }
  return {g <= 0.0 ? 1u : 2u, static_cast<std::size_t>(total)};
}

// ---------------------------------------------------------------- M2'

Verdict run_m2prime(const Hmc& h1, const Hmc& h2, const DistinguishabilityReport& report,
                    ObservationSource& source, const MonitorPlan& plan, std::vector<Rat>* steps) {
  require_same_alphabet(h1, h2);
  if (!report.distinguishable) throw PreconditionError("chains are not distinguishable");
  const TestSet& ts = report.testset;
  if (plan.m != ts.m) throw PreconditionError("phase length must equal |S1| + |S2|");
  const std::size_t m = plan.m;
  const std::size_t required = static_cast<std::size_t>(plan.observations());

  Dist psi1 = Dist::point(h1.size(), h1.initial());
  Dist psi2 = Dist::point(h2.size(), h2.initial());
  Rat x = 0;
  std::size_t consumed = 0;
  Word ext, window;
  Symbol last = 0;
  for (std::uint64_t k = 0; k < plan.phases; ++k) {
    ext.clear();
    if (k > 0) ext.push_back(last);
    for (std::size_t i = 0; i < m; ++i) {
      auto a = source.next();
      if (!a) throw TruncatedStream(consumed, required);
      ++consumed;
      ext.push_back(*a);
    }
    window.assign(ext.begin(), ext.begin() + static_cast<std::ptrdiff_t>(m));
    last = ext.back();

    RatVector alpha1 = forward_vector(h1, psi1, ext);
    RatVector alpha2 = forward_vector(h2, psi2, ext);
    const Rat total1 = sum(alpha1);
    const Rat total2 = sum(alpha2);
    const bool zero1 = sgn(total1) == 0;
    const bool zero2 = sgn(total2) == 0;
    if (zero1 && zero2) return {std::nullopt, consumed};
    if (zero1) return {2, consumed};
    if (zero2) return {1, consumed};

    const ProfileSelection sel = select_event(ts, psi1, psi2);
    const Rat dx = walk_step(sel.p1, sel.p2, event_member(sel, window));
    x += dx;
    if (steps) steps->push_back(dx);

    for (Rat& v : alpha1) v /= total1;
    for (Rat& v : alpha2) v /= total2;
    psi1.weights = std::move(alpha1);
    psi2.weights = std::move(alpha2);
  }
  return {x <= 0 ? 1u : 2u, consumed};
}

// ---------------------------------------------------------------- M1

AlarmOutcome run_m1(const Hmc& h1, const Hmc& h2, ObservationSource& source, const Rat& low, std::size_t m,
                    std::optional<std::uint64_t> horizon_phases) {
  if (sgn(low) <= 0 || low > 1) throw PreconditionError("low must lie in (0, 1]");
  if (m == 0) throw PreconditionError("phase length must be positive");
  StreamTracker tracker(h1, h2);
  const double log_low = log_rat(low);
  Word seen;
  std::size_t n = 0;
  for (std::uint64_t phase = 0; !horizon_phases || phase < *horizon_phases; ++phase) {
    for (std::size_t i = 0; i < m; ++i) {
      auto a = source.next();
      if (!a) return {AlarmOutcome::Kind::NoAlarm, n};
      tracker.step(*a);
      ++n;
      if (n <= kExactTieLength) seen.push_back(*a);
      if (tracker.zero1()) return {AlarmOutcome::Kind::Impossible, n};
    }
    if (tracker.zero2()) return {AlarmOutcome::Kind::Alarm, n};
    const double g = tracker.log_lr();
    bool alarm = g <= log_low;
    if (n <= kExactTieLength && std::fabs(g - log_low) <= kTieWindow) {
      alarm = lr(h1, h2, seen).value <= low;
    }
    if (alarm) return {AlarmOutcome::Kind::Alarm, n};
  }
  return {AlarmOutcome::Kind::NoAlarm, n};
}

// ---------------------------------------------------------------- multi

std::vector<DistinguishabilityReport> pairwise_reports(const std::vector<Hmc>& models) {
  std::vector<DistinguishabilityReport> out;
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t j = i + 1; j < models.size(); ++j) out.push_back(profile_constant(models[i], models[j]));
  }
  return out;
}

Rat multi_constant(const std::vector<DistinguishabilityReport>& reports) {
  if (reports.empty()) throw PreconditionError("at least two models are required");
  Rat c = 1;
  for (const auto& r : reports) {
    if (!r.distinguishable) throw PreconditionError("some pair of models is not distinguishable");
    if (r.c < c) c = r.c;
  }
  return c;
}

Verdict run_multi(const std::vector<Hmc>& models, const std::vector<DistinguishabilityReport>& reports,
                  ObservationSource& source, const MonitorPlan& plan) {
  if (models.empty()) throw PreconditionError("at least one model is required");
  for (const Hmc& h : models) require_same_alphabet(models.front(), h);
  for (const auto& r : reports) {
    if (!r.distinguishable) throw PreconditionError("some pair of models is not distinguishable");
  }
  std::vector<ChainTracker> trackers;
  trackers.reserve(models.size());
  for (const Hmc& h : models) trackers.emplace_back(h);

  const std::uint64_t total = plan.observations();
  const bool keep = total <= kExactTieLength;
  Word seen;
  for (std::uint64_t n = 0; n < total; ++n) {
    auto a = source.next();
    if (!a) throw TruncatedStream(static_cast<std::size_t>(n), static_cast<std::size_t>(total));
    if (keep) seen.push_back(*a);
    bool any = false;
    for (auto& t : trackers) {
      t.step(*a);
      any = any || !t.impossible();
    }
    if (!any) return {std::nullopt, static_cast<std::size_t>(n + 1)};
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < trackers.size(); ++i) {
    if (trackers[i].log_likelihood() > trackers[best].log_likelihood()) best = i;
  }
  if (keep) {
    // Resolve near-ties exactly.
    const double top = trackers[best].log_likelihood();
    bool close = false;
    for (std::size_t i = 0; i < trackers.size(); ++i) {
      if (i != best && std::fabs(trackers[i].log_likelihood() - top) <= kTieWindow) close = true;
    }
    if (close) {
      Rat top_exact = -1;
      for (std::size_t i = 0; i < models.size(); ++i) {
        const Rat p = pr(models[i], Dist::point(models[i].size(), models[i].initial()), seen);
        if (p > top_exact) {
          top_exact = p;
          best = i;
        }
      }
    }
  }
  return {best + 1, static_cast<std::size_t>(total)};
}

// ---------------------------------------------------------------- output

std::string format_pairwise(const Verdict& v) {
  return "DECISION " + (v.chain ? std::to_string(*v.chain) : std::string("3")) + " AFTER " +
         std::to_string(v.observations) + " OBS";
}

std::string format_multi(const Verdict& v) {
  return "DECISION " + (v.chain ? std::to_string(*v.chain) : std::string("NONE")) + " AFTER " +
         std::to_string(v.observations) + " OBS";
}

std::string format_alarm(const AlarmOutcome& a) {
  switch (a.kind) {
    case AlarmOutcome::Kind::Alarm:
      return "ALARM AFTER " + std::to_string(a.observations) + " OBS";
    case AlarmOutcome::Kind::NoAlarm:
      return "NO-ALARM AFTER " + std::to_string(a.observations) + " OBS";
    case AlarmOutcome::Kind::Impossible:
      break;
  }
  return "IMPOSSIBLE AFTER " + std::to_string(a.observations) + " OBS";
}

}  // namespace hmcdist
