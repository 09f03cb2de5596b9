#include "hmcdist/harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "hmcdist/distinguish.hpp"
#include "hmcdist/errors.hpp"
#include "hmcdist/forward.hpp"
#include "hmcdist/stream.hpp"

namespace hmcdist {
namespace {

struct TrialResult {
  bool error = false;
  bool alarm = false;
  std::size_t observations = 0;
};

// Runs fn(t) for t in [0, trials) on `threads` workers; results land by index.
std::vector<TrialResult> run_trials(std::size_t trials, unsigned threads,
                                    const std::function<TrialResult(std::size_t)>& fn) {
  std::vector<TrialResult> results(trials);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(trials)));
  if (threads == 1) {
    for (std::size_t t = 0; t < trials; ++t) results[t] = fn(t);
    return results;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t t = w; t < trials; t += threads) results[t] = fn(t);
    });
  }
  for (auto& th : pool) th.join();
  return results;
}

std::size_t percentile(std::vector<std::size_t> v, double q) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::min(v.size() - 1, k == 0 ? 0 : k - 1)];
}

void summarise(SourceStats& st, const std::vector<TrialResult>& results, bool alarm_only) {
  std::vector<std::size_t> obs;
  std::uint64_t sum = 0;
  for (const auto& r : results) {
    st.errors += r.error ? 1 : 0;
    st.alarms += r.alarm ? 1 : 0;
    if (alarm_only && !r.alarm) continue;
    obs.push_back(r.observations);
    sum += r.observations;
  }
  st.error_rate = static_cast<double>(st.errors) / static_cast<double>(results.size());
  st.mean_observations = obs.empty() ? 0.0 : static_cast<double>(sum) / static_cast<double>(obs.size());
  st.median_observations = percentile(obs, 0.5);
  st.p95_observations = percentile(obs, 0.95);
}

}  // namespace

std::string to_string(MonitorKind kind) {
  switch (kind) {
    case MonitorKind::TwoSided:
      return "two-sided";
    case MonitorKind::Walk:
      return "walk";
    case MonitorKind::OneSided:
      return "one-sided";
    case MonitorKind::Multi:
      break;
  }
  return "multi";
}

MonitorKind parse_monitor_kind(const std::string& name) {
  if (name == "two-sided") return MonitorKind::TwoSided;
  if (name == "walk") return MonitorKind::Walk;
  if (name == "one-sided") return MonitorKind::OneSided;
  if (name == "multi") return MonitorKind::Multi;
  throw ValidationError("unknown monitor '" + name + "'");
}

ErrorReport estimate_error(const EvaluationConfig& config) {
  if (config.trials < 100) throw PreconditionError("at least 100 trials are required");
  const auto& models = config.models;
  if (config.kind == MonitorKind::Multi ? models.size() < 2 : models.size() != 2) {
    throw PreconditionError("wrong number of models for monitor " + to_string(config.kind));
  }
  ErrorReport report;
  report.kind = config.kind;
  report.trials = config.trials;
  report.seed = config.seed;
  const double trials = static_cast<double>(config.trials);

  if (config.kind == MonitorKind::Multi) {
    const auto reports = pairwise_reports(models);
    report.c = multi_constant(reports);
    std::size_t largest = 0;
    for (const Hmc& h : models) largest = std::max(largest, h.size());
    report.plan = plan_multi(report.c, config.eps, models.size(), 2 * largest);
    if (config.phases) report.plan.phases = *config.phases;
    const double cd = to_double(report.c);
    report.target = config.eps;
    report.bound = 2.0 * static_cast<double>(models.size()) *
                   std::exp(-cd * cd / 18.0 * static_cast<double>(report.plan.phases));
    report.sigma = std::sqrt(report.target * (1 - report.target) / trials);
    for (std::size_t i = 0; i < models.size(); ++i) {
      const std::uint64_t base = derive_seed(config.seed, i + 1);
      auto results = run_trials(config.trials, config.threads, [&](std::size_t t) {
        ChainSource source(models[i], derive_seed(base, t));
        const Verdict v = run_multi(models, reports, source, report.plan);
        return TrialResult{v.chain != i + 1, false, v.observations};
      });
      SourceStats st;
      st.source = i + 1;
      summarise(st, results, false);
      st.limit = report.target + 3 * report.sigma;
      st.pass = st.error_rate <= st.limit;
      report.sources.push_back(st);
    }
  } else {
    const Hmc& h1 = models[0];
    const Hmc& h2 = models[1];
    const DistinguishabilityReport dr = profile_constant(h1, h2);
    if (!dr.distinguishable) throw PreconditionError("chains are not distinguishable");
    report.c = dr.c;
    const double cd = to_double(dr.c);
    const std::size_t m = h1.size() + h2.size();

    if (config.kind == MonitorKind::OneSided) {
      report.plan = plan_one_sided(dr.c, config.low, m);
      report.horizon_phases = config.horizon_phases ? *config.horizon_phases : 10 * report.plan.phases;
      report.target = to_double(config.low);
      report.bound = report.target;
      report.sigma = std::sqrt(report.target * (1 - report.target) / trials);
      report.response_bound = expected_alarm_bound(dr.c, report.target, m);
      for (std::size_t i = 0; i < 2; ++i) {
        const std::uint64_t base = derive_seed(config.seed, i + 1);
        auto results = run_trials(config.trials, config.threads, [&](std::size_t t) {
          ChainSource source(models[i], derive_seed(base, t));
          const AlarmOutcome a = run_m1(h1, h2, source, config.low, m, report.horizon_phases);
          const bool alarm = a.kind == AlarmOutcome::Kind::Alarm;
          return TrialResult{i == 1 ? alarm : !alarm, alarm, a.observations};
        });
        SourceStats st;
        st.source = i + 1;
        summarise(st, results, i == 0);
        if (i == 0) {
          // Coverage: alarms on at least 99% of runs, mean response within the bound.
          st.limit = 0.01;
          st.pass = st.error_rate <= st.limit && st.mean_observations <= report.response_bound;
        } else {
          st.limit = report.target + 3 * report.sigma;
          st.pass = st.error_rate <= st.limit;
        }
        report.sources.push_back(st);
      }
    } else {
      report.plan = plan_two_sided(dr.c, config.eps, m);
      if (config.phases) report.plan.phases = *config.phases;
      report.target = config.eps;
      const double e = std::exp(-cd * cd / 18.0 * static_cast<double>(report.plan.phases));
      report.bound = config.kind == MonitorKind::TwoSided ? 2.0 * e : e;
      report.sigma = std::sqrt(report.target * (1 - report.target) / trials);
      for (std::size_t i = 0; i < 2; ++i) {
        const std::uint64_t base = derive_seed(config.seed, i + 1);
        auto results = run_trials(config.trials, config.threads, [&](std::size_t t) {
          ChainSource source(models[i], derive_seed(base, t));
          const Verdict v = config.kind == MonitorKind::TwoSided ? run_m2(h1, h2, source, report.plan)
                                                                 : run_m2prime(h1, h2, dr, source, report.plan);
          return TrialResult{v.chain != i + 1, false, v.observations};
        });
        SourceStats st;
        st.source = i + 1;
        summarise(st, results, false);
        st.limit = report.target + 3 * report.sigma;
        st.pass = st.error_rate <= st.limit;
        report.sources.push_back(st);
      }
    }
  }
  report.pass = std::all_of(report.sources.begin(), report.sources.end(), [](const SourceStats& s) { return s.pass; });
  return report;
}

VerdictMeasure exact_verdict_measure(const Hmc& h1, const Hmc& h2, std::uint64_t phases, MonitorKind kind) {
  require_same_alphabet(h1, h2);
  if (kind != MonitorKind::TwoSided && kind != MonitorKind::Walk) {
    throw PreconditionError("exact verdict measures are available for the two-sided and walk monitors");
  }
  if (phases == 0) throw PreconditionError("at least one phase is required");
  const std::size_t m = h1.size() + h2.size();
  const std::size_t sigma = h1.alphabet().size();
  constexpr std::uint64_t kGuard = std::uint64_t{1} << 20;
  std::uint64_t count = 1;
  for (std::uint64_t i = 0; i < phases * m; ++i) {
    count *= sigma;
    if (count > kGuard) {
      throw GuardExceeded("|Σ|^(N·m) = " + std::to_string(sigma) + "^" + std::to_string(phases * m) +
                          " exceeds 2^20");
    }
  }

  std::optional<DistinguishabilityReport> report;
  MonitorPlan plan;
  plan.phases = phases;
  plan.m = m;
  if (kind == MonitorKind::Walk) {
    report = profile_constant(h1, h2);
    plan.c = report->c;
  }

  VerdictMeasure out;
  out.words = all_words(sigma, static_cast<std::size_t>(phases * m));
  const Dist d1 = Dist::point(h1.size(), h1.initial());
  const Dist d2 = Dist::point(h2.size(), h2.initial());
  for (Rat& r : out.under1) r = 0;
  for (Rat& r : out.under2) r = 0;
  for (const Word& w : out.words) {
    const Rat p1 = pr(h1, d1, w);
    const Rat p2 = pr(h2, d2, w);
    int verdict;
    if (kind == MonitorKind::TwoSided) {
      if (sgn(p1) == 0 && sgn(p2) == 0) {
        verdict = 3;
      } else if (sgn(p1) == 0) {
        verdict = 2;
      } else if (sgn(p2) == 0) {
        verdict = 1;
      } else {
        verdict = p2 <= p1 ? 1 : 2;
      }
    } else {
      WordSource source(w);
      const Verdict v = run_m2prime(h1, h2, *report, source, plan);
      verdict = v.chain ? static_cast<int>(*v.chain) : 3;
    }
    out.verdicts.push_back(verdict);
    out.under1[verdict - 1] += p1;
    out.under2[verdict - 1] += p2;
    out.pr1.push_back(p1);
    out.pr2.push_back(p2);
  }
  return out;
}

std::size_t flip_violations(const VerdictMeasure& measure) {
  std::size_t count = 0;
  for (std::size_t k = 0; k < measure.words.size(); ++k) {
    const Rat gain = measure.pr1[k] - measure.pr2[k];
    // Removing a member changes the difference by -gain, adding a non-member by +gain.
    const bool member = measure.verdicts[k] == 1;
    if (member ? sgn(gain) < 0 : sgn(gain) > 0) ++count;
  }
  return count;
}

}  // namespace hmcdist
