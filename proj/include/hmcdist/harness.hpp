#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hmcdist/model.hpp"
#include "hmcdist/monitors.hpp"
#include "hmcdist/rational.hpp"

namespace hmcdist {

enum class MonitorKind { TwoSided, Walk, OneSided, Multi };

std::string to_string(MonitorKind kind);
MonitorKind parse_monitor_kind(const std::string& name);  // throws ValidationError

struct EvaluationConfig {
  MonitorKind kind = MonitorKind::TwoSided;
  std::vector<Hmc> models;       // two for pairwise monitors, k >= 2 for multi
  double eps = 0.1;              // two-sided, walk, multi
  Rat low = Rat(1, 20);          // one-sided
  std::size_t trials = 2000;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> phases;          // overrides the planned N
  std::optional<std::uint64_t> horizon_phases;  // one-sided; default 10·N0
  unsigned threads = 1;
};

struct SourceStats {
  std::size_t source = 0;        // 1-based model index the streams were drawn from
  std::size_t errors = 0;        // wrong verdicts (one-sided: alarms under source 2)
  std::size_t alarms = 0;        // one-sided only
  double error_rate = 0.0;
  double mean_observations = 0.0;  // one-sided under source 1: mean over alarmed runs
  std::size_t median_observations = 0;
  std::size_t p95_observations = 0;
  double limit = 0.0;            // pass threshold
  bool pass = false;
};

struct ErrorReport {
  MonitorKind kind = MonitorKind::TwoSided;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  Rat c;
  MonitorPlan plan;
  std::uint64_t horizon_phases = 0;  // one-sided
  double target = 0.0;               // ε or low
  double bound = 0.0;                // analytic bound on the error probability at N
  double sigma = 0.0;                // sqrt(t(1-t)/trials) at the target
  double response_bound = 0.0;       // one-sided: expected alarm time bound
  std::vector<SourceStats> sources;
  bool pass = false;
};

/// Monte-Carlo estimate of monitor errors. Trial t of source i uses the seed
/// derive_seed(derive_seed(seed, i), t), so results do not depend on `threads`.
ErrorReport estimate_error(const EvaluationConfig& config);

struct VerdictMeasure {
  std::vector<Word> words;
  std::vector<int> verdicts;  // 1, 2 or 3 per word
  std::vector<Rat> pr1, pr2;
  std::array<Rat, 3> under1;  // P_1(output j + 1)
  std::array<Rat, 3> under2;
};

/// Exact verdict probabilities of M2 or M2' over all words of length N·m.
/// Throws GuardExceeded when |Σ|^(N·m) > 2^20.
VerdictMeasure exact_verdict_measure(const Hmc& h1, const Hmc& h2, std::uint64_t phases, MonitorKind kind);

/// Number of single words whose membership flip in the output-1 set would
/// increase P_1(W) - P_2(W).
std::size_t flip_violations(const VerdictMeasure& measure);

}  // namespace hmcdist
