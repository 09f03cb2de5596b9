#include "doctest.h"
#include "hmcdist/errors.hpp"
#include "hmcdist/harness.hpp"
#include "oracles.hpp"

using namespace hmcdist;
using oracle::q;

TEST_CASE("exact verdict measure on the lower-bound example") {
  const Hmc h1 = oracle::load("fig3_h1_d4.hmc"), h2 = oracle::load("fig3_h2_d4.hmc");
  // Oracle first: sum path-enumerated probabilities over words where pr1 >= pr2.
  Rat p2_out1 = 0, p1_out1 = 0;
  for (const Word& w : oracle::words_of_length(2, 8)) {
    const Rat a = oracle::pr_paths(h1, w), b = oracle::pr_paths(h2, w);
    if (sgn(a) > 0 && b <= a) {
      p1_out1 += a;
      p2_out1 += b;
    }
  }
  CHECK(p2_out1 == q(1156, 16384));
  CHECK(p2_out1 >= q(81, 2048));
  CHECK(q(1, 8) * q(81, 256) == q(81, 2048));

  const VerdictMeasure vm = exact_verdict_measure(h1, h2, 2, MonitorKind::TwoSided);
  CHECK(vm.words.size() == 256);
  CHECK(vm.under2[0] == q(1156, 16384));
  CHECK(vm.under1[0] == p1_out1);
  CHECK(vm.under1[0] + vm.under1[1] == 1);
  CHECK(vm.under1[2] == 0);
  CHECK(vm.under2[0] + vm.under2[1] + vm.under2[2] == 1);
  CHECK(flip_violations(vm) == 0);
  for (std::size_t i = 0; i < vm.words.size(); i += 17) {
    CHECK(vm.pr1[i] == oracle::pr_paths(h1, vm.words[i]));
    CHECK(vm.pr2[i] == oracle::pr_paths(h2, vm.words[i]));
  }

  const VerdictMeasure walk = exact_verdict_measure(h1, h2, 2, MonitorKind::Walk);
  for (const auto& u : {walk.under1, walk.under2}) CHECK(u[0] + u[1] + u[2] == 1);

  const VerdictMeasure same = exact_verdict_measure(h1, h1, 1, MonitorKind::TwoSided);
  CHECK(same.under1[0] == 1);
  CHECK(flip_violations(same) == 0);

  CHECK_THROWS_AS(exact_verdict_measure(h1, h2, 6, MonitorKind::TwoSided), GuardExceeded);
  CHECK_THROWS_AS(exact_verdict_measure(h1, h2, 1, MonitorKind::OneSided), PreconditionError);
}

TEST_CASE("flip test detects a suboptimal set") {
  VerdictMeasure vm;
  vm.words = {{0}, {1}};
  vm.verdicts = {2, 1};
  vm.pr1 = {q(3, 4), q(1, 4)};
  vm.pr2 = {q(1, 4), q(3, 4)};
  CHECK(flip_violations(vm) == 2);
  vm.verdicts = {1, 2};
  CHECK(flip_violations(vm) == 0);
}

TEST_CASE("error estimation is reproducible across thread counts") {
  EvaluationConfig cfg;
  cfg.models = {oracle::load("fig3_h1_d4.hmc"), oracle::load("fig3_h2_d4.hmc")};
  cfg.trials = 120;
  cfg.seed = 7;
  cfg.phases = 40;
  const ErrorReport a = estimate_error(cfg);
  cfg.threads = 3;
  const ErrorReport b = estimate_error(cfg);
  REQUIRE(a.sources.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a.sources[i].errors == b.sources[i].errors);
    CHECK(a.sources[i].mean_observations == b.sources[i].mean_observations);
    CHECK(a.sources[i].p95_observations == b.sources[i].p95_observations);
    CHECK(a.sources[i].error_rate >= 0.0);
    CHECK(a.sources[i].error_rate <= 1.0);
  }
  CHECK(a.c == q(2, 7));
  CHECK(a.plan.phases == 40);

  cfg.trials = 99;
  CHECK_THROWS_AS(estimate_error(cfg), PreconditionError);
  cfg.trials = 100;
  cfg.models = {oracle::load("fig4_h1.hmc"), oracle::load("fig4_h2.hmc")};
  CHECK_THROWS_AS(estimate_error(cfg), PreconditionError);
  CHECK(parse_monitor_kind("walk") == MonitorKind::Walk);
  CHECK(to_string(MonitorKind::OneSided) == "one-sided");
  CHECK_THROWS_AS(parse_monitor_kind("nope"), ValidationError);
}
