#include <random>

#include "doctest.h"
#include "hmcdist/distinguish.hpp"
#include "hmcdist/errors.hpp"
#include "hmcdist/forward.hpp"
#include "oracles.hpp"

using namespace hmcdist;
using oracle::q;

namespace {

const char* kFig3[][2] = {{"fig3_h1_d4.hmc", "fig3_h2_d4.hmc"},
                          {"fig3_h1_d8.hmc", "fig3_h2_d8.hmc"},
                          {"fig3_h1_d6.hmc", "fig3_h2_d6.hmc"}};
const Rat kDelta[] = {q(1, 4), q(1, 8), q(1, 6)};

const char* kCorpus[] = {"fig1_h1.hmc", "fig1_h2.hmc", "fig2_h1.hmc", "fig2_h2.hmc", "fig3_h1_d4.hmc",
                         "fig3_h2_d4.hmc", "fig3_h1_d8.hmc", "fig4_h1.hmc", "fig4_h2.hmc"};

Dist point(const Hmc& h, StateId s) { return Dist::point(h.size(), s); }

std::vector<std::string> words_of(const Hmc& h, const TestSet& ts) {
  std::vector<std::string> out;
  for (const Word& w : ts.words) out.push_back(h.alphabet().format_word(w));
  return out;
}

// Duplicates state x: incoming mass is split evenly between x and its copy.
Hmc split_state(const Hmc& h, StateId x) {
  std::vector<std::string> names = h.state_names();
  names.push_back(h.state_name(x) + "_copy");
  std::vector<Symbol> obs;
  for (StateId s = 0; s < h.size(); ++s) obs.push_back(h.observation(s));
  obs.push_back(h.observation(x));
  std::vector<std::vector<Edge>> edges(h.size() + 1);
  for (StateId s = 0; s <= h.size(); ++s) {
    const StateId from = s == h.size() ? x : s;
    for (const Edge& e : h.successors(from)) {
      if (e.target == x) {
        edges[s].push_back({x, e.probability / 2});
        edges[s].push_back({h.size(), e.probability / 2});
      } else {
        edges[s].push_back(e);
      }
    }
  }
  return Hmc(names, h.alphabet(), obs, h.initial(), edges);
}

Rat brute_refined_singletons(const Hmc& h1, StateId s1, const Hmc& h2, StateId s2, std::size_t m) {
  Rat total = 0;
  RatVector p1(h1.size()), p2(h2.size());
  p1[s1] = 1;
  p2[s2] = 1;
  for (const Word& u : oracle::words_of_length(2, m)) {
    const Rat d = oracle::pr_paths(h1, p1, u) - oracle::pr_paths(h2, p2, u);
    if (sgn(d) > 0) total += d;
  }
  return total;
}

}  // namespace

TEST_CASE("fig3 test set for every delta") {
  for (const auto& pair : kFig3) {
    const Hmc h1 = oracle::load(pair[0]), h2 = oracle::load(pair[1]);
    const TestSet ts = compute_test_set(h1, h2);
    CHECK(words_of(h1, ts) == std::vector<std::string>{"ε", "a", "aa", "ba"});
    CHECK(ts.m == 4);
  }
  const Hmc one = parse_hmc("hmc\nalphabet: a\nstate s0 obs=a init\nedge s0 -> s0 1\n");
  CHECK(compute_test_set(one, one).size() == 1);
}

TEST_CASE("test sets are independent and closed") {
  std::vector<std::pair<Hmc, Hmc>> pairs;
  pairs.emplace_back(oracle::load("fig1_h1.hmc"), oracle::load("fig1_h2.hmc"));
  pairs.emplace_back(oracle::load("fig2_h1.hmc"), oracle::load("fig2_h2.hmc"));
  pairs.emplace_back(oracle::load("fig4_h1.hmc"), oracle::load("fig4_h2.hmc"));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 25; ++i) pairs.emplace_back(oracle::random_hmc(rng, 3), oracle::random_hmc(rng, 3, "t"));
  for (const auto& [h1, h2] : pairs) {
    const TestSet ts = compute_test_set(h1, h2);
    CHECK(ts.size() <= ts.m);
    CHECK(ts.words.front().empty());
    std::vector<RatVector> rows;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      CHECK(ts.words[k].size() < ts.m);
      rows.push_back(ts.stacked(k));
      CHECK(ts.eta1[k] == emission_vector(h1, ts.words[k]));
      CHECK(ts.eta2[k] == emission_vector(h2, ts.words[k]));
    }
    CHECK(oracle::independent(rows));
    for (std::size_t k = 0; k < ts.size(); ++k) {
      for (Symbol a = 0; a < 2; ++a) {
        Word w{a};
        w.insert(w.end(), ts.words[k].begin(), ts.words[k].end());
        RatVector v = emission_vector(h1, w);
        for (const Rat& x : emission_vector(h2, w)) v.push_back(-x);
        auto with = rows;
        with.push_back(v);
        CHECK_FALSE(oracle::independent(with));
      }
    }
  }
  const TestSet fig1 = compute_test_set(oracle::load("fig1_h1.hmc"), oracle::load("fig1_h2.hmc"));
  CHECK(fig1.size() <= 5);
}

TEST_CASE("equivalence") {
  const Hmc f41 = oracle::load("fig4_h1.hmc"), f42 = oracle::load("fig4_h2.hmc");
  CHECK(pr(f41, point(f41, 0), Word{0, 0}) == q(1, 2));
  CHECK(pr(f42, point(f42, 0), Word{0, 0}) == q(2, 3));
  CHECK_FALSE(equivalent(f41, f42));
  for (const char* name : kCorpus) {
    const Hmc h = oracle::load(name);
    CHECK(equivalent(h, h));
    for (StateId x = 0; x < h.size(); ++x) CHECK(equivalent(h, split_state(h, x)));
  }
}

TEST_CASE("equivalence agrees with brute-force word probabilities") {
  std::mt19937_64 rng(8);
  int equal_cases = 0;
  for (int i = 0; i < 60; ++i) {
    const Hmc h1 = oracle::random_hmc(rng, 3);
    const Hmc h2 = i % 2 ? split_state(h1, rng() % h1.size()) : oracle::random_hmc(rng, 3, "t");
    const Dist d1 = point(h1, h1.initial());
    const Dist d2 = point(h2, h2.initial());
    const TestSet ts = compute_test_set(h1, h2);
    bool brute = true;
    for (const Word& u : oracle::words_up_to(2, ts.m + 2)) {
      if (oracle::pr_paths(h1, d1.weights, u) != oracle::pr_paths(h2, d2.weights, u)) {
        brute = false;
        break;
      }
    }
    CHECK(equivalent(ts, d1, d2) == brute);
    equal_cases += brute ? 1 : 0;
  }
  CHECK(equal_cases >= 30);
}

TEST_CASE("dist and select_event on fig3") {
  for (std::size_t i = 0; i < 3; ++i) {
    const Hmc h1 = oracle::load(kFig3[i][0]), h2 = oracle::load(kFig3[i][1]);
    const TestSet ts = compute_test_set(h1, h2);
    CHECK(dist(ts, point(h1, 0), point(h2, 0)) == 2 * kDelta[i]);
    CHECK(dist(ts, point(h1, 1), point(h2, 1)) == 2 * kDelta[i]);
    const ProfileSelection s0 = select_event(ts, point(h1, 0), point(h2, 0));
    CHECK(h1.alphabet().format_word(s0.word) == "aa");
    CHECK(s0.direct);
    CHECK(s0.difference == 2 * kDelta[i]);
    CHECK(s0.p1 - s0.p2 == s0.difference);
    const ProfileSelection s1 = select_event(ts, point(h1, 1), point(h2, 1));
    CHECK(h1.alphabet().format_word(s1.word) == "ba");
    CHECK(s1.direct);
  }
  const Hmc h = oracle::load("fig1_h1.hmc");
  const TestSet ts = compute_test_set(h, h);
  CHECK(dist(ts, point(h, 0), point(h, 0)) == 0);
  const ProfileSelection tie = select_event(ts, point(h, 0), point(h, 0));
  CHECK(tie.word.empty());
  CHECK(tie.difference == 0);
}

TEST_CASE("event_member") {
  ProfileSelection sel;
  sel.word = {0, 0};
  sel.direct = true;
  sel.length = 4;
  const Alphabet ab({"a", "b"});
  CHECK(event_member(sel, ab.parse_word("aaba")));
  CHECK_FALSE(event_member(sel, ab.parse_word("abaa")));
  CHECK_THROWS_AS(event_member(sel, ab.parse_word("aab")), DimensionError);
  std::size_t inside = 0;
  for (const Word& w : all_words(2, 4)) inside += event_member(sel, w) ? 1 : 0;
  CHECK(inside == 4);
  sel.direct = false;
  CHECK_FALSE(event_member(sel, ab.parse_word("aaba")));
  CHECK(all_words(2, 4).size() == 16);
}

TEST_CASE("profile constant") {
  for (std::size_t i = 0; i < 3; ++i) {
    const Hmc h1 = oracle::load(kFig3[i][0]), h2 = oracle::load(kFig3[i][1]);
    const auto report = profile_constant(h1, h2);
    const Rat d = kDelta[i];
    CHECK(report.c == 4 * d / (3 + 2 * d));
    CHECK(report.distinguishable);
  }
  CHECK(profile_constant(oracle::load(kFig3[0][0]), oracle::load(kFig3[0][1])).c == q(2, 7));
  const auto fig4 = profile_constant(oracle::load("fig4_h1.hmc"), oracle::load("fig4_h2.hmc"));
  CHECK(fig4.c == 0);
  CHECK_FALSE(fig4.distinguishable);
  CHECK(profile_constant(oracle::load("fig1_h1.hmc"), oracle::load("fig1_h2.hmc")).distinguishable);
  CHECK(profile_constant(oracle::load("fig2_h1.hmc"), oracle::load("fig2_h2.hmc")).distinguishable);

  for (const char* name : kCorpus) {
    const Hmc h = oracle::load(name);
    const auto self = profile_constant(h, h);
    CHECK_FALSE(self.distinguishable);
    CHECK(self.c == 0);
  }
  for (const char* a : kCorpus) {
    for (const char* b : kCorpus) {
      const Hmc h1 = oracle::load(a), h2 = oracle::load(b);
      if (profile_constant(h1, h2).distinguishable) CHECK_FALSE(equivalent(h1, h2));
    }
  }

  // Different first observations: no reachable pair at all.
  const Hmc only_b = parse_hmc("hmc\nalphabet: a b\nstate t0 obs=b init\nedge t0 -> t0 1\n");
  const auto apart = profile_constant(oracle::load("fig1_h1.hmc"), only_b);
  CHECK(apart.c == 1);
  CHECK(apart.distinguishable);
  CHECK(apart.reachable_pairs.empty());
}

TEST_CASE("global LP of fig3") {
  const Hmc h1 = oracle::load(kFig3[0][0]), h2 = oracle::load(kFig3[0][1]);
  const TestSet ts = compute_test_set(h1, h2);
  const LpProblem lp = build_profile_lp(ts, 2, 2, std::nullopt, {});
  const auto out = solve_lp(lp);
  REQUIRE(std::holds_alternative<LpOptimal>(out));
  const auto& opt = std::get<LpOptimal>(out);
  CHECK(opt.value == q(1, 4));
  CHECK(lp.is_feasible(opt.point));
  const RatVector stated{q(5, 8), q(3, 8), q(7, 8), q(1, 8), q(1, 4)};
  CHECK(lp.is_feasible(stated));
  CHECK(lp.objective_at(stated) == q(1, 4));
  // The optimal face: psi1(s0) = p in [3/8, 5/8], psi2(t0) = 3p - 1.
  for (const Rat& p : {q(3, 8), q(1, 2), q(5, 8)}) {
    const RatVector pt{p, 1 - p, 3 * p - 1, 2 - 3 * p, q(1, 4)};
    CHECK(lp.is_feasible(pt));
  }
  const RatVector worse{q(5, 8), q(3, 8), q(7, 8), q(1, 8), q(1, 5)};
  CHECK_FALSE(lp.is_feasible(worse));
}

TEST_CASE("profile inequality on sampled reachable pairs") {
  std::vector<std::pair<Hmc, Hmc>> pairs;
  pairs.emplace_back(oracle::load("fig1_h1.hmc"), oracle::load("fig1_h2.hmc"));
  pairs.emplace_back(oracle::load("fig3_h1_d4.hmc"), oracle::load("fig3_h2_d4.hmc"));
  pairs.emplace_back(oracle::load("fig2_h1.hmc"), oracle::load("fig2_h2.hmc"));
  std::mt19937_64 rng(99);
  int checked = 0;
  for (const auto& [h1, h2] : pairs) {
    const auto report = profile_constant(h1, h2);
    REQUIRE(report.distinguishable);
    int local = 0;
    for (int tries = 0; tries < 5000 && local < 500; ++tries) {
      const Run run = sample_run(rng() % 2 ? h1 : h2, 1 + rng() % 12, rng());
      const auto c1 = cd(h1, point(h1, h1.initial()), run.symbols);
      const auto c2 = cd(h2, point(h2, h2.initial()), run.symbols);
      if (!c1 || !c2) continue;
      const Rat d = dist(report.testset, *c1, *c2);
      CHECK(d >= report.c);
      CHECK(select_event(report.testset, *c1, *c2).difference == d);
      ++local;
    }
    CHECK(local == 500);
    checked += local;
  }
  CHECK(checked == 1500);
}

TEST_CASE("refined constant") {
  const Hmc h1 = oracle::load(kFig3[0][0]), h2 = oracle::load(kFig3[0][1]);
  // Oracle: supports are singletons, so each LP reduces to a sum over Σ^4.
  const Rat from_s0 = brute_refined_singletons(h1, 0, h2, 0, 4);
  const Rat from_s1 = brute_refined_singletons(h1, 1, h2, 1, 4);
  CHECK(from_s0 == q(11, 16));
  CHECK(from_s1 == q(11, 16));
  const auto supports = reachable_support_pairs(h1, h2, 1000);
  CHECK(supports.size() == 2);
  const Rat refined = refined_constant(h1, h2, 1000);
  CHECK(refined == q(11, 16));
  CHECK(refined >= q(2, 7));
  CHECK_THROWS_AS(refined_constant(h1, h2, 8), GuardExceeded);

  const Hmc f1 = oracle::load("fig1_h1.hmc");
  CHECK(refined_constant(f1, f1, 1 << 12) == 0);

  for (const auto& [a, b] : {std::pair{"fig1_h1.hmc", "fig1_h2.hmc"}, std::pair{"fig2_h1.hmc", "fig2_h2.hmc"},
                             std::pair{"fig3_h1_d8.hmc", "fig3_h2_d8.hmc"}}) {
    const Hmc x = oracle::load(a), y = oracle::load(b);
    CHECK(refined_constant(x, y, 1 << 12) >= profile_constant(x, y).c);
  }
}
