#include <random>

#include "doctest.h"
#include "hmcdist/errors.hpp"
#include "hmcdist/linalg.hpp"
#include "hmcdist/lp.hpp"
#include "hmcdist/rational.hpp"
#include "oracles.hpp"

using namespace hmcdist;

TEST_CASE("parse_rational accepts fractions and exact decimals") {
  CHECK(parse_rational("1/4") == Rat(1, 4));
  CHECK(parse_rational("0.25") == Rat(1, 4));
  CHECK(parse_rational("-1.5e-3") == Rat(-3, 2000));
  CHECK(parse_rational("6/8") == Rat(3, 4));
  CHECK(parse_rational("7") == 7);
  CHECK(parse_rational("0.1") == Rat(1, 10));
  CHECK_THROWS_AS(parse_rational("1/0"), ValidationError);
  CHECK_THROWS_AS(parse_rational("abc"), ValidationError);
  CHECK_THROWS_AS(parse_rational(""), ValidationError);
}

TEST_CASE("log_rat handles values outside double range") {
  Rat tiny(1);
  for (int i = 0; i < 2000; ++i) tiny /= 3;
  CHECK(log_rat(tiny) == doctest::Approx(-2000 * std::log(3.0)).epsilon(1e-12));
  CHECK(log_rat(Rat(3, 4)) == doctest::Approx(std::log(0.75)));
  CHECK(to_string(Rat(2, 7)) == "2/7");
  CHECK(to_string(Rat(3)) == "3");
}

TEST_CASE("field axioms") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const Rat a = oracle::random_rat(rng), b = oracle::random_rat(rng), c = oracle::random_rat(rng);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    if (sgn(a) != 0) CHECK((b / a) * a == b);
    CHECK(a - a == 0);
    CHECK(a.get_den() > 0);
  }
}

TEST_CASE("try_extend examples") {
  Basis basis(4);
  CHECK(basis.try_extend({1, 1, -1, -1}));
  CHECK(basis.try_extend({1, 0, -1, 0}));
  CHECK_FALSE(basis.try_extend({0, 1, 0, -1}));
  CHECK(basis.rank() == 2);
  CHECK(basis.try_extend({Rat(3, 4), 0, Rat(-1, 4), 0}));
  CHECK(basis.rank() == 3);
  CHECK_THROWS_AS(basis.try_extend({1, 2}), DimensionError);
}

TEST_CASE("try_extend agrees with the determinant oracle") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim(1, 5), small(-2, 2), pick(0, 3);
  for (int round = 0; round < 300; ++round) {
    const std::size_t n = static_cast<std::size_t>(dim(rng));
    Basis basis(n);
    std::vector<RatVector> kept;
    for (int k = 0; k < 7; ++k) {
      RatVector v(n);
      if (!kept.empty() && pick(rng) == 0) {
        // Combination of stored vectors: must be rejected.
        for (const auto& row : kept) {
          const Rat f = small(rng);
          for (std::size_t i = 0; i < n; ++i) v[i] += f * row[i];
        }
      } else {
        for (auto& x : v) x = oracle::random_rat(rng, -3, 3, 4);
      }
      auto with = kept;
      with.push_back(v);
      const bool expected = oracle::independent(with);
      CHECK(basis.try_extend(v) == expected);
      if (expected) kept.push_back(v);
      CHECK(basis.rank() == kept.size());
    }
  }
}

TEST_CASE("solve_linear") {
  RatMatrix id{{1, 0}, {0, 1}};
  CHECK(solve_linear(id, {Rat(2, 3), 5}) == RatVector{Rat(2, 3), 5});
  CHECK(solve_linear({{Rat(1, 2)}}, {Rat(1, 4)}) == RatVector{Rat(1, 2)});
  CHECK_THROWS_AS(solve_linear({{1, 2}, {2, 4}}, {1, 1}), SingularError);
  CHECK_THROWS_AS(solve_linear({{1, 2}}, {1}), DimensionError);

  std::mt19937_64 rng(3);
  for (int round = 0; round < 100; ++round) {
    const std::size_t n = 1 + round % 4;
    RatMatrix a(n, RatVector(n));
    RatVector b(n);
    for (auto& row : a) {
      for (auto& x : row) x = oracle::random_rat(rng, -5, 5, 3);
    }
    for (auto& x : b) x = oracle::random_rat(rng);
    if (sgn(oracle::det(a)) == 0) continue;
    CHECK(solve_linear(a, b) == oracle::cramer(a, b));
  }
}

TEST_CASE("solve_lp small outcomes") {
  {
    LpProblem lp;
    const auto x = lp.add_variable("x");
    lp.set_objective({{x, 1}});
    auto out = solve_lp(lp);
    REQUIRE(std::holds_alternative<LpOptimal>(out));
    CHECK(std::get<LpOptimal>(out).value == 0);
  }
  {
    LpProblem lp;
    const auto x = lp.add_variable("x", std::nullopt);
    lp.add_constraint({{x, 1}}, Relation::LessEqual, 0);
    lp.add_constraint({{x, 1}}, Relation::GreaterEqual, 1);
    lp.set_objective({{x, 1}});
    CHECK(std::holds_alternative<LpInfeasible>(solve_lp(lp)));
  }
  {
    LpProblem lp;
    const auto x = lp.add_variable("x", std::nullopt);
    lp.add_constraint({{x, 1}}, Relation::LessEqual, 3);
    lp.set_objective({{x, 1}});
    CHECK(std::holds_alternative<LpUnbounded>(solve_lp(lp)));
  }
  {
    // Free and bounded variables, equality row.
    LpProblem lp;
    const auto x = lp.add_variable("x", std::nullopt);
    const auto y = lp.add_variable("y", Rat(-2), Rat(5));
    const auto z = lp.add_variable("z", std::nullopt, Rat(1));
    lp.add_constraint({{x, 1}, {y, 1}, {z, 1}}, Relation::Equal, 2);
    lp.add_constraint({{x, 1}, {y, -1}}, Relation::GreaterEqual, Rat(-1, 2));
    lp.set_objective({{x, 1}, {y, 2}, {z, -1}});
    auto out = solve_lp(lp);
    REQUIRE(std::holds_alternative<LpOptimal>(out));
    const auto& opt = std::get<LpOptimal>(out);
    CHECK(lp.is_feasible(opt.point));
    CHECK(opt.value == lp.objective_at(opt.point));
    // x = 2 - y - z turns the objective into 2 + y - 2z: z = 1, y = -2, x = 3.
    CHECK(opt.value == -2);
    CHECK(opt.point == RatVector{3, -2, 1});
  }
}

TEST_CASE("simplex optimum is never beaten by random feasible points") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> coef(-4, 4), nvars(2, 4), ncons(1, 4), rel(0, 2), grid(0, 12);
  int checked_points = 0;
  for (int round = 0; round < 40; ++round) {
    const std::size_t n = static_cast<std::size_t>(nvars(rng));
    LpProblem lp;
    for (std::size_t i = 0; i < n; ++i) lp.add_variable("v" + std::to_string(i), Rat(0), Rat(3));
    // Anchor point keeps every random row satisfiable.
    RatVector anchor(n);
    for (auto& a : anchor) a = oracle::q(grid(rng), 4);
    const int rows = ncons(rng);
    for (int r = 0; r < rows; ++r) {
      std::vector<LinearTerm> terms;
      Rat at = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const Rat a = coef(rng);
        terms.push_back({i, a});
        at += a * anchor[i];
      }
      const int kind = rel(rng);
      if (kind == 0) lp.add_constraint(terms, Relation::LessEqual, at + oracle::q(grid(rng), 6));
      if (kind == 1) lp.add_constraint(terms, Relation::GreaterEqual, at - oracle::q(grid(rng), 6));
      if (kind == 2) lp.add_constraint(terms, Relation::Equal, at);
    }
    std::vector<LinearTerm> objective;
    for (std::size_t i = 0; i < n; ++i) objective.push_back({i, Rat(coef(rng))});
    lp.set_objective(objective);

    auto out = solve_lp(lp);
    REQUIRE(std::holds_alternative<LpOptimal>(out));
    const auto& opt = std::get<LpOptimal>(out);
    CHECK(lp.is_feasible(opt.point));
    CHECK(opt.value == lp.objective_at(opt.point));
    CHECK(lp.objective_at(anchor) >= opt.value);

    int found = 0;
    for (int tries = 0; tries < 20000 && found < 1000; ++tries) {
      RatVector p(n);
      if (tries % 2 == 0) {
        for (auto& x : p) x = oracle::q(grid(rng), 4);
      } else {
        // Random point on the segment between the anchor and the optimum.
        const Rat t = oracle::q(grid(rng), 12);
        for (std::size_t i = 0; i < n; ++i) p[i] = anchor[i] + t * (opt.point[i] - anchor[i]);
      }
      if (!lp.is_feasible(p)) continue;
      ++found;
      CHECK(lp.objective_at(p) >= opt.value);
    }
    checked_points += found;
  }
  CHECK(checked_points > 10000);
}
