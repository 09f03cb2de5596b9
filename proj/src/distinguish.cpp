#include "hmcdist/distinguish.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>

#include "hmcdist/errors.hpp"
#include "hmcdist/forward.hpp"
#include "hmcdist/linalg.hpp"

namespace hmcdist {
namespace {

Rat dot(const RatVector& eta, const Dist& psi) {
  if (eta.size() != psi.weights.size()) throw DimensionError("distribution does not match the chain's state count");
  Rat total = 0;
  for (std::size_t s = 0; s < eta.size(); ++s) {
    if (sgn(psi.weights[s]) != 0) total += eta[s] * psi.weights[s];
  }
  return total;
}

// eta(a w) = M(a) eta(w)
RatVector prepend(const Hmc& h, Symbol a, const RatVector& eta) {
  RatVector out(h.size());
  for (StateId s = 0; s < h.size(); ++s) {
    if (h.observation(s) != a) continue;
    for (const Edge& e : h.successors(s)) out[s] += e.probability * eta[e.target];
  }
  return out;
}

std::vector<StateId> step_support(const Hmc& h, const std::vector<StateId>& support, Symbol a) {
  std::vector<char> mark(h.size(), 0);
  for (StateId s : support) {
    for (const Edge& e : h.successors(s)) {
      if (h.observation(e.target) == a) mark[e.target] = 1;
    }
  }
  std::vector<StateId> out;
  for (StateId t = 0; t < h.size(); ++t) {
    if (mark[t]) out.push_back(t);
  }
  return out;
}

}  // namespace

RatVector TestSet::stacked(std::size_t k) const {
  RatVector v = eta1.at(k);
  for (const Rat& x : eta2.at(k)) v.push_back(-x);
  return v;
}

Rat TestSet::pr1(std::size_t k, const Dist& psi1) const { return dot(eta1.at(k), psi1); }
Rat TestSet::pr2(std::size_t k, const Dist& psi2) const { return dot(eta2.at(k), psi2); }

TestSet compute_test_set(const Hmc& h1, const Hmc& h2) {
  require_same_alphabet(h1, h2);
  TestSet ts;
  ts.m = h1.size() + h2.size();
  Basis basis(ts.m);
  ts.words.push_back({});
  ts.eta1.emplace_back(h1.size(), Rat(1));
  ts.eta2.emplace_back(h2.size(), Rat(1));
  basis.try_extend(ts.stacked(0));

  for (std::size_t next = 0; next < ts.words.size(); ++next) {
    for (Symbol a = 0; a < h1.alphabet().size(); ++a) {
      RatVector e1 = prepend(h1, a, ts.eta1[next]);
      RatVector e2 = prepend(h2, a, ts.eta2[next]);
      RatVector v = e1;
      for (const Rat& x : e2) v.push_back(-x);
      if (!basis.try_extend(v)) continue;
      Word w{a};
      w.insert(w.end(), ts.words[next].begin(), ts.words[next].end());
      ts.words.push_back(std::move(w));
      ts.eta1.push_back(std::move(e1));
      ts.eta2.push_back(std::move(e2));
    }
  }
  return ts;
}

bool equivalent(const TestSet& ts, const Dist& psi1, const Dist& psi2) {
  for (std::size_t k = 0; k < ts.size(); ++k) {
    if (ts.pr1(k, psi1) != ts.pr2(k, psi2)) return false;
  }
  return true;
}

bool equivalent(const Hmc& h1, const Hmc& h2, const Dist& psi1, const Dist& psi2) {
  return equivalent(compute_test_set(h1, h2), psi1, psi2);
}

bool equivalent(const Hmc& h1, const Hmc& h2) {
  return equivalent(h1, h2, Dist::point(h1.size(), h1.initial()), Dist::point(h2.size(), h2.initial()));
}

Rat dist(const TestSet& ts, const Dist& psi1, const Dist& psi2) {
  Rat best = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) best = std::max(best, Rat(abs(ts.pr1(k, psi1) - ts.pr2(k, psi2))));
  return best;
}

ProfileSelection select_event(const TestSet& ts, const Dist& psi1, const Dist& psi2) {
  ProfileSelection sel;
  sel.length = ts.m;
  Rat best = -1;
  Rat q1, q2;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    Rat a = ts.pr1(k, psi1);
    Rat b = ts.pr2(k, psi2);
    Rat d = abs(a - b);
    if (d > best) {
      best = d;
      sel.word_index = k;
      q1 = a;
      q2 = b;
    }
  }
  sel.word = ts.words[sel.word_index];
  sel.direct = q1 > q2;
  if (sel.direct) {
    sel.p1 = q1;
    sel.p2 = q2;
  } else {
    sel.p1 = 1 - q1;
    sel.p2 = 1 - q2;
  }
  sel.difference = sel.p1 - sel.p2;
  return sel;
}

bool event_member(const ProfileSelection& sel, const Word& w) {
  if (w.size() != sel.length) throw DimensionError("event word must have length " + std::to_string(sel.length));
  const bool prefix = sel.word.size() <= w.size() && std::equal(sel.word.begin(), sel.word.end(), w.begin());
  return sel.direct ? prefix : !prefix;
}

LpProblem build_profile_lp(const TestSet& ts, std::size_t states1, std::size_t states2,
                           std::optional<StateId> dominating,
                           const std::vector<std::pair<StateId, StateId>>& reachable_pairs) {
  LpProblem lp;
  for (std::size_t s = 0; s < states1; ++s) lp.add_variable("psi1[" + std::to_string(s) + "]");
  for (std::size_t t = 0; t < states2; ++t) lp.add_variable("psi2[" + std::to_string(t) + "]");
  const std::size_t x = lp.add_variable("x");

  std::vector<LinearTerm> sum1, sum2;
  for (std::size_t s = 0; s < states1; ++s) sum1.push_back({s, 1});
  for (std::size_t t = 0; t < states2; ++t) sum2.push_back({states1 + t, 1});
  lp.add_constraint(sum1, Relation::Equal, 1);
  lp.add_constraint(sum2, Relation::Equal, 1);

  if (dominating) {
    const StateId s1 = *dominating;
    for (std::size_t t = 0; t < states1; ++t) {
      if (t != s1) lp.add_constraint({{s1, 1}, {t, -1}}, Relation::GreaterEqual, 0);
    }
    std::vector<char> partner(states2, 0);
    for (const auto& [a, b] : reachable_pairs) {
      if (a == s1) partner[b] = 1;
    }
    for (std::size_t t = 0; t < states2; ++t) {
      if (!partner[t]) lp.add_constraint({{states1 + t, 1}}, Relation::Equal, 0);
    }
  }

  for (std::size_t k = 0; k < ts.size(); ++k) {
    std::vector<LinearTerm> diff;
    for (std::size_t s = 0; s < states1; ++s) {
      if (sgn(ts.eta1[k][s]) != 0) diff.push_back({s, ts.eta1[k][s]});
    }
    for (std::size_t t = 0; t < states2; ++t) {
      if (sgn(ts.eta2[k][t]) != 0) diff.push_back({states1 + t, -ts.eta2[k][t]});
    }
    std::vector<LinearTerm> upper = diff;
    upper.push_back({x, -1});
    lp.add_constraint(upper, Relation::LessEqual, 0);
    std::vector<LinearTerm> lower = std::move(diff);
    lower.push_back({x, 1});
    lp.add_constraint(lower, Relation::GreaterEqual, 0);
  }
  lp.set_objective({{x, 1}});
  return lp;
}

DistinguishabilityReport profile_constant(const Hmc& h1, const Hmc& h2) {
  DistinguishabilityReport report;
  report.testset = compute_test_set(h1, h2);
  report.reachable_pairs = product_reachable_pairs(h1, h2);
  std::optional<Rat> best;
  for (StateId s1 = 0; s1 < h1.size(); ++s1) {
    LpProblem lp = build_profile_lp(report.testset, h1.size(), h2.size(), s1, report.reachable_pairs);
    LpOutcome outcome = solve_lp(lp);
    if (const auto* opt = std::get_if<LpOptimal>(&outcome)) {
      if (!best || opt->value < *best) best = opt->value;
    }
    report.lps.push_back({s1, std::move(outcome)});
  }
  report.c = best ? *best : Rat(1);
  report.distinguishable = sgn(report.c) > 0;
  return report;
}

std::vector<std::pair<std::vector<StateId>, std::vector<StateId>>> reachable_support_pairs(
    const Hmc& h1, const Hmc& h2, std::uint64_t guard) {
  require_same_alphabet(h1, h2);
  using Pair = std::pair<std::vector<StateId>, std::vector<StateId>>;
  std::set<Pair> seen;
  std::deque<Pair> queue;
  if (h1.observation(h1.initial()) == h2.observation(h2.initial())) {
    Pair start{{h1.initial()}, {h2.initial()}};
    seen.insert(start);
    queue.push_back(start);
  }
  while (!queue.empty()) {
    Pair cur = std::move(queue.front());
    queue.pop_front();
    for (Symbol a = 0; a < h1.alphabet().size(); ++a) {
      Pair nxt{step_support(h1, cur.first, a), step_support(h2, cur.second, a)};
      if (nxt.first.empty() || nxt.second.empty()) continue;
      if (seen.insert(nxt).second) {
        if (seen.size() > guard) {
          throw GuardExceeded("more than " + std::to_string(guard) + " reachable support pairs");
        }
        queue.push_back(std::move(nxt));
      }
    }
  }
  return {seen.begin(), seen.end()};
}

std::vector<Word> all_words(std::size_t symbols, std::size_t length) {
  std::vector<Word> out{Word{}};
  for (std::size_t i = 0; i < length; ++i) {
    std::vector<Word> next;
    next.reserve(out.size() * symbols);
    for (const Word& w : out) {
      for (Symbol a = 0; a < symbols; ++a) {
        next.push_back(w);
        next.back().push_back(a);
      }
    }
    out = std::move(next);
  }
  return out;
}

Rat refined_constant(const Hmc& h1, const Hmc& h2, std::uint64_t guard) {
  require_same_alphabet(h1, h2);
  const std::size_t m = h1.size() + h2.size();
  const std::size_t sigma = h1.alphabet().size();
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < m; ++i) {
    if (count > guard / std::max<std::size_t>(sigma, 1)) {
      throw GuardExceeded("|Σ|^m = " + std::to_string(sigma) + "^" + std::to_string(m) + " exceeds guard " +
                          std::to_string(guard));
    }
    count *= sigma;
  }
  if (count > guard) throw GuardExceeded("|Σ|^m exceeds guard " + std::to_string(guard));

  const auto pairs = reachable_support_pairs(h1, h2, guard);
  if (pairs.empty()) return Rat(1);

  const std::vector<Word> words = all_words(sigma, m);
  std::vector<RatVector> eta1, eta2;
  eta1.reserve(words.size());
  eta2.reserve(words.size());
  for (const Word& w : words) {
    eta1.push_back(emission_vector(h1, w));
    eta2.push_back(emission_vector(h2, w));
  }

  std::optional<Rat> best;
  for (const auto& [support1, support2] : pairs) {
    LpProblem lp;
    for (StateId s : support1) lp.add_variable("psi1[" + h1.state_name(s) + "]");
    for (StateId t : support2) lp.add_variable("psi2[" + h2.state_name(t) + "]");
    const std::size_t base = support1.size() + support2.size();
    std::vector<LinearTerm> sum1, sum2, objective;
    for (std::size_t i = 0; i < support1.size(); ++i) sum1.push_back({i, 1});
    for (std::size_t j = 0; j < support2.size(); ++j) sum2.push_back({support1.size() + j, 1});
    lp.add_constraint(sum1, Relation::Equal, 1);
    lp.add_constraint(sum2, Relation::Equal, 1);
    for (std::size_t k = 0; k < words.size(); ++k) {
      const std::size_t xu = lp.add_variable("x[" + h1.alphabet().format_word(words[k]) + "]");
      std::vector<LinearTerm> row;
      for (std::size_t i = 0; i < support1.size(); ++i) {
        if (sgn(eta1[k][support1[i]]) != 0) row.push_back({i, eta1[k][support1[i]]});
      }
      for (std::size_t j = 0; j < support2.size(); ++j) {
        if (sgn(eta2[k][support2[j]]) != 0) row.push_back({support1.size() + j, -eta2[k][support2[j]]});
      }
      row.push_back({xu, -1});
      lp.add_constraint(row, Relation::LessEqual, 0);
      objective.push_back({base + k, 1});
    }
    lp.set_objective(objective);
    const LpOutcome outcome = solve_lp(lp);
    const auto* opt = std::get_if<LpOptimal>(&outcome);
    if (!opt) throw Error("refined constant LP did not reach an optimum");
    if (!best || opt->value < *best) best = opt->value;
  }
  return *best;
}

}  // namespace hmcdist
