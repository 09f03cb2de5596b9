#include "hmcdist/rv.hpp"

#include <algorithm>
#include <utility>

#include "hmcdist/errors.hpp"
#include "hmcdist/linalg.hpp"

namespace hmcdist {

std::vector<std::vector<StateId>> bsccs(const Hmc& h) {
  // Iterative Tarjan.
  const std::size_t n = h.size();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
  std::vector<char> on_stack(n, 0);
  std::vector<StateId> stack;
  std::vector<std::vector<StateId>> components;
  std::size_t counter = 0;

  struct Frame {
    StateId v;
    std::size_t edge;
  };
  for (StateId root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      auto succ = h.successors(f.v);
      if (f.edge < succ.size()) {
        const StateId w = succ[f.edge++].target;
        if (index[w] == kUnset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const StateId v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] != index[v]) continue;
      std::vector<StateId> component;
      StateId w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        comp[w] = components.size();
        component.push_back(w);
      } while (w != v);
      components.push_back(std::move(component));
    }
  }

  std::vector<std::vector<StateId>> bottom;
  for (std::size_t k = 0; k < components.size(); ++k) {
    bool closed = true;
    for (StateId s : components[k]) {
      for (const Edge& e : h.successors(s)) closed = closed && comp[e.target] == k;
    }
    if (closed) {
      std::sort(components[k].begin(), components[k].end());
      bottom.push_back(std::move(components[k]));
    }
  }
  std::sort(bottom.begin(), bottom.end());
  return bottom;
}

ClassifiedHmc::ClassifiedHmc(Hmc hmc, std::vector<bool> bad, std::vector<bool> good)
    : hmc_(std::move(hmc)), bad_(std::move(bad)), good_(std::move(good)) {
  const std::size_t n = hmc_.size();
  if (bad_.size() != n || good_.size() != n) throw DimensionError("classification does not match the state count");
  std::vector<char> in_bscc(n, 0);
  for (const auto& component : bsccs(hmc_)) {
    const bool all_bad = std::all_of(component.begin(), component.end(), [&](StateId s) { return bad_[s]; });
    const bool all_good = std::all_of(component.begin(), component.end(), [&](StateId s) { return good_[s]; });
    if (!all_bad && !all_good) {
      throw ValidationError("unlabeled BSCC containing state " + hmc_.state_name(component.front()));
    }
    for (StateId s : component) in_bscc[s] = 1;
  }
  for (StateId s = 0; s < n; ++s) {
    if (bad_[s] && good_[s]) throw ValidationError("state " + hmc_.state_name(s) + " labeled both bad and good");
    if ((bad_[s] || good_[s]) && !in_bscc[s]) {
      throw ValidationError("transient state " + hmc_.state_name(s) + " is labeled");
    }
  }
}

RatVector reach_probabilities(const ClassifiedHmc& c, Target target) {
  const Hmc& h = c.hmc();
  const std::size_t n = h.size();
  const auto& hit = target == Target::Bad ? c.bad() : c.good();
  const auto& miss = target == Target::Bad ? c.good() : c.bad();
  RatVector x(n);
  std::vector<StateId> transient;
  std::vector<std::size_t> slot(n, 0);
  for (StateId s = 0; s < n; ++s) {
    if (hit[s]) {
      x[s] = 1;
    } else if (!miss[s]) {
      slot[s] = transient.size();
      transient.push_back(s);
    }
  }
  if (transient.empty()) return x;
  const std::size_t k = transient.size();
  RatMatrix a(k, RatVector(k));
  RatVector b(k);
  for (std::size_t i = 0; i < k; ++i) {
    const StateId s = transient[i];
    a[i][i] += 1;
    for (const Edge& e : h.successors(s)) {
      if (hit[e.target]) {
        b[i] += e.probability;
      } else if (!miss[e.target]) {
        a[i][slot[e.target]] -= e.probability;
      }
    }
  }
  const RatVector sol = solve_linear(a, b);
  for (std::size_t i = 0; i < k; ++i) x[transient[i]] = sol[i];
  return x;
}

Hmc condition_on(const ClassifiedHmc& c, Target target) {
  const Hmc& h = c.hmc();
  const RatVector p = reach_probabilities(c, target);
  if (sgn(p[h.initial()]) == 0) {
    throw PreconditionError(target == Target::Bad ? "P(Bad) = 0 from the initial state"
                                                  : "P(Good) = 0 from the initial state");
  }
  std::vector<StateId> keep;
  std::vector<std::size_t> slot(h.size(), 0);
  for (StateId s = 0; s < h.size(); ++s) {
    if (sgn(p[s]) > 0) {
      slot[s] = keep.size();
      keep.push_back(s);
    }
  }
  std::vector<std::string> names;
  std::vector<Symbol> obs;
  std::vector<std::vector<Edge>> edges(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const StateId s = keep[i];
    names.push_back(h.state_name(s));
    obs.push_back(h.observation(s));
    for (const Edge& e : h.successors(s)) {
      if (sgn(p[e.target]) == 0) continue;
      edges[i].push_back({slot[e.target], e.probability * p[e.target] / p[s]});
    }
  }
  return Hmc(std::move(names), h.alphabet(), std::move(obs), slot[h.initial()], std::move(edges));
}

ConditionedPair condition(const ClassifiedHmc& c) {
  return {condition_on(c, Target::Bad), condition_on(c, Target::Good)};
}

MonitorabilityResult decide_monitorable(const ClassifiedHmc& c) {
  ConditionedPair chains = condition(c);
  DistinguishabilityReport report = profile_constant(chains.bad, chains.good);
  const bool monitorable = report.distinguishable;
  return {monitorable, std::move(chains), std::move(report)};
}

ClassifiedHmc combine(const Hmc& h1, const Hmc& h2) {
  require_same_alphabet(h1, h2);
  if (h1.alphabet().find(kCombineSymbol)) {
    throw ValidationError(std::string("alphabet already contains the reserved symbol ") + kCombineSymbol);
  }
  std::vector<std::string> symbols = h1.alphabet().names();
  symbols.push_back(kCombineSymbol);
  Alphabet alphabet(symbols);
  const Symbol fresh = static_cast<Symbol>(symbols.size() - 1);

  const std::size_t n = 1 + h1.size() + h2.size();
  std::vector<std::string> names{"start"};
  std::vector<Symbol> obs{fresh};
  std::vector<std::vector<Edge>> edges(n);
  edges[0] = {{1 + h1.initial(), Rat(1, 2)}, {1 + h1.size() + h2.initial(), Rat(1, 2)}};
  auto copy = [&](const Hmc& h, const std::string& prefix, std::size_t offset) {
    for (StateId s = 0; s < h.size(); ++s) {
      names.push_back(prefix + h.state_name(s));
      obs.push_back(h.observation(s));
      for (const Edge& e : h.successors(s)) edges[offset + s].push_back({offset + e.target, e.probability});
    }
  };
  copy(h1, "h1.", 1);
  copy(h2, "h2.", 1 + h1.size());

  std::vector<bool> bad(n, false), good(n, false);
  for (const auto& component : bsccs(h1)) {
    for (StateId s : component) bad[1 + s] = true;
  }
  for (const auto& component : bsccs(h2)) {
    for (StateId s : component) good[1 + h1.size() + s] = true;
  }
  Hmc combined(std::move(names), std::move(alphabet), std::move(obs), 0, std::move(edges));
  return ClassifiedHmc(std::move(combined), std::move(bad), std::move(good));
}

}  // namespace hmcdist
