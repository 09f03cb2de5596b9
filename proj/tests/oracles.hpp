// Independent reference computations used to cross-check the library.
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hmcdist/model.hpp"
#include "hmcdist/rational.hpp"

namespace oracle {

using hmcdist::Hmc;
using hmcdist::Rat;
using hmcdist::RatMatrix;
using hmcdist::RatVector;
using hmcdist::StateId;
using hmcdist::Symbol;
using hmcdist::Word;

inline std::string models_dir() { return HMCDIST_MODELS_DIR; }

inline Hmc load(const std::string& name) {
  return std::get<Hmc>(hmcdist::load_model(models_dir() + "/" + name));
}

inline Rat transition(const Hmc& h, StateId s, StateId t) {
  for (const auto& e : h.successors(s)) {
    if (e.target == t) return e.probability;
  }
  return 0;
}

// sub(s, u, t) by summing over every state path.
inline Rat sub_paths(const Hmc& h, StateId s, const Word& u, StateId t) {
  if (u.empty() || h.observation(s) != u[0]) return 0;
  Rat total = 0;
  std::vector<StateId> path{s};
  auto rec = [&](auto&& self, std::size_t i, Rat weight) -> void {
    if (i == u.size()) {
      if (path.back() == t) total += weight;
      return;
    }
    for (StateId r = 0; r < h.size(); ++r) {
      if (h.observation(r) != u[i]) continue;
      Rat p = transition(h, path.back(), r);
      if (sgn(p) == 0) continue;
      path.push_back(r);
      self(self, i + 1, weight * p);
      path.pop_back();
    }
  };
  rec(rec, 1, Rat(1));
  return total;
}

inline Rat pr_paths(const Hmc& h, const RatVector& psi, const Word& u) {
  if (u.empty()) return 1;
  Rat total = 0;
  for (StateId s = 0; s < h.size(); ++s) {
    if (sgn(psi[s]) == 0) continue;
    for (StateId t = 0; t < h.size(); ++t) total += psi[s] * sub_paths(h, s, u, t);
  }
  return total;
}

inline Rat pr_paths(const Hmc& h, const Word& u) {
  RatVector psi(h.size());
  psi[h.initial()] = 1;
  return pr_paths(h, psi, u);
}

inline std::vector<Word> words_of_length(std::size_t symbols, std::size_t n) {
  if (n == 0) return {Word{}};
  std::vector<Word> out;
  for (const Word& w : words_of_length(symbols, n - 1)) {
    for (Symbol a = 0; a < symbols; ++a) {
      Word v{a};
      v.insert(v.end(), w.begin(), w.end());
      out.push_back(v);
    }
  }
  return out;
}

inline std::vector<Word> words_up_to(std::size_t symbols, std::size_t n) {
  std::vector<Word> out;
  for (std::size_t k = 0; k <= n; ++k) {
    auto w = words_of_length(symbols, k);
    out.insert(out.end(), w.begin(), w.end());
  }
  return out;
}

// Leibniz expansion; fine for the n <= 6 matrices used here.
inline Rat det(const RatMatrix& a) {
  const std::size_t n = a.size();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  Rat total = 0;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j] ? 1 : 0;
    }
    Rat term = inversions % 2 ? -1 : 1;
    for (std::size_t i = 0; i < n && sgn(term) != 0; ++i) term *= a[i][perm[i]];
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

// Rows independent iff their Gram matrix is nonsingular.
inline bool independent(const std::vector<RatVector>& rows) {
  if (rows.empty()) return true;
  RatMatrix g(rows.size(), RatVector(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size(); ++j) {
      for (std::size_t k = 0; k < rows[i].size(); ++k) g[i][j] += rows[i][k] * rows[j][k];
    }
  }
  return sgn(det(g)) != 0;
}

inline RatVector cramer(const RatMatrix& a, const RatVector& b) {
  const Rat d = det(a);
  RatVector x(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    RatMatrix aj = a;
    for (std::size_t i = 0; i < a.size(); ++i) aj[i][j] = b[i];
    x[j] = det(aj) / d;
  }
  return x;
}

// Canonical p/q.
inline Rat q(long p, long d) {
  Rat r(p, d);
  r.canonicalize();
  return r;
}

inline Rat random_rat(std::mt19937_64& rng, int lo = -20, int hi = 20, int den = 12) {
  std::uniform_int_distribution<int> num(lo, hi), d(1, den);
  Rat r(num(rng), d(rng));
  r.canonicalize();
  return r;
}

// Random chain with up to `max_states` states over {a, b}; every row is a
// random composition of 1 with small denominators.
inline Hmc random_hmc(std::mt19937_64& rng, std::size_t max_states, const std::string& prefix = "s") {
  std::uniform_int_distribution<std::size_t> count(1, max_states);
  const std::size_t n = count(rng);
  std::vector<std::string> names;
  std::vector<Symbol> obs;
  std::vector<std::vector<hmcdist::Edge>> edges(n);
  std::uniform_int_distribution<int> coin(0, 1), weight(0, 3);
  for (std::size_t s = 0; s < n; ++s) {
    names.push_back(prefix + std::to_string(s));
    obs.push_back(static_cast<Symbol>(coin(rng)));
    std::vector<int> w(n);
    int total = 0;
    for (auto& x : w) total += (x = weight(rng));
    if (total == 0) {
      w[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = 1;
      total = 1;
    }
    for (std::size_t t = 0; t < n; ++t) {
      if (w[t] > 0) {
        Rat p(w[t], total);
        p.canonicalize();
        edges[s].push_back({t, p});
      }
    }
  }
  return Hmc(names, hmcdist::Alphabet({"a", "b"}), obs, 0, edges);
}

}  // namespace oracle
