#include "hmcdist/forward.hpp"

#include <cmath>
#include <limits>

#include "hmcdist/errors.hpp"

namespace hmcdist {
namespace {

void check_symbol(const Hmc& h, Symbol a) {
  if (a >= h.alphabet().size()) throw ValidationError("symbol outside the chain's alphabet");
}

void check_dist(const Hmc& h, const Dist& psi) {
  if (psi.weights.size() != h.size()) throw DimensionError("distribution does not match the chain's state count");
}

}  // namespace

SubMatrix sub_initial(const Hmc& h, Symbol a) {
  check_symbol(h, a);
  SubMatrix m{1, RatMatrix(h.size(), RatVector(h.size()))};
  for (StateId s = 0; s < h.size(); ++s) {
    if (h.observation(s) == a) m.entries[s][s] = 1;
  }
  return m;
}

SubMatrix sub_extend(const Hmc& h, const SubMatrix& m, Symbol a) {
  check_symbol(h, a);
  if (m.entries.size() != h.size()) throw DimensionError("sub matrix does not belong to this chain");
  SubMatrix next{m.length + 1, RatMatrix(h.size(), RatVector(h.size()))};
  for (StateId s = 0; s < h.size(); ++s) {
    for (StateId t = 0; t < h.size(); ++t) {
      if (sgn(m.entries[s][t]) == 0) continue;
      for (const Edge& e : h.successors(t)) {
        if (h.observation(e.target) == a) next.entries[s][e.target] += m.entries[s][t] * e.probability;
      }
    }
  }
  return next;
}

SubMatrix sub_word(const Hmc& h, const Word& u) {
  if (u.empty()) throw PreconditionError("sub is defined for nonempty words only");
  SubMatrix m = sub_initial(h, u[0]);
  for (std::size_t i = 1; i < u.size(); ++i) m = sub_extend(h, m, u[i]);
  return m;
}

RatVector forward_vector(const Hmc& h, const Dist& psi, const Word& u) {
  check_dist(h, psi);
  if (u.empty()) return psi.weights;
  check_symbol(h, u[0]);
  RatVector alpha(h.size());
  for (StateId s = 0; s < h.size(); ++s) {
    if (h.observation(s) == u[0]) alpha[s] = psi.weights[s];
  }
  for (std::size_t i = 1; i < u.size(); ++i) {
    check_symbol(h, u[i]);
    RatVector next(h.size());
    bool any = false;
    for (StateId t = 0; t < h.size(); ++t) {
      if (sgn(alpha[t]) == 0) continue;
      for (const Edge& e : h.successors(t)) {
        if (h.observation(e.target) == u[i]) {
          next[e.target] += alpha[t] * e.probability;
          any = true;
        }
      }
    }
    alpha = std::move(next);
    if (!any) break;  // all zero from here on
  }
  return alpha;
}

Rat pr(const Hmc& h, const Dist& psi, const Word& u) {
  if (u.empty()) return Rat(1);
  Rat total = 0;
  for (const Rat& x : forward_vector(h, psi, u)) total += x;
  return total;
}

std::optional<Dist> cd(const Hmc& h, const Dist& psi, const Word& u) {
  if (u.empty()) throw PreconditionError("cd is defined for nonempty words only");
  RatVector alpha = forward_vector(h, psi, u);
  Rat total = 0;
  for (const Rat& x : alpha) total += x;
  if (sgn(total) == 0) return std::nullopt;
  for (Rat& x : alpha) x /= total;
  return Dist{std::move(alpha)};
}

Dist advance(const Hmc& h, const Dist& psi) {
  check_dist(h, psi);
  Dist next{RatVector(h.size())};
  for (StateId s = 0; s < h.size(); ++s) {
    if (sgn(psi.weights[s]) == 0) continue;
    for (const Edge& e : h.successors(s)) next.weights[e.target] += psi.weights[s] * e.probability;
  }
  return next;
}

RatVector emission_vector(const Hmc& h, const Word& u) {
  RatVector eta(h.size(), Rat(1));
  for (std::size_t k = u.size(); k-- > 0;) {
    check_symbol(h, u[k]);
    RatVector next(h.size());
    for (StateId s = 0; s < h.size(); ++s) {
      if (h.observation(s) != u[k]) continue;
      for (const Edge& e : h.successors(s)) next[s] += e.probability * eta[e.target];
    }
    eta = std::move(next);
  }
  return eta;
}

LikelihoodRatio lr(const Hmc& h1, const Hmc& h2, const Word& u) {
  const Rat p1 = pr(h1, Dist::point(h1.size(), h1.initial()), u);
  const Rat p2 = pr(h2, Dist::point(h2.size(), h2.initial()), u);
  if (sgn(p1) > 0) return {LikelihoodRatio::Kind::Finite, p2 / p1};
  if (sgn(p2) > 0) return {LikelihoodRatio::Kind::PlusInfinity, Rat(0)};
  return {LikelihoodRatio::Kind::Undefined, Rat(0)};
}

// ---------------------------------------------------------------- streaming

ChainTracker::ChainTracker(const Hmc& h)
    : hmc_(&h),
      dist_(h.size(), 0.0),
      support_(h.size(), 0),
      scratch_(h.size(), 0.0),
      scratch_support_(h.size(), 0) {
  dist_[h.initial()] = 1.0;
  support_[h.initial()] = 1;
}

void ChainTracker::step(Symbol a) {
  ++count_;
  if (impossible_) return;
  const Hmc& h = *hmc_;
  const std::size_t n = h.size();
  if (count_ == 1) {
    // The initial state emits the first symbol.
    if (h.observation(h.initial()) != a) impossible_ = true;
    return;
  }
  std::fill(scratch_.begin(), scratch_.end(), 0.0);
  std::fill(scratch_support_.begin(), scratch_support_.end(), 0);
  bool any = false;
  for (StateId t = 0; t < n; ++t) {
    if (!support_[t]) continue;
    auto edges = h.successors(t);
    auto weights = h.successor_weights(t);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const StateId r = edges[k].target;
      if (h.observation(r) != a) continue;
      scratch_[r] += dist_[t] * weights[k];
      scratch_support_[r] = 1;
      any = true;
    }
  }
  if (!any) {
    impossible_ = true;
    return;
  }
  double total = 0.0;
  for (StateId r = 0; r < n; ++r) total += scratch_[r];
  if (total > 0.0) {
    log_likelihood_ += std::log(total);
    for (StateId r = 0; r < n; ++r) scratch_[r] /= total;
  } else {
    // Structurally possible but below double range: restart from the support.
    std::size_t count = 0;
    for (StateId r = 0; r < n; ++r) count += scratch_support_[r] ? 1 : 0;
    log_likelihood_ += std::log(std::numeric_limits<double>::denorm_min());
    for (StateId r = 0; r < n; ++r) scratch_[r] = scratch_support_[r] ? 1.0 / static_cast<double>(count) : 0.0;
  }
  dist_.swap(scratch_);
  support_.swap(scratch_support_);
}

double ChainTracker::log_likelihood() const noexcept {
  return impossible_ ? -std::numeric_limits<double>::infinity() : log_likelihood_;
}

StreamTracker::StreamTracker(const Hmc& h1, const Hmc& h2) : first_(h1), second_(h2) {
  require_same_alphabet(h1, h2);
}

void StreamTracker::step(Symbol a) {
  first_.step(a);
  second_.step(a);
}

double StreamTracker::log_lr() const noexcept {
  if (zero1() && zero2()) return std::numeric_limits<double>::quiet_NaN();
  if (zero1()) return std::numeric_limits<double>::infinity();
  if (zero2()) return -std::numeric_limits<double>::infinity();
  return second_.log_likelihood() - first_.log_likelihood();
}

}  // namespace hmcdist
