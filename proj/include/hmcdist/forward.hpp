#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hmcdist/model.hpp"
#include "hmcdist/rational.hpp"

namespace hmcdist {

/// sub(s, u, t) for every pair of states: the probability that the chain,
/// started in s, emits u and sits in t when emitting u's last symbol.
struct SubMatrix {
  std::size_t length = 0;
  RatMatrix entries;  // entries[s][t]
};

/// Base case |u| = 1.
SubMatrix sub_initial(const Hmc& h, Symbol a);
/// sub for u·a from sub for u.
SubMatrix sub_extend(const Hmc& h, const SubMatrix& m, Symbol a);
/// sub for a nonempty word.
SubMatrix sub_word(const Hmc& h, const Word& u);

/// Forward vector alpha(t) = sum_s psi(s) sub(s, u, t); psi itself for u = ε.
RatVector forward_vector(const Hmc& h, const Dist& psi, const Word& u);

/// Probability that h emits u from psi (1 for the empty word).
Rat pr(const Hmc& h, const Dist& psi, const Word& u);

/// Conditional state distribution after emitting u from psi; nullopt when
/// pr(psi, u) = 0. Requires |u| >= 1.
std::optional<Dist> cd(const Hmc& h, const Dist& psi, const Word& u);

/// One transition of the chain applied to psi (psi * Phi).
Dist advance(const Hmc& h, const Dist& psi);

/// Per-state emission probabilities eta(u)_s = P_s(u Σ^ω).
RatVector emission_vector(const Hmc& h, const Word& u);

/// lr(u) = pr_2(u) / pr_1(u) from the initial states.
struct LikelihoodRatio {
  enum class Kind { Finite, PlusInfinity, Undefined };
  Kind kind = Kind::Undefined;
  Rat value;  // meaningful for Finite only

  bool is_finite() const { return kind == Kind::Finite; }
};

LikelihoodRatio lr(const Hmc& h1, const Hmc& h2, const Word& u);

/// Scaled forward recursion for one chain over an unbounded stream.
/// Keeps a normalised state distribution, the accumulated natural-log
/// likelihood, and a structural zero flag driven by support emptiness.
class ChainTracker {
 public:
  explicit ChainTracker(const Hmc& h);

  void step(Symbol a);

  bool impossible() const noexcept { return impossible_; }
  /// log pr(u); -infinity once impossible.
  double log_likelihood() const noexcept;
  const std::vector<double>& distribution() const noexcept { return dist_; }
  std::size_t observations() const noexcept { return count_; }

 private:
  const Hmc* hmc_;
  std::vector<double> dist_;
  std::vector<char> support_;
  std::vector<double> scratch_;
  std::vector<char> scratch_support_;
  double log_likelihood_ = 0.0;
  bool impossible_ = false;
  std::size_t count_ = 0;
};

/// Pair of chain trackers maintaining log lr(u) = log pr_2(u) - log pr_1(u).
class StreamTracker {
 public:
  StreamTracker(const Hmc& h1, const Hmc& h2);

  void step(Symbol a);

  /// Finite while neither chain is impossible.
  double log_lr() const noexcept;
  bool zero1() const noexcept { return first_.impossible(); }
  bool zero2() const noexcept { return second_.impossible(); }
  std::size_t observations() const noexcept { return first_.observations(); }
  const ChainTracker& first() const noexcept { return first_; }
  const ChainTracker& second() const noexcept { return second_; }

 private:
  ChainTracker first_;
  ChainTracker second_;
};

}  // namespace hmcdist
