#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <utility>
#include <vector>

#include "hmcdist/rational.hpp"

namespace hmcdist {

using StateId = std::size_t;
using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;

/// Ordered observation alphabet. Symbols are referred to by their position.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols);

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::string& name(Symbol s) const { return symbols_.at(s); }
  const std::vector<std::string>& names() const noexcept { return symbols_; }
  std::optional<Symbol> find(std::string_view name) const;
  Symbol at(std::string_view name) const;  // throws ValidationError

  /// Parses whitespace-separated symbols; if every symbol is a single
  /// character, an unseparated token such as "aab" is also accepted.
  Word parse_word(std::string_view text) const;
  std::string format_word(const Word& word) const;  // "ε" for the empty word

  bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, Symbol> index_;
};

struct Edge {
  StateId target;
  Rat probability;
};

/// Finite hidden Markov chain with exact transition probabilities.
/// Immutable after construction; construction validates every invariant.
class Hmc {
 public:
  Hmc(std::vector<std::string> state_names, Alphabet alphabet, std::vector<Symbol> observations,
      StateId initial, std::vector<std::vector<Edge>> edges);

  std::size_t size() const noexcept { return names_.size(); }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const std::string& state_name(StateId s) const { return names_.at(s); }
  const std::vector<std::string>& state_names() const noexcept { return names_; }
  std::optional<StateId> find_state(std::string_view name) const;
  Symbol observation(StateId s) const { return observations_[s]; }
  StateId initial() const noexcept { return initial_; }
  std::span<const Edge> successors(StateId s) const { return edges_[s]; }
  /// Transition probability, zero for absent edges.
  Rat transition(StateId from, StateId to) const;
  /// Float copy of successors(s) probabilities, same order.
  std::span<const double> successor_weights(StateId s) const { return weights_[s]; }

  /// Samples a successor of s from a uniform 64-bit draw.
  StateId step(StateId s, std::uint64_t draw) const;

  /// Same chain over a reordered alphabet containing the same symbols
  /// (or a superset of them).
  Hmc with_alphabet(const Alphabet& alphabet) const;

  bool operator==(const Hmc& other) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, StateId> name_index_;
  Alphabet alphabet_;
  std::vector<Symbol> observations_;
  StateId initial_;
  std::vector<std::vector<Edge>> edges_;
  std::vector<std::vector<double>> weights_;
  // Cumulative 64-bit thresholds derived exactly from the rationals.
  std::vector<std::vector<std::uint64_t>> thresholds_;
};

/// Hmc whose bottom strongly connected components are labelled bad or good.
class ClassifiedHmc {
 public:
  /// Validates that the labelled sets are disjoint and that every BSCC lies
  /// entirely inside exactly one of them while no transient state is labelled.
  ClassifiedHmc(Hmc hmc, std::vector<bool> bad, std::vector<bool> good);

  const Hmc& hmc() const noexcept { return hmc_; }
  bool is_bad(StateId s) const { return bad_[s]; }
  bool is_good(StateId s) const { return good_[s]; }
  const std::vector<bool>& bad() const noexcept { return bad_; }
  const std::vector<bool>& good() const noexcept { return good_; }

 private:
  Hmc hmc_;
  std::vector<bool> bad_;
  std::vector<bool> good_;
};

/// Exact distribution over the states of one chain.
struct Dist {
  RatVector weights;

  static Dist point(std::size_t states, StateId s);
  bool is_valid() const;  // nonnegative, sums to exactly 1
  bool operator==(const Dist& other) const { return weights == other.weights; }
};

struct Run {
  Word symbols;
  std::vector<StateId> states;
  std::uint64_t seed = 0;
};

using Model = std::variant<Hmc, ClassifiedHmc>;

/// Parses the line-oriented model format ("hmc" / "chmc" header).
/// Throws ParseError (with line number) or ValidationError.
Model parse_model(std::string_view text);
Hmc parse_hmc(std::string_view text);
ClassifiedHmc parse_chmc(std::string_view text);
Model load_model(const std::string& path);

std::string serialize(const Hmc& h);
std::string serialize(const ClassifiedHmc& c);

/// SplitMix64 finaliser: counter-based derivation of independent seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Draws a run of `length` observations with std::mt19937_64 seeded by `seed`.
Run sample_run(const Hmc& h, std::size_t length, std::uint64_t seed);

/// Pairs (t1, t2) such that some nonempty word u leaves chain i in t_i with
/// positive probability in both chains simultaneously.
std::vector<std::pair<StateId, StateId>> product_reachable_pairs(const Hmc& h1, const Hmc& h2);

/// Throws ValidationError unless both chains use the same ordered alphabet.
void require_same_alphabet(const Hmc& h1, const Hmc& h2);

}  // namespace hmcdist
