#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <istream>
#include <optional>
#include <random>

#include "hmcdist/model.hpp"

namespace hmcdist {

/// Pull-based observation stream; nullopt marks the end.
class ObservationSource {
 public:
  virtual ~ObservationSource() = default;
  virtual std::optional<Symbol> next() = 0;
};

class WordSource final : public ObservationSource {
 public:
  explicit WordSource(const Word& word) : word_(&word) {}
  std::optional<Symbol> next() override;

 private:
  const Word* word_;
  std::size_t pos_ = 0;
};

/// Whitespace-separated symbols from a text stream. Tokens such as "abba" are
/// split into characters when every symbol of the alphabet is a single character.
class TextSource final : public ObservationSource {
 public:
  TextSource(std::istream& in, const Alphabet& alphabet) : in_(&in), alphabet_(&alphabet) {}
  std::optional<Symbol> next() override;

 private:
  std::istream* in_;
  const Alphabet* alphabet_;
  std::deque<Symbol> pending_;
};

/// Unbounded run of a chain, drawn exactly as sample_run would draw it.
class ChainSource final : public ObservationSource {
 public:
  ChainSource(const Hmc& h, std::uint64_t seed) : hmc_(&h), engine_(seed), state_(h.initial()) {}
  std::optional<Symbol> next() override;

 private:
  const Hmc* hmc_;
  std::mt19937_64 engine_;
  StateId state_;
  bool started_ = false;
};

}  // namespace hmcdist
