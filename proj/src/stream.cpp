#include "hmcdist/stream.hpp"

#include <string>

#include "hmcdist/errors.hpp"

namespace hmcdist {

std::optional<Symbol> WordSource::next() {
  if (pos_ >= word_->size()) return std::nullopt;
  return (*word_)[pos_++];
}

std::optional<Symbol> TextSource::next() {
  while (pending_.empty()) {
    std::string token;
    if (!(*in_ >> token)) return std::nullopt;
    if (auto s = alphabet_->find(token)) {
      pending_.push_back(*s);
      continue;
    }
    for (Symbol s : alphabet_->parse_word(token)) pending_.push_back(s);
  }
  const Symbol s = pending_.front();
  pending_.pop_front();
  return s;
}

std::optional<Symbol> ChainSource::next() {
  if (started_) {
    state_ = hmc_->step(state_, engine_());
  } else {
    started_ = true;
  }
  return hmc_->observation(state_);
}

}  // namespace hmcdist
