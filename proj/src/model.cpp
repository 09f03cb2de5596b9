#include "hmcdist/model.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "hmcdist/errors.hpp"

namespace hmcdist {

// ---------------------------------------------------------------- Alphabet

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].empty()) throw ValidationError("empty observation symbol");
    if (!index_.emplace(symbols_[i], static_cast<Symbol>(i)).second) {
      throw ValidationError("duplicate observation symbol '" + symbols_[i] + "'");
    }
  }
}

std::optional<Symbol> Alphabet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Symbol Alphabet::at(std::string_view name) const {
  if (auto s = find(name)) return *s;
  throw ValidationError("unknown symbol '" + std::string(name) + "'");
}

Word Alphabet::parse_word(std::string_view text) const {
  Word word;
  std::istringstream in{std::string(text)};
  std::string token;
  const bool single_chars =
      std::all_of(symbols_.begin(), symbols_.end(), [](const std::string& s) { return s.size() == 1; });
  while (in >> token) {
    if (token == "ε") continue;
    if (auto s = find(token)) {
      word.push_back(*s);
    } else if (single_chars) {
      for (char ch : token) word.push_back(at(std::string_view(&ch, 1)));
    } else {
      throw ValidationError("unknown symbol '" + token + "'");
    }
  }
  return word;
}

std::string Alphabet::format_word(const Word& word) const {
  if (word.empty()) return "ε";
  const bool single_chars =
      std::all_of(symbols_.begin(), symbols_.end(), [](const std::string& s) { return s.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (!single_chars && i > 0) out += ' ';
    out += name(word[i]);
  }
  return out;
}

// ---------------------------------------------------------------- Hmc

namespace {

std::uint64_t threshold_of(const Rat& cumulative) {
  // floor(cumulative * 2^64), valid for cumulative in [0, 1).
  mpz_class scaled = cumulative.get_num();
  scaled <<= 64;
  scaled /= cumulative.get_den();
  return mpz_get_ui(scaled.get_mpz_t());
}

}  // namespace

Hmc::Hmc(std::vector<std::string> state_names, Alphabet alphabet, std::vector<Symbol> observations,
         StateId initial, std::vector<std::vector<Edge>> edges)
    : names_(std::move(state_names)),
      alphabet_(std::move(alphabet)),
      observations_(std::move(observations)),
      initial_(initial),
      edges_(std::move(edges)) {
  const std::size_t n = names_.size();
  if (n == 0) throw ValidationError("chain has no states");
  if (observations_.size() != n || edges_.size() != n) {
    throw ValidationError("state, observation and edge tables differ in size");
  }
  if (initial_ >= n) throw ValidationError("initial state out of range");
  for (StateId s = 0; s < n; ++s) {
    if (!name_index_.emplace(names_[s], s).second) {
      throw ValidationError("duplicate state '" + names_[s] + "'");
    }
    if (observations_[s] >= alphabet_.size()) {
      throw ValidationError("observation of state '" + names_[s] + "' is not in the alphabet");
    }
  }
  weights_.resize(n);
  thresholds_.resize(n);
  for (StateId s = 0; s < n; ++s) {
    if (edges_[s].empty()) throw ValidationError("state '" + names_[s] + "' has no outgoing edge");
    std::sort(edges_[s].begin(), edges_[s].end(), [](const Edge& a, const Edge& b) { return a.target < b.target; });
    Rat sum = 0;
    for (std::size_t k = 0; k < edges_[s].size(); ++k) {
      edges_[s][k].probability.canonicalize();
      const Edge& e = edges_[s][k];
      if (e.target >= n) throw ValidationError("edge target out of range");
      if (k > 0 && edges_[s][k - 1].target == e.target) {
        throw ValidationError("duplicate edge " + names_[s] + " -> " + names_[e.target]);
      }
      if (sgn(e.probability) <= 0 || e.probability > 1) {
        throw ValidationError("edge " + names_[s] + " -> " + names_[e.target] + " has probability " +
                              to_string(e.probability) + " outside (0,1]");
      }
      sum += e.probability;
      weights_[s].push_back(to_double(e.probability));
      thresholds_[s].push_back(k + 1 == edges_[s].size() ? std::numeric_limits<std::uint64_t>::max()
                                                         : threshold_of(sum));
    }
    if (sum != 1) {
      throw ValidationError("row not stochastic: outgoing probabilities of '" + names_[s] + "' sum to " +
                            to_string(sum));
    }
  }
}

std::optional<StateId> Hmc::find_state(std::string_view name) const {
  auto it = name_index_.find(std::string(name));
  if (it == name_index_.end()) return std::nullopt;
  return it->second;
}

Rat Hmc::transition(StateId from, StateId to) const {
  for (const Edge& e : edges_.at(from)) {
    if (e.target == to) return e.probability;
  }
  return Rat(0);
}

StateId Hmc::step(StateId s, std::uint64_t draw) const {
  const auto& th = thresholds_[s];
  for (std::size_t k = 0; k + 1 < th.size(); ++k) {
    if (draw < th[k]) return edges_[s][k].target;
  }
  return edges_[s].back().target;
}

Hmc Hmc::with_alphabet(const Alphabet& alphabet) const {
  std::vector<Symbol> obs(observations_.size());
  for (StateId s = 0; s < observations_.size(); ++s) {
    obs[s] = alphabet.at(alphabet_.name(observations_[s]));
  }
  return Hmc(names_, alphabet, std::move(obs), initial_, edges_);
}

bool Hmc::operator==(const Hmc& other) const {
  if (names_ != other.names_ || !(alphabet_ == other.alphabet_) || observations_ != other.observations_ ||
      initial_ != other.initial_) {
    return false;
  }
  for (StateId s = 0; s < edges_.size(); ++s) {
    if (edges_[s].size() != other.edges_[s].size()) return false;
    for (std::size_t k = 0; k < edges_[s].size(); ++k) {
      if (edges_[s][k].target != other.edges_[s][k].target ||
          edges_[s][k].probability != other.edges_[s][k].probability) {
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------- Dist

Dist Dist::point(std::size_t states, StateId s) {
  Dist d{RatVector(states)};
  d.weights.at(s) = 1;
  return d;
}

bool Dist::is_valid() const {
  Rat sum = 0;
  for (const Rat& w : weights) {
    if (sgn(w) < 0) return false;
    sum += w;
  }
  return sum == 1;
}

// ---------------------------------------------------------------- parsing

namespace {

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(line)};
  std::string t;
  while (in >> t) tokens.push_back(t);
  return tokens;
}

struct ParsedModel {
  bool classified = false;
  std::optional<Hmc> hmc;
  std::vector<bool> bad;
  std::vector<bool> good;
};

ParsedModel parse_any(std::string_view text) {
  ParsedModel result;
  std::optional<Alphabet> alphabet;
  std::vector<std::string> names;
  std::vector<std::string> obs_names;
  std::vector<std::size_t> obs_lines;
  std::unordered_map<std::string, StateId> index;
  std::optional<StateId> initial;
  struct RawEdge {
    std::string from, to;
    Rat probability;
    std::size_t line;
  };
  std::vector<RawEdge> raw_edges;
  std::vector<std::pair<std::string, std::size_t>> bad_names, good_names;
  bool have_header = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::string> tok = tokenize(line);
    if (tok.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (!have_header) {
      if (tok.size() != 1 || (tok[0] != "hmc" && tok[0] != "chmc")) {
        throw ParseError(line_no, "expected header 'hmc' or 'chmc'");
      }
      result.classified = tok[0] == "chmc";
      have_header = true;
      continue;
    }
    const std::string& kw = tok[0];
    if (kw == "alphabet:") {
      if (alphabet) throw ParseError(line_no, "duplicate alphabet line");
      if (tok.size() < 2) throw ParseError(line_no, "alphabet needs at least one symbol");
      try {
        alphabet = Alphabet(std::vector<std::string>(tok.begin() + 1, tok.end()));
      } catch (const ValidationError& e) {
        throw ParseError(line_no, e.what());
      }
    } else if (kw == "state") {
      if (tok.size() < 3 || tok.size() > 4 || tok[2].rfind("obs=", 0) != 0 || tok[2].size() == 4 ||
          (tok.size() == 4 && tok[3] != "init")) {
        throw ParseError(line_no, "expected 'state NAME obs=SYMBOL [init]'");
      }
      if (!index.emplace(tok[1], names.size()).second) {
        throw ParseError(line_no, "duplicate state '" + tok[1] + "'");
      }
      if (tok.size() == 4) {
        if (initial) throw ParseError(line_no, "more than one initial state");
        initial = names.size();
      }
      names.push_back(tok[1]);
      obs_names.push_back(tok[2].substr(4));
      obs_lines.push_back(line_no);
    } else if (kw == "edge") {
      if (tok.size() != 5 || tok[2] != "->") throw ParseError(line_no, "expected 'edge FROM -> TO PROBABILITY'");
      Rat p;
      try {
        p = parse_rational(tok[4]);
      } catch (const ValidationError& e) {
        throw ParseError(line_no, e.what());
      }
      raw_edges.push_back({tok[1], tok[3], p, line_no});
    } else if (kw == "bad:" || kw == "good:") {
      if (!result.classified) throw ParseError(line_no, "'" + kw + "' is only allowed in chmc files");
      auto& target = kw == "bad:" ? bad_names : good_names;
      for (std::size_t i = 1; i < tok.size(); ++i) target.push_back({tok[i], line_no});
    } else {
      throw ParseError(line_no, "unknown directive '" + kw + "'");
    }
  }
  if (!have_header) throw ParseError(line_no, "missing header 'hmc' or 'chmc'");
  if (!alphabet) throw ValidationError("missing alphabet line");
  if (names.empty()) throw ValidationError("model declares no states");
  if (!initial) throw ValidationError("no initial state (mark exactly one state with 'init')");

  std::vector<Symbol> obs(names.size());
  for (std::size_t s = 0; s < names.size(); ++s) {
    auto sym = alphabet->find(obs_names[s]);
    if (!sym) throw ValidationError("line " + std::to_string(obs_lines[s]) + ": unknown symbol '" + obs_names[s] + "'");
    obs[s] = *sym;
  }
  std::vector<std::vector<Edge>> edges(names.size());
  for (const RawEdge& e : raw_edges) {
    auto from = index.find(e.from);
    auto to = index.find(e.to);
    if (from == index.end()) throw ValidationError("line " + std::to_string(e.line) + ": unknown state '" + e.from + "'");
    if (to == index.end()) throw ValidationError("line " + std::to_string(e.line) + ": unknown state '" + e.to + "'");
    edges[from->second].push_back({to->second, e.probability});
  }
  result.hmc.emplace(std::move(names), std::move(*alphabet), std::move(obs), *initial, std::move(edges));
  if (result.classified) {
    const std::size_t n = result.hmc->size();
    result.bad.assign(n, false);
    result.good.assign(n, false);
    for (auto [list, flags] : {std::pair{&bad_names, &result.bad}, std::pair{&good_names, &result.good}}) {
      for (const auto& [name, line] : *list) {
        auto s = result.hmc->find_state(name);
        if (!s) throw ValidationError("line " + std::to_string(line) + ": unknown state '" + name + "'");
        (*flags)[*s] = true;
      }
    }
  }
  return result;
}

}  // namespace

Model parse_model(std::string_view text) {
  ParsedModel p = parse_any(text);
  if (p.classified) return ClassifiedHmc(std::move(*p.hmc), std::move(p.bad), std::move(p.good));
  return std::move(*p.hmc);
}

Hmc parse_hmc(std::string_view text) {
  ParsedModel p = parse_any(text);
  if (p.classified) throw ValidationError("expected an 'hmc' model, found 'chmc'");
  return std::move(*p.hmc);
}

ClassifiedHmc parse_chmc(std::string_view text) {
  ParsedModel p = parse_any(text);
  if (!p.classified) throw ValidationError("expected a 'chmc' model, found 'hmc'");
  return ClassifiedHmc(std::move(*p.hmc), std::move(p.bad), std::move(p.good));
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

namespace {

void write_body(std::ostream& out, const Hmc& h) {
  out << "alphabet:";
  for (const std::string& a : h.alphabet().names()) out << ' ' << a;
  out << '\n';
  for (StateId s = 0; s < h.size(); ++s) {
    out << "state " << h.state_name(s) << " obs=" << h.alphabet().name(h.observation(s));
    if (s == h.initial()) out << " init";
    out << '\n';
  }
  for (StateId s = 0; s < h.size(); ++s) {
    for (const Edge& e : h.successors(s)) {
      out << "edge " << h.state_name(s) << " -> " << h.state_name(e.target) << ' ' << to_string(e.probability)
          << '\n';
    }
  }
}

}  // namespace

std::string serialize(const Hmc& h) {
  std::ostringstream out;
  out << "hmc\n";
  write_body(out, h);
  return out.str();
}

std::string serialize(const ClassifiedHmc& c) {
  std::ostringstream out;
  out << "chmc\n";
  write_body(out, c.hmc());
  for (auto [label, flags] : {std::pair{"bad:", &c.bad()}, std::pair{"good:", &c.good()}}) {
    out << label;
    for (StateId s = 0; s < flags->size(); ++s) {
      if ((*flags)[s]) out << ' ' << c.hmc().state_name(s);
    }
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------- sampling

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Run sample_run(const Hmc& h, std::size_t length, std::uint64_t seed) {
  if (length == 0) throw PreconditionError("run length must be at least 1");
  std::mt19937_64 engine(seed);
  Run run;
  run.seed = seed;
  run.symbols.reserve(length);
  run.states.reserve(length);
  StateId s = h.initial();
  for (std::size_t i = 0; i < length; ++i) {
    if (i > 0) s = h.step(s, engine());
    run.states.push_back(s);
    run.symbols.push_back(h.observation(s));
  }
  return run;
}

// ---------------------------------------------------------------- product

void require_same_alphabet(const Hmc& h1, const Hmc& h2) {
  if (!(h1.alphabet() == h2.alphabet())) throw ValidationError("the two chains use different alphabets");
}

std::vector<std::pair<StateId, StateId>> product_reachable_pairs(const Hmc& h1, const Hmc& h2) {
  require_same_alphabet(h1, h2);
  std::set<std::pair<StateId, StateId>> seen;
  std::deque<std::pair<StateId, StateId>> queue;
  if (h1.observation(h1.initial()) == h2.observation(h2.initial())) {
    seen.insert({h1.initial(), h2.initial()});
    queue.push_back({h1.initial(), h2.initial()});
  }
  while (!queue.empty()) {
    auto [s1, s2] = queue.front();
    queue.pop_front();
    for (const Edge& e1 : h1.successors(s1)) {
      for (const Edge& e2 : h2.successors(s2)) {
        if (h1.observation(e1.target) != h2.observation(e2.target)) continue;
        if (seen.insert({e1.target, e2.target}).second) queue.push_back({e1.target, e2.target});
      }
    }
  }
  return {seen.begin(), seen.end()};
}

}  // namespace hmcdist
