#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "hmcdist/distinguish.hpp"
#include "hmcdist/errors.hpp"
#include "hmcdist/harness.hpp"
#include "hmcdist/model.hpp"
#include "hmcdist/monitors.hpp"
#include "hmcdist/rv.hpp"
#include "hmcdist/stream.hpp"
#include "json.hpp"

namespace hmcdist::cli {
namespace {

using nlohmann::json;

constexpr int kClean = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;

struct Options {
  bool json = false;
  std::vector<std::string> models;
  std::string model;
  std::string mode;
  std::string stream = "-";
  std::string config;
  std::string target = "both";
  std::string c;
  double eps = 0.1;
  std::string low = "0.05";
  std::uint64_t phases = 0;
  std::uint64_t horizon = 0;
  std::uint64_t guard = std::uint64_t{1} << 16;
  std::uint64_t seed = 1;
  std::size_t length = 0;
  std::size_t m = 0;
  std::size_t k = 2;
  unsigned threads = 0;
  bool states = false;
};

json envelope(const std::string& command) { return json{{"schema", kSchema}, {"command", command}}; }

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Hmc load_chain(const std::string& path) {
  Model model = load_model(path);
  if (auto* h = std::get_if<Hmc>(&model)) return std::move(*h);
  return std::get<ClassifiedHmc>(model).hmc();
}

ClassifiedHmc load_classified(const std::string& path) {
  Model model = load_model(path);
  if (auto* c = std::get_if<ClassifiedHmc>(&model)) return std::move(*c);
  throw ValidationError(path + ": expected a chmc model with bad/good labels");
}

// Reorders h's alphabet to match ref when both use the same symbols.
Hmc align(const Hmc& ref, const Hmc& h) {
  if (h.alphabet() == ref.alphabet()) return h;
  auto a = ref.alphabet().names();
  auto b = h.alphabet().names();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw ValidationError("models use different observation alphabets");
  return h.with_alphabet(ref.alphabet());
}

std::vector<Hmc> load_models(const std::vector<std::string>& paths) {
  std::vector<Hmc> out;
  for (const auto& p : paths) {
    Hmc h = load_chain(p);
    out.push_back(out.empty() ? std::move(h) : align(out.front(), h));
  }
  return out;
}

std::vector<Hmc> load_pair(const Options& o) {
  if (o.models.size() != 2) throw ValidationError("exactly two models are required");
  return load_models(o.models);
}

std::vector<std::string> word_names(const TestSet& ts, const Alphabet& a) {
  std::vector<std::string> out;
  for (const Word& w : ts.words) out.push_back(a.format_word(w));
  return out;
}

std::string bracket(const std::vector<std::string>& items) {
  std::string s = "[";
  for (std::size_t i = 0; i < items.size(); ++i) s += (i ? "," : "") + items[i];
  return s + "]";
}

void emit(const Options& o, std::ostream& out, const json& j, const std::string& text) {
  if (o.json) {
    out << j.dump(2) << "\n";
  } else {
    out << text;
  }
}

int cmd_check_equiv(const Options& o, std::ostream& out) {
  const auto hs = load_pair(o);
  const bool eq = equivalent(hs[0], hs[1]);
  json j = envelope("check-equiv");
  j["equivalent"] = eq;
  emit(o, out, j, eq ? "EQUIVALENT\n" : "NOT EQUIVALENT\n");
  return eq ? kClean : kNegative;
}

int cmd_check_disting(const Options& o, std::ostream& out) {
  const auto hs = load_pair(o);
  const DistinguishabilityReport r = profile_constant(hs[0], hs[1]);
  const auto words = word_names(r.testset, hs[0].alphabet());
  json j = envelope("check-disting");
  j["distinguishable"] = r.distinguishable;
  j["c"] = to_string(r.c);
  j["test"] = words;
  j["equivalent"] = equivalent(r.testset, Dist::point(hs[0].size(), hs[0].initial()),
                               Dist::point(hs[1].size(), hs[1].initial()));
  std::string text = r.distinguishable ? "DISTINGUISHABLE" : "NOT DISTINGUISHABLE";
  text += " c=" + to_string(r.c) + " TEST=" + bracket(words) + "\n";
  emit(o, out, j, text);
  return r.distinguishable ? kClean : kNegative;
}

int cmd_refine_c(const Options& o, std::ostream& out) {
  const auto hs = load_pair(o);
  const Rat c = refined_constant(hs[0], hs[1], o.guard);
  json j = envelope("refine-c");
  j["c"] = to_string(c);
  j["guard"] = o.guard;
  emit(o, out, j, "REFINED c=" + to_string(c) + "\n");
  return sgn(c) > 0 ? kClean : kNegative;
}

int not_distinguishable(const Options& o, std::ostream& out, const std::string& command) {
  json j = envelope(command);
  j["distinguishable"] = false;
  emit(o, out, j, "NOT DISTINGUISHABLE\n");
  return kNegative;
}

int cmd_plan(const Options& o, bool one_sided, std::ostream& out) {
  Rat c;
  std::size_t m = o.m;
  std::size_t k = o.k;
  if (!o.models.empty()) {
    if (o.models.size() < 2) throw ValidationError("plan needs at least two models");
    const auto hs = load_models(o.models);
    k = hs.size();
    std::size_t largest = 0;
    for (const Hmc& h : hs) largest = std::max(largest, h.size());
    if (k == 2) {
      const auto r = profile_constant(hs[0], hs[1]);
      if (!r.distinguishable) return not_distinguishable(o, out, "plan");
      c = r.c;
      if (m == 0) m = hs[0].size() + hs[1].size();
    } else {
      const auto reports = pairwise_reports(hs);
      for (const auto& r : reports) {
        if (!r.distinguishable) return not_distinguishable(o, out, "plan");
      }
      c = multi_constant(reports);
      if (m == 0) m = 2 * largest;
    }
  } else {
    if (o.c.empty() || m == 0) throw ValidationError("plan needs either models or both --c and --m");
    c = parse_rational(o.c);
  }
  json j = envelope("plan");
  j["c"] = to_string(c);
  j["m"] = m;
  std::string text;
  if (one_sided) {
    const Rat low = parse_rational(o.low);
    const MonitorPlan p = plan_one_sided(c, low, m);
    const double bound = expected_alarm_bound(c, to_double(low), m);
    j["monitor"] = "one-sided";
    j["low"] = to_string(low);
    j["n0"] = p.phases;
    j["horizon_phases"] = 10 * p.phases;
    j["alarm_bound"] = bound;
    text = "PLAN one-sided N0=" + std::to_string(p.phases) + " m=" + std::to_string(m) +
           " HORIZON=" + std::to_string(10 * p.phases) + " ALARM-BOUND=" + fixed(bound, 2) + " c=" + to_string(c) +
           "\n";
  } else {
    const MonitorPlan p = k > 2 ? plan_multi(c, o.eps, k, m) : plan_two_sided(c, o.eps, m);
    j["monitor"] = k > 2 ? "multi" : "two-sided";
    j["eps"] = o.eps;
    j["k"] = k;
    j["phases"] = p.phases;
    j["observations"] = p.observations();
    text = "PLAN N=" + std::to_string(p.phases) + " m=" + std::to_string(m) + " OBS=" +
           std::to_string(p.observations()) + " c=" + to_string(c) + "\n";
  }
  emit(o, out, j, text);
  return kClean;
}

json verdict_json(const Verdict& v) {
  json j;
  j["verdict"] = v.chain ? json(*v.chain) : json(nullptr);
  j["observations"] = v.observations;
  return j;
}

int cmd_monitor(const Options& o, std::istream& in, std::ostream& out) {
  const MonitorKind kind = parse_monitor_kind(o.mode);
  const auto hs = load_models(o.models);
  if (kind == MonitorKind::Multi ? hs.size() < 2 : hs.size() != 2) {
    throw ValidationError("monitor " + o.mode + " needs " + (kind == MonitorKind::Multi ? "at least" : "exactly") +
                          " two models");
  }
  std::ifstream file;
  std::istream* stream = &in;
  if (o.stream != "-") {
    file.open(o.stream);
    if (!file) throw ValidationError("cannot open stream " + o.stream);
    stream = &file;
  }
  TextSource source(*stream, hs[0].alphabet());

  json j = envelope("monitor");
  j["mode"] = o.mode;
  std::string text;
  if (kind == MonitorKind::Multi) {
    const auto reports = pairwise_reports(hs);
    for (const auto& r : reports) {
      if (!r.distinguishable) return not_distinguishable(o, out, "monitor");
    }
    std::size_t largest = 0;
    for (const Hmc& h : hs) largest = std::max(largest, h.size());
    MonitorPlan plan = plan_multi(multi_constant(reports), o.eps, hs.size(), 2 * largest);
    if (o.phases) plan.phases = o.phases;
    const Verdict v = run_multi(hs, reports, source, plan);
    j.update(verdict_json(v));
    j["phases"] = plan.phases;
    text = format_multi(v);
  } else {
    const std::size_t m = hs[0].size() + hs[1].size();
    std::optional<DistinguishabilityReport> report;
    if (kind != MonitorKind::TwoSided || !o.phases) {
      report = profile_constant(hs[0], hs[1]);
      if (!report->distinguishable) return not_distinguishable(o, out, "monitor");
      j["c"] = to_string(report->c);
    }
    if (kind == MonitorKind::OneSided) {
      const Rat low = parse_rational(o.low);
      std::optional<std::uint64_t> horizon;
      if (o.horizon) horizon = o.horizon;
      const AlarmOutcome a = run_m1(hs[0], hs[1], source, low, m, horizon);
      const char* names[] = {"alarm", "no-alarm", "impossible"};
      j["outcome"] = names[static_cast<int>(a.kind)];
      j["observations"] = a.observations;
      text = format_alarm(a);
    } else {
      MonitorPlan plan = o.phases ? MonitorPlan{o.phases, m, report ? report->c : Rat(0), o.eps}
                                  : plan_two_sided(report->c, o.eps, m);
      if (o.phases) plan.phases = o.phases;
      const Verdict v =
          kind == MonitorKind::TwoSided ? run_m2(hs[0], hs[1], source, plan) : run_m2prime(hs[0], hs[1], *report, source, plan);
      j.update(verdict_json(v));
      j["phases"] = plan.phases;
      text = format_pairwise(v);
    }
  }
  emit(o, out, j, text + "\n");
  return kClean;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const Hmc h = load_chain(o.model);
  const Run run = sample_run(h, o.length, o.seed);
  std::vector<std::string> symbols, states;
  for (Symbol s : run.symbols) symbols.push_back(h.alphabet().name(s));
  for (StateId s : run.states) states.push_back(h.state_name(s));
  json j = envelope("simulate");
  j["seed"] = o.seed;
  j["length"] = o.length;
  j["observations"] = symbols;
  j["states"] = states;
  std::string text = h.alphabet().format_word(run.symbols);
  if (run.symbols.empty()) text.clear();
  text += "\n";
  if (o.states) {
    for (std::size_t i = 0; i < states.size(); ++i) text += (i ? " " : "") + states[i];
    text += "\n";
  }
  emit(o, out, j, text);
  return kClean;
}

EvaluationConfig read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open config " + path);
  json cfg;
  try {
    cfg = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw ValidationError("config must be a JSON object");
  static const std::vector<std::string> known = {"monitor", "models", "eps", "low", "trials",
                                                 "seed", "phases", "horizon_phases", "threads"};
  for (const auto& [key, _] : cfg.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError("config: unknown key '" + key + "'");
    }
  }
  if (!cfg.contains("monitor") || !cfg.contains("models")) {
    throw ValidationError("config needs 'monitor' and 'models'");
  }
  try {
    EvaluationConfig c;
    c.kind = parse_monitor_kind(cfg["monitor"].get<std::string>());
    const auto base = std::filesystem::path(path).parent_path();
    std::vector<std::string> paths;
    for (const auto& p : cfg["models"]) {
      const std::filesystem::path mp(p.get<std::string>());
      paths.push_back((mp.is_absolute() ? mp : base / mp).string());
    }
    c.models = load_models(paths);
    if (cfg.contains("eps")) c.eps = cfg["eps"].get<double>();
    if (cfg.contains("low")) {
      const auto& low = cfg["low"];
      c.low = low.is_string() ? parse_rational(low.get<std::string>()) : rat_from_double(low.get<double>());
    }
    if (cfg.contains("trials")) c.trials = cfg["trials"].get<std::size_t>();
    if (cfg.contains("seed")) c.seed = cfg["seed"].get<std::uint64_t>();
    if (cfg.contains("phases")) c.phases = cfg["phases"].get<std::uint64_t>();
    if (cfg.contains("horizon_phases")) c.horizon_phases = cfg["horizon_phases"].get<std::uint64_t>();
    if (cfg.contains("threads")) c.threads = cfg["threads"].get<unsigned>();
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  EvaluationConfig cfg = read_config(o.config);
  if (o.threads) cfg.threads = o.threads;
  const ErrorReport r = estimate_error(cfg);
  json j = envelope("evaluate");
  j["monitor"] = to_string(r.kind);
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["c"] = to_string(r.c);
  j["phases"] = r.plan.phases;
  j["m"] = r.plan.m;
  j["target"] = r.target;
  j["bound"] = r.bound;
  j["sigma"] = r.sigma;
  if (r.kind == MonitorKind::OneSided) {
    j["horizon_phases"] = r.horizon_phases;
    j["response_bound"] = r.response_bound;
  }
  std::ostringstream text;
  text << "EVALUATE " << to_string(r.kind) << " trials=" << r.trials << " seed=" << r.seed << " c=" << to_string(r.c)
       << " N=" << r.plan.phases << " m=" << r.plan.m << " target=" << fixed(r.target) << " bound=" << fixed(r.bound)
       << "\n";
  for (const auto& s : r.sources) {
    json sj = {{"source", s.source},
               {"errors", s.errors},
               {"error_rate", s.error_rate},
               {"limit", s.limit},
               {"mean_observations", s.mean_observations},
               {"median_observations", s.median_observations},
               {"p95_observations", s.p95_observations},
               {"pass", s.pass}};
    if (r.kind == MonitorKind::OneSided) sj["alarms"] = s.alarms;
    j["sources"].push_back(sj);
    text << "SOURCE " << s.source << " errors=" << s.errors << " rate=" << fixed(s.error_rate)
         << " limit=" << fixed(s.limit) << " mean-obs=" << fixed(s.mean_observations, 1)
         << " median-obs=" << s.median_observations << " p95-obs=" << s.p95_observations
         << (s.pass ? " PASS" : " FAIL") << "\n";
  }
  j["pass"] = r.pass;
  text << (r.pass ? "PASS" : "FAIL") << "\n";
  emit(o, out, j, text.str());
  return r.pass ? kClean : kNegative;
}

int cmd_condition(const Options& o, std::ostream& out) {
  const ClassifiedHmc c = load_classified(o.model);
  const StateId init = c.hmc().initial();
  const Rat pb = reach_probabilities(c, Target::Bad)[init];
  const Rat pg = reach_probabilities(c, Target::Good)[init];
  json j = envelope("condition");
  j["p_bad"] = to_string(pb);
  j["p_good"] = to_string(pg);
  std::string text = "P(Bad)=" + to_string(pb) + " P(Good)=" + to_string(pg) + "\n";
  if (o.target != "bad" && o.target != "good" && o.target != "both") {
    throw ValidationError("--target must be bad, good or both");
  }
  if (o.target != "good") {
    const std::string s = serialize(condition_on(c, Target::Bad));
    j["bad"] = s;
    text += "# conditioned on Bad\n" + s;
  }
  if (o.target != "bad") {
    const std::string s = serialize(condition_on(c, Target::Good));
    j["good"] = s;
    text += "# conditioned on Good\n" + s;
  }
  emit(o, out, j, text);
  return kClean;
}

int cmd_monitorability(const Options& o, std::ostream& out) {
  const ClassifiedHmc c = load_classified(o.model);
  const MonitorabilityResult r = decide_monitorable(c);
  json j = envelope("monitorability");
  j["monitorable"] = r.monitorable;
  j["c"] = to_string(r.report.c);
  emit(o, out, j, std::string(r.monitorable ? "MONITORABLE" : "NOT MONITORABLE") + " c=" + to_string(r.report.c) + "\n");
  return r.monitorable ? kClean : kNegative;
}

int cmd_exact_measure(const Options& o, std::ostream& out) {
  const auto hs = load_pair(o);
  const MonitorKind kind = parse_monitor_kind(o.mode.empty() ? "two-sided" : o.mode);
  const VerdictMeasure vm = exact_verdict_measure(hs[0], hs[1], o.phases, kind);
  const std::size_t flips = flip_violations(vm);
  json j = envelope("exact-measure");
  j["mode"] = to_string(kind);
  j["phases"] = o.phases;
  j["words"] = vm.words.size();
  std::ostringstream text;
  text << "EXACT " << to_string(kind) << " N=" << o.phases << " WORDS=" << vm.words.size() << "\n";
  const std::array<const std::array<Rat, 3>*, 2> under = {&vm.under1, &vm.under2};
  for (std::size_t i = 0; i < 2; ++i) {
    json row = json::array();
    text << "P" << i + 1;
    for (std::size_t v = 0; v < 3; ++v) {
      row.push_back(to_string((*under[i])[v]));
      text << " OUTPUT" << v + 1 << "=" << to_string((*under[i])[v]);
    }
    text << "\n";
    j["p" + std::to_string(i + 1)] = row;
  }
  j["flip_violations"] = flips;
  text << "FLIP-VIOLATIONS=" << flips << "\n";
  emit(o, out, j, text.str());
  return kClean;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distinguishability and monitoring of hidden Markov chains", "hmcdist"};
  app.fallthrough();
  app.require_subcommand(1);
  Options o;
  app.add_flag("--json", o.json, "Print a single JSON object");

  auto* equiv = app.add_subcommand("check-equiv", "Equivalence of the initial distributions");
  equiv->add_option("models", o.models, "Two model files")->required()->expected(2);

  auto* disting = app.add_subcommand("check-disting", "Distinguishability verdict, constant c and test words");
  disting->add_option("models", o.models, "Two model files")->required()->expected(2);

  auto* refine = app.add_subcommand("refine-c", "Refined constant by enumeration of length-m events");
  refine->add_option("models", o.models, "Two model files")->required()->expected(2);
  refine->add_option("--guard", o.guard, "Enumeration guard")->capture_default_str();

  auto* plan = app.add_subcommand("plan", "Number of phases for a monitor");
  plan->add_option("models", o.models, "Model files (c and m are derived from them)");
  auto* plan_eps = plan->add_option("--eps", o.eps, "Error bound of the two-sided or multi monitor");
  auto* plan_low = plan->add_option("--low", o.low, "Threshold of the one-sided monitor");
  plan_eps->excludes(plan_low);
  plan->add_option("--c", o.c, "Distinguishability constant");
  plan->add_option("--m", o.m, "Observations per phase");
  plan->add_option("--k", o.k, "Number of models")->check(CLI::Range(2, 1 << 20));

  auto* monitor = app.add_subcommand("monitor", "Run a monitor on an observation stream");
  monitor->add_option("models", o.models, "Model files")->required();
  monitor->add_option("--mode", o.mode, "two-sided, walk, one-sided or multi")
      ->required()
      ->check(CLI::IsMember({"two-sided", "walk", "one-sided", "multi"}));
  monitor->add_option("--stream", o.stream, "Observation file, or - for stdin")->capture_default_str();
  monitor->add_option("--eps", o.eps, "Error bound")->capture_default_str();
  monitor->add_option("--low", o.low, "One-sided threshold")->capture_default_str();
  monitor->add_option("--phases", o.phases, "Override the planned number of phases");
  monitor->add_option("--horizon", o.horizon, "One-sided horizon in phases (default: until the stream ends)");

  auto* simulate = app.add_subcommand("simulate", "Sample an observation sequence");
  simulate->add_option("model", o.model, "Model file")->required();
  simulate->add_option("--len", o.length, "Number of observations")->required();
  simulate->add_option("--seed", o.seed, "Seed")->capture_default_str();
  simulate->add_flag("--states", o.states, "Also print the state sequence");

  auto* evaluate = app.add_subcommand("evaluate", "Monte-Carlo error estimate from a JSON config");
  evaluate->add_option("config", o.config, "Config file")->required();
  evaluate->add_option("--threads", o.threads, "Worker threads");

  auto* condition_cmd = app.add_subcommand("condition", "Condition a classified chain on Bad and Good");
  condition_cmd->add_option("model", o.model, "chmc file")->required();
  condition_cmd->add_option("--target", o.target, "bad, good or both")->capture_default_str();

  auto* monitorability = app.add_subcommand("monitorability", "Decide monitorability of a classified chain");
  monitorability->add_option("model", o.model, "chmc file")->required();

  auto* exact = app.add_subcommand("exact-measure", "Exact verdict probabilities by enumeration");
  exact->add_option("models", o.models, "Two model files")->required()->expected(2);
  exact->add_option("--phases", o.phases, "Number of phases")->required()->check(CLI::PositiveNumber);
  exact->add_option("--mode", o.mode, "two-sided or walk")->check(CLI::IsMember({"two-sided", "walk"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kClean;
    }
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (equiv->parsed()) return cmd_check_equiv(o, out);
    if (disting->parsed()) return cmd_check_disting(o, out);
    if (refine->parsed()) return cmd_refine_c(o, out);
    if (plan->parsed()) {
      if (plan_eps->count() == 0 && plan_low->count() == 0) throw ValidationError("plan needs --eps or --low");
      return cmd_plan(o, plan_low->count() > 0, out);
    }
    if (monitor->parsed()) return cmd_monitor(o, in, out);
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (evaluate->parsed()) return cmd_evaluate(o, out);
    if (condition_cmd->parsed()) return cmd_condition(o, out);
    if (monitorability->parsed()) return cmd_monitorability(o, out);
    if (exact->parsed()) return cmd_exact_measure(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace hmcdist::cli
