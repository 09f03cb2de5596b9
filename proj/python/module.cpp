#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "hmcdist/distinguish.hpp"
#include "hmcdist/errors.hpp"
#include "hmcdist/harness.hpp"
#include "hmcdist/model.hpp"
#include "hmcdist/monitors.hpp"
#include "hmcdist/rv.hpp"
#include "hmcdist/stream.hpp"

namespace py = pybind11;
using namespace hmcdist;

namespace {

Word to_word(const Hmc& h, const std::vector<std::string>& symbols) {
  Word w;
  for (const auto& s : symbols) w.push_back(h.alphabet().at(s));
  return w;
}

std::vector<std::string> names(const Hmc& h, const Word& w) {
  std::vector<std::string> out;
  for (Symbol s : w) out.push_back(h.alphabet().name(s));
  return out;
}

py::object verdict(const Verdict& v) { return v.chain ? py::object(py::int_(*v.chain)) : py::object(py::none()); }

}  // namespace

PYBIND11_MODULE(_hmcdist, m) {
  m.doc() = "Exact distinguishability and monitoring of hidden Markov chains";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
  py::register_exception<GuardExceeded>(m, "GuardExceeded", base.ptr());
  py::register_exception<TruncatedStream>(m, "TruncatedStream", base.ptr());

  py::class_<Hmc>(m, "Hmc")
      .def_static("parse", &parse_hmc, py::arg("text"))
      .def_static(
          "load",
          [](const std::string& path) {
            Model model = load_model(path);
            if (auto* h = std::get_if<Hmc>(&model)) return *h;
            return std::get<ClassifiedHmc>(model).hmc();
          },
          py::arg("path"))
      .def_property_readonly("states", &Hmc::state_names)
      .def_property_readonly("alphabet", [](const Hmc& h) { return h.alphabet().names(); })
      .def_property_readonly("initial", [](const Hmc& h) { return h.state_name(h.initial()); })
      .def("transition",
           [](const Hmc& h, const std::string& s, const std::string& t) {
             auto a = h.find_state(s), b = h.find_state(t);
             if (!a || !b) throw ValidationError("unknown state");
             return to_string(h.transition(*a, *b));
           })
      .def("serialize", [](const Hmc& h) { return serialize(h); })
      .def(
          "sample",
          [](const Hmc& h, std::size_t length, std::uint64_t seed) { return names(h, sample_run(h, length, seed).symbols); },
          py::arg("length"), py::arg("seed") = 1)
      .def("__len__", &Hmc::size)
      .def("__eq__", &Hmc::operator==);

  py::class_<ClassifiedHmc>(m, "ClassifiedHmc")
      .def_static("parse", &parse_chmc, py::arg("text"))
      .def_static(
          "load",
          [](const std::string& path) {
            Model model = load_model(path);
            if (auto* c = std::get_if<ClassifiedHmc>(&model)) return *c;
            throw ValidationError(path + ": expected a chmc model");
          },
          py::arg("path"))
      .def_property_readonly("hmc", &ClassifiedHmc::hmc)
      .def("serialize", [](const ClassifiedHmc& c) { return serialize(c); });

  m.def("equivalent", [](const Hmc& a, const Hmc& b) { return equivalent(a, b); });

  m.def("check_disting", [](const Hmc& a, const Hmc& b) {
    const auto r = profile_constant(a, b);
    py::dict d;
    d["distinguishable"] = r.distinguishable;
    d["c"] = to_string(r.c);
    std::vector<std::string> words;
    for (const Word& w : r.testset.words) words.push_back(a.alphabet().format_word(w));
    d["test"] = words;
    return d;
  });

  m.def("refined_constant",
        [](const Hmc& a, const Hmc& b, std::uint64_t guard) { return to_string(refined_constant(a, b, guard)); },
        py::arg("h1"), py::arg("h2"), py::arg("guard") = std::uint64_t{1} << 16);

  m.def("plan_two_sided", [](const std::string& c, double eps, std::size_t mm) {
    return plan_two_sided(parse_rational(c), eps, mm).phases;
  });
  m.def("plan_one_sided", [](const std::string& c, const std::string& low, std::size_t mm) {
    return plan_one_sided(parse_rational(c), parse_rational(low), mm).phases;
  });

  m.def(
      "monitor_two_sided",
      [](const Hmc& a, const Hmc& b, const std::vector<std::string>& stream, std::uint64_t phases) {
        const Word w = to_word(a, stream);
        WordSource src(w);
        const Verdict v = run_m2(a, b, src, MonitorPlan{phases, a.size() + b.size(), Rat(0), 0.0});
        return py::make_tuple(verdict(v), v.observations);
      },
      py::arg("h1"), py::arg("h2"), py::arg("stream"), py::arg("phases"));

  m.def(
      "monitor_one_sided",
      [](const Hmc& a, const Hmc& b, const std::vector<std::string>& stream, const std::string& low) {
        const Word w = to_word(a, stream);
        WordSource src(w);
        const AlarmOutcome o = run_m1(a, b, src, parse_rational(low), a.size() + b.size());
        return format_alarm(o);
      },
      py::arg("h1"), py::arg("h2"), py::arg("stream"), py::arg("low") = "1/20");

  m.def("exact_verdict_measure", [](const Hmc& a, const Hmc& b, std::uint64_t phases, const std::string& mode) {
    const VerdictMeasure vm = exact_verdict_measure(a, b, phases, parse_monitor_kind(mode));
    py::dict d;
    std::vector<std::string> u1, u2;
    for (const Rat& r : vm.under1) u1.push_back(to_string(r));
    for (const Rat& r : vm.under2) u2.push_back(to_string(r));
    d["p1"] = u1;
    d["p2"] = u2;
    d["flip_violations"] = flip_violations(vm);
    return d;
  }, py::arg("h1"), py::arg("h2"), py::arg("phases"), py::arg("mode") = "two-sided");

  m.def("condition", [](const ClassifiedHmc& c) {
    const ConditionedPair p = condition(c);
    return py::make_tuple(p.bad, p.good);
  });
  m.def("decide_monitorable", [](const ClassifiedHmc& c) {
    const auto r = decide_monitorable(c);
    return py::make_tuple(r.monitorable, to_string(r.report.c));
  });
  m.def("combine", &combine);
}
