// Python bindings. Structured results cross the boundary as JSON text; the
// package wrapper decodes them.

#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rbocoop/bounds.hpp"
#include "rbocoop/config.hpp"
#include "rbocoop/error.hpp"
#include "rbocoop/rbocpd.hpp"
#include "rbocoop/trace_io.hpp"

namespace py = pybind11;
using namespace rbocoop;

namespace {

ExperimentConfig parse_config(const std::string& text) { return experiment_from_json(parse_json_text(text)); }

py::dict run_policy(const std::string& config_text, const std::string& policy, std::optional<int> replications,
                    std::optional<std::uint64_t> seed, unsigned jobs) {
  ExperimentConfig cfg = parse_config(config_text);
  if (replications) cfg.replications = *replications;
  if (seed) cfg.seed = *seed;
  const PolicyKind kind = parse_policy_kind(policy);
  ReplicationResult res;
  {
    py::gil_scoped_release release;
    res = replicate(cfg.run_config(kind), jobs);
  }
  std::ostringstream trace, events, regret;
  write_trace_csv(trace, res.traces);
  write_events_csv(events, res.traces);
  write_regret_csv(regret, res);
  py::dict out;
  out["summary"] = summary_json({res}, cfg.to_json()).dump();
  out["trace_csv"] = trace.str();
  out["events_csv"] = events.str();
  out["regret_csv"] = regret.str();
  return out;
}

}  // namespace

PYBIND11_MODULE(_rbocoop, m) {
  m.doc() = "Cooperative piecewise-stationary bandits with restarted Bayesian change detection";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.attr("TRACE_SCHEMA_VERSION") = kTraceSchemaVersion;

  m.def("list_presets", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& p : list_presets()) out.emplace_back(p.name, p.description);
    return out;
  });
  m.def("preset_text", &preset_text, py::arg("name"));
  m.def("validate", [](const std::string& text) { return validate_experiment(parse_config(text)); }, py::arg("config"));
  m.def("policy_names", [] {
    std::vector<std::string> out;
    for (PolicyKind k : all_policy_kinds()) out.push_back(to_string(k));
    return out;
  });
  m.def("run_policy", &run_policy, py::arg("config"), py::arg("policy"), py::arg("replications") = py::none(),
        py::arg("seed") = py::none(), py::arg("jobs") = 1u);

  m.def("coop_false_alarm", &coop_false_alarm, py::arg("degree"), py::arg("delta"));
  m.def("confidence_radius", &confidence_radius, py::arg("n1"), py::arg("n2"), py::arg("n_total"), py::arg("delta"));
  m.def(
      "detection_delay",
      [](double gap, std::int64_t n_before, double delta, double eta) -> std::optional<std::int64_t> {
        const auto r = detection_delay(gap, n_before, delta, HazardSchedule::constant(eta));
        if (!r.found()) return std::nullopt;
        return r.delay;
      },
      py::arg("gap"), py::arg("n_before"), py::arg("delta"), py::arg("eta"));

  py::class_<ForecasterBank>(m, "ForecasterBank")
      .def(py::init([](double eta) { return ForecasterBank(HazardSchedule::constant(eta)); }), py::arg("eta"))
      .def("ingest", &ForecasterBank::ingest, py::arg("x"))
      .def("restart_check", &ForecasterBank::restart_check)
      .def("reset", py::overload_cast<>(&ForecasterBank::reset))
      .def("log_weights", [](const ForecasterBank& b) {
        return std::vector<double>(b.log_weights().begin(), b.log_weights().end());
      })
      .def("normalized_weights", &ForecasterBank::normalized_weights)
      .def("__len__", &ForecasterBank::size);

  m.def(
      "run_offline",
      [](const std::vector<double>& xs, double eta) { return run_offline(xs, HazardSchedule::constant(eta)); },
      py::arg("xs"), py::arg("eta"));
}
