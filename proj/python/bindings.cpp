// Python bindings for the scenario runner and the analysis helpers most
// useful from notebooks; the full Fock machinery stays C++-only.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "loqs/circuits.hpp"
#include "loqs/metrics.hpp"
#include "loqs/scenario.hpp"
#include "loqs/sources.hpp"
#include "loqs/tomography.hpp"

namespace py = pybind11;
using namespace loqs;

PYBIND11_MODULE(_loqs, m) {
  m.doc() = "linear-optics gate simulator and analysis toolkit";

  py::class_<ValueWithError>(m, "ValueWithError")
      .def(py::init<>())
      .def_readwrite("value", &ValueWithError::value)
      .def_readwrite("sigma", &ValueWithError::sigma)
      .def("__repr__", [](const ValueWithError& v) {
        return "ValueWithError(" + std::to_string(v.value) + ", " +
               std::to_string(v.sigma) + ")";
      });

  py::enum_<EntanglementClass>(m, "EntanglementClass")
      .value("ConsistentWithSeparable",
             EntanglementClass::ConsistentWithSeparable)
      .value("RequiresBipartite", EntanglementClass::RequiresBipartite)
      .value("RequiresGenuineTripartite",
             EntanglementClass::RequiresGenuineTripartite);

  py::class_<CorrelationResult>(m, "CorrelationResult")
      .def(py::init<>())
      .def_readwrite("m0", &CorrelationResult::m0)
      .def_readwrite("m1", &CorrelationResult::m1)
      .def_readwrite("m2", &CorrelationResult::m2)
      .def_readwrite("m3", &CorrelationResult::m3);

  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("f_zzz", &MetricsReport::f_zzz)
      .def_readonly("coherence", &MetricsReport::coherence)
      .def_readonly("f_process", &MetricsReport::f_process)
      .def_readonly("f_ghz", &MetricsReport::f_ghz)
      .def_readonly("correlations", &MetricsReport::correlations)
      .def_readonly("verdict", &MetricsReport::verdict)
      .def_readonly("subtracted", &MetricsReport::subtracted)
      .def_readonly("clamp_events", &MetricsReport::clamp_events)
      .def("to_json", &MetricsReport::to_json)
      .def("to_text", &MetricsReport::to_text);

  py::class_<TruthTable>(m, "TruthTable")
      .def_readonly("labels", &TruthTable::labels)
      .def_readonly("probs", &TruthTable::probs)
      .def_readonly("sigmas", &TruthTable::sigmas);

  py::class_<SourceConfig>(m, "SourceConfig")
      .def(py::init<>())
      .def_readwrite("epsilon", &SourceConfig::epsilon)
      .def_readwrite("n_max_pairs", &SourceConfig::n_max_pairs)
      .def_readwrite("overlap", &SourceConfig::overlap)
      .def_readwrite("entangled_state_fidelity",
                     &SourceConfig::entangled_state_fidelity)
      .def_readwrite("component_overrides",
                     &SourceConfig::component_overrides);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("schema_version", &Scenario::schema_version)
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("circuit", &Scenario::circuit)
      .def_readwrite("source", &Scenario::source)
      .def_readwrite("shots", &Scenario::shots)
      .def_readwrite("seed", &Scenario::seed)
      .def_readwrite("subtraction", &Scenario::subtraction)
      .def("to_json", &Scenario::to_json)
      .def_static("from_json", &Scenario::from_json)
      .def_static("load", &Scenario::load);

  py::class_<ScenarioResult>(m, "ScenarioResult")
      .def_readonly("scenario", &ScenarioResult::scenario)
      .def_readonly("report", &ScenarioResult::report)
      .def_readonly("truth", &ScenarioResult::truth)
      .def_readonly("success_per_input", &ScenarioResult::success_per_input)
      .def_readonly("warnings", &ScenarioResult::warnings)
      .def("counts_csv", &ScenarioResult::counts_csv)
      .def("to_json", &ScenarioResult::to_json)
      .def("to_text", &ScenarioResult::to_text);

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("value", &SweepRow::value)
      .def_readonly("result", &SweepRow::result);

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("text", &ValidationReport::text)
      .def_readonly("ok", &ValidationReport::ok);

  m.def("run_scenario", &run_scenario, py::arg("scenario"),
        py::call_guard<py::gil_scoped_release>());
  m.def("sweep", &sweep, py::arg("base"), py::arg("parameter"),
        py::arg("values"), py::arg("jobs") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("sweep_table_csv", &sweep_table_csv);
  m.def("builtin_scenario_names", &builtin_scenario_names);
  m.def("builtin_scenario", &builtin_scenario);
  m.def("validate_builtins", &validate_builtins);
  m.def("scenario_contamination", &scenario_contamination);
  m.def("calibrate_epsilon_for_contamination",
        &calibrate_epsilon_for_contamination, py::arg("base"),
        py::arg("target"));

  py::class_<LogicalOperator>(m, "LogicalOperator")
      .def_readonly("m", &LogicalOperator::m)
      .def_readonly("success", &LogicalOperator::success)
      .def_readonly("u", &LogicalOperator::u)
      .def_readonly("rank_deficient", &LogicalOperator::rank_deficient);
  m.def("logical_operator", [](const std::string& ref) {
    return extract_logical_operator(resolve_circuit(ref, SourceConfig{}));
  });
  m.def("operator_distance", &operator_distance);
  m.def("fredkin_matrix", &fredkin_matrix);
  m.def("cnot_matrix", &cnot_matrix);

  m.def("gaussian_confidence", &gaussian_confidence, py::arg("c"),
        py::arg("sigma"), py::arg("threshold"));
  m.def("m_operator", &m_operator);
  m.def("entanglement_class", &entanglement_class);
  m.def("entanglement_class_name", &entanglement_class_name);

  py::class_<TomographyDataset>(m, "TomographyDataset")
      .def_readonly("frequencies", &TomographyDataset::frequencies)
      .def_readonly("shots", &TomographyDataset::shots)
      .def_readonly("seed", &TomographyDataset::seed);
  m.def("imperfect_entangled_pair", &imperfect_entangled_pair);
  m.def("werner_concurrence", &werner_concurrence);
  m.def("simulate_tomography", &simulate_tomography, py::arg("rho"),
        py::arg("shots"), py::arg("seed"));
  m.def("reconstruct_linear", &reconstruct_linear);
  m.def("reconstruct_ml", &reconstruct_ml, py::arg("data"),
        py::arg("iterations") = 200);
  m.def("project_psd", &project_psd);
  m.def("min_eigenvalue", &min_eigenvalue);
  m.def("state_fidelity", &state_fidelity);
  m.def("concurrence", &concurrence);
}
