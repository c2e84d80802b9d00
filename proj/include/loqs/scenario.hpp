#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "loqs/circuits.hpp"
#include "loqs/measurement.hpp"
#include "loqs/metrics.hpp"
#include "loqs/sources.hpp"

namespace loqs {

/// One complete simulation job: circuit reference, source model, acquisition
/// parameters, and whether the single-source blocked-run subtraction is
/// applied. Serialized as JSON with a schema version; unknown fields are
/// rejected so config drift fails fast.
struct Scenario {
  int schema_version = 1;
  std::string name;
  std::string circuit = "cswap-simplified";  // built-in name or file path
  SourceConfig source;
  std::int64_t shots = 0;  // 0 = exact probabilities, no sampling
  std::uint64_t seed = 0;
  bool subtraction = true;

  std::string to_json() const;
  static Scenario from_json(const std::string& text);
  static Scenario load(const std::string& path);
};

struct ScenarioResult {
  Scenario scenario;
  MetricsReport report;
  TruthTable truth;
  /// Absolute coincidence probability per computational input (after
  /// subtraction); in exact ideal mode this is the gate success rate.
  std::map<std::string, double> success_per_input;
  std::vector<CountRecord> counts;  // raw sampled records (empty in exact mode)
  std::vector<std::string> warnings;

  std::string counts_csv() const;
  std::string to_json() const;
  std::string to_text() const;
};

/// Resolves a circuit reference: a built-in builder name ("cswap-simplified",
/// "cswap-full", "ppbs-cnot") with the config's component overrides applied,
/// or a path to a circuit JSON file. overlap < 1 widens the registry to two
/// internal modes.
CircuitSpec resolve_circuit(const std::string& ref, const SourceConfig& config);

/// Runs the full pipeline: computational-basis truth table plus the four
/// GHZ-coherence settings, with optional sampling and blocked-run
/// subtraction. Deterministic for a fixed scenario + seed.
ScenarioResult run_scenario(const Scenario& scenario);

struct SweepRow {
  double value = 0.0;
  ScenarioResult result;
};

/// Re-runs the scenario once per value of `parameter`, one of: "epsilon",
/// "overlap", "entangled_state_fidelity", "shots", or a component-override
/// key. Unknown parameters are rejected.
std::vector<SweepRow> sweep(const Scenario& base, const std::string& parameter,
                            const std::vector<double>& values, int jobs = 1);

std::string sweep_table_csv(const std::string& parameter,
                            const std::vector<SweepRow>& rows);

/// Fraction of four-fold coincidence probability that survives in the two
/// single-source blocked runs, for the GHZ input of the scenario's circuit.
double scenario_contamination(const Scenario& scenario);

/// Bisects epsilon until scenario_contamination hits `target`.
double calibrate_epsilon_for_contamination(const Scenario& base,
                                           double target);

std::vector<std::string> builtin_scenario_names();
Scenario builtin_scenario(const std::string& name);

struct ValidationReport {
  std::string text;
  bool ok = false;
};

/// Algebraic self-checks of every built-in circuit: logical-operator
/// distances, success probabilities, eigenstructure. Measured-component
/// perturbations are reported (distance > 0) but do not fail the report.
ValidationReport validate_builtins();

}  // namespace loqs
