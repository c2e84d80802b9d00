#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "loqs/circuits.hpp"
#include "loqs/fock.hpp"

namespace loqs {

/// Polarization analyzer at one port, measuring along the Bloch axis with
/// polar angle theta and azimuth phi (|0> = V at the north pole).
struct AnalyzerSetting {
  std::string port;
  double theta = 0.0;
  double phi = 0.0;

  /// Jones vector of the outcome-`bit` projector (0 = +axis, 1 = -axis).
  Eigen::Vector2cd axis_state(int bit) const;
};

/// Required photon count per output port for a coincidence event.
struct CoincidencePattern {
  std::map<std::string, int> required;
};

/// One counted outcome of one analyzer setting, with acquisition metadata.
struct CountRecord {
  std::string setting_id;
  std::string outcome;
  std::int64_t count = 0;
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
};

struct OutcomeProbabilities {
  std::map<std::string, double> probs;  // outcome bit string -> probability
  double ambiguous = 0.0;  // pattern-satisfying mass split across both arms
  bool no_photons = false;  // pattern demand exceeded the state's content
};

/// Joint probability of every analyzer outcome combination together with
/// pattern satisfaction. Probabilities are absolute (they include the
/// post-selection success factor). Outcome strings follow the order of
/// `settings`. Fixed projections (e.g. the diagonal ancilla projection)
/// are applied before counting.
OutcomeProbabilities outcome_probabilities(
    const FockState& state, const CoincidencePattern& pattern,
    const std::vector<AnalyzerSetting>& settings,
    const std::vector<PortProjection>& projections = {});

struct ConditionalState {
  MatrixXcd rho;            // density matrix on the remaining logical qubits
  double probability = 0.0; // mass of the projection branch
  bool zero_branch = false;
};

/// Applies the spec's projections and coincidence post-selection to an
/// evolved output state and returns the normalized logical density matrix
/// on the spec's output qubits, tracing out internal labels.
ConditionalState conditional_logical_state(const CircuitSpec& spec,
                                           const FockState& output_state);

/// Deterministic multinomial sampling; the RNG stream is derived from the
/// (seed, setting_id) pair so per-setting sampling is order-independent.
std::vector<CountRecord> sample_counts(
    const std::string& setting_id,
    const std::map<std::string, double>& probabilities, std::int64_t shots,
    std::uint64_t seed);

struct SubtractionResult {
  std::vector<CountRecord> counts;
  std::int64_t floored_mass = 0;  // total counts clipped at zero
  int floored_outcomes = 0;
};

/// Blocked-run correction: total minus the two single-source blocked runs,
/// floored at zero per outcome. Settings and outcomes must line up.
SubtractionResult subtract_single_source_events(
    const std::vector<CountRecord>& total,
    const std::vector<CountRecord>& blocked_a,
    const std::vector<CountRecord>& blocked_b);

/// Row-normalizes count maps (input -> outcome -> count); throws naming
/// the offending input if a row has zero total.
std::map<std::string, std::map<std::string, double>> normalize_per_input(
    const std::map<std::string, std::map<std::string, std::int64_t>>& counts);

std::string count_records_to_csv(const std::vector<CountRecord>& records);
std::vector<CountRecord> count_records_from_csv(const std::string& text);

}  // namespace loqs
