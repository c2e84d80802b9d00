#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "loqs/fock.hpp"

namespace loqs {

struct ValueWithError {
  double value = 0.0;
  double sigma = 0.0;
};

/// Row-stochastic outcome matrix in the computational basis: rows are
/// inputs, columns outputs, both in the same bit-string order.
struct TruthTable {
  std::vector<std::string> labels;
  Eigen::MatrixXd probs;
  Eigen::MatrixXd sigmas;

  /// Builds the table from raw counts, normalizing each row and attaching
  /// multinomial standard errors.
  static TruthTable from_counts(
      const std::map<std::string, std::map<std::string, std::int64_t>>&
          counts);
};

/// Mean correct-output probability against an input -> output permutation.
ValueWithError truth_table_fidelity(
    const TruthTable& tt, const std::map<std::string, std::string>& ideal);

/// Fredkin permutation on (c, t1, t2) bit strings.
std::map<std::string, std::string> fredkin_truth_map();

/// Equatorial Bloch observable X cos(phi) + Y sin(phi).
Eigen::Matrix2cd s_operator(double phi);

/// Three-qubit witness operators: M0 = |010><010| + |101><101|; M1, M2, M3
/// are the signed S-operator products whose average is the coherence C.
MatrixXcd m_operator(int which);

/// Azimuths of the three analyzers (logical order) for M1..M3.
std::array<double, 3> m_setting_phis(int which);

/// Outcome signs of m_operator(which) in the analyzer convention where
/// outcome bit 0 is the +1 eigenstate of S(phi) (the measurement module's
/// axis_state(0)). Derived from the operators, not hand-coded.
std::array<double, 8> m_sign_pattern(int which);

struct SettingDistribution {
  std::map<std::string, double> probs;   // outcome bit string -> probability
  std::map<std::string, double> sigmas;  // optional, defaults to 0
};

struct CorrelationResult {
  ValueWithError m0, m1, m2, m3;
};

/// Parity-weighted sums over the four settings, keyed "m0".."m3". The
/// distributions must be normalized per setting.
CorrelationResult m_correlations(
    const std::map<std::string, SettingDistribution>& settings);

/// C = (M1 + M2 + M3)/3 with uncorrelated error propagation.
ValueWithError coherence_C(const CorrelationResult& corr);

/// Density-matrix route: C = 2 Re <010|rho|101>.
double coherence_from_rho(const MatrixXcd& rho);

enum class EntanglementClass {
  ConsistentWithSeparable,   // C <= 1/4
  RequiresBipartite,         // 1/4 < C <= 1/2
  RequiresGenuineTripartite  // C > 1/2
};

EntanglementClass entanglement_class(double c);
const char* entanglement_class_name(EntanglementClass cls);

/// F_GHZ = (M0 + C)/2.
ValueWithError ghz_fidelity(const ValueWithError& m0,
                            const ValueWithError& c);

/// F_process estimate (F_zzz + C)/2; valid under the assumption that
/// classical-operation errors do not increase the coherence.
ValueWithError process_fidelity_estimate(const ValueWithError& f_zzz,
                                         const ValueWithError& c);

/// <target|rho|target>; validates that rho is a density matrix.
double state_fidelity(const MatrixXcd& rho, const VectorXcd& target);

/// Wootters concurrence of a two-qubit density matrix.
double concurrence(const Eigen::Matrix4cd& rho);

/// P(X > threshold) for X ~ Normal(c, sigma^2).
double gaussian_confidence(double c, double sigma, double threshold);

/// Standard deviation of `statistic` over multinomial bootstrap replicas
/// of the given counts; the statistic receives resampled frequencies.
double bootstrap_sigma(
    const std::vector<std::int64_t>& counts,
    const std::function<double(const std::vector<double>&)>& statistic,
    int replicas, std::uint64_t seed);

/// Every reported figure of merit, with provenance.
struct MetricsReport {
  ValueWithError f_zzz, coherence, f_process, f_ghz;
  CorrelationResult correlations;
  EntanglementClass verdict = EntanglementClass::ConsistentWithSeparable;
  bool subtracted = false;
  int clamp_events = 0;

  std::string to_json() const;
  std::string to_text() const;
};

/// Assembles the report from a truth-table fidelity and the correlation
/// measurements, clamping fidelities into [0, 1] and counting clamps.
MetricsReport make_metrics_report(const ValueWithError& f_zzz,
                                  const CorrelationResult& corr,
                                  bool subtracted);

}  // namespace loqs
