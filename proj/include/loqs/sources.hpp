#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "loqs/circuits.hpp"
#include "loqs/fock.hpp"

namespace loqs {

/// Knobs of the photon-source model: coherent multi-pair emission
/// amplitude, truncation order, internal-mode overlap between photons from
/// independent sources, entangled-pair preparation fidelity, and measured
/// component values forwarded to the circuit builders.
struct SourceConfig {
  double epsilon = 0.0;
  int n_max_pairs = 3;  // total pairs kept across both sources
  double overlap = 1.0;
  double entangled_state_fidelity = 1.0;
  std::map<std::string, double> component_overrides;

  void validate() const;
};

/// Input state plus truncation bookkeeping. `dropped_norm_estimate` is a
/// geometric-tail estimate of the squared norm removed by the pair-number
/// cutoff, relative to the kept (pre-normalization) norm.
struct SourceState {
  FockState state;
  double dropped_norm_estimate = 0.0;
  bool truncation_warning = false;
};

/// Exactly four photons: the encoded control pair and two target photons.
/// All amplitude vectors must be normalized.
SourceState ideal_input(const CircuitSpec& spec,
                        const Eigen::Vector2cd& control,
                        const Eigen::Vector2cd& t1, const Eigen::Vector2cd& t2);

/// Two-photon control-pair state with arbitrary polarization amplitudes,
/// ordered (|VV>, |VH>, |HV>, |HH>) over the encoding's two ports, in
/// product with the two target photons. Used for mixture simulation of the
/// imperfect entangled pair.
FockState control_pair_input(const CircuitSpec& spec,
                             const Eigen::Vector4cd& pair_amps,
                             const Eigen::Vector2cd& t1,
                             const Eigen::Vector2cd& t2);

/// Truncated coherent pair expansion of both SPDC processes: the entangled
/// source emits encoded control pairs, the single-photon source emits
/// (t1, t2) product pairs, each with amplitude epsilon per pair. Terms with
/// more than `n_max_pairs` total pairs (or beyond the registry photon cap)
/// are dropped and the state is renormalized.
SourceState spdc_multipair_state(const CircuitSpec& spec,
                                 const SourceConfig& config,
                                 const Eigen::Vector2cd& control,
                                 const Eigen::Vector2cd& t1,
                                 const Eigen::Vector2cd& t2);

/// Variant with an arbitrary control-pair polarization state (ordered as
/// in control_pair_input) and per-source blocking flags for the
/// subtracted-events correction: a blocked source emits nothing.
SourceState spdc_multipair_state(const CircuitSpec& spec,
                                 const SourceConfig& config,
                                 const Eigen::Vector4cd& control_pair,
                                 const Eigen::Vector2cd& t1,
                                 const Eigen::Vector2cd& t2,
                                 bool emit_entangled = true,
                                 bool emit_targets = true);

/// Unnormalized (na, nb)-pair emission sector of the truncated expansion:
/// epsilon^(na+nb) (S_a^na / na!)(S_b^nb / nb!) |vac>. Sectors occupy
/// disjoint port patterns, so their squared norms sum to the kept norm of
/// spdc_multipair_state before renormalization. Distinct emission events
/// are distinguishable in practice, so downstream probability models may
/// combine sectors incoherently.
FockState spdc_sector(const CircuitSpec& spec, const SourceConfig& config,
                      const Eigen::Vector4cd& control_pair,
                      const Eigen::Vector2cd& t1, const Eigen::Vector2cd& t2,
                      int na, int nb);

/// Rotates the internal label of every photon in `ports` from mode 0 into
/// s|0> + sqrt(1-s^2)|1>, modeling partial distinguishability against
/// photons that stay in mode 0. s = 1 is the identity; s < 1 requires a
/// registry with at least two internal modes.
FockState apply_distinguishability(const FockState& state,
                                   const std::vector<std::string>& ports,
                                   double s);

/// Fraction of four-fold-relevant probability carried by terms whose total
/// photon number differs from 4 (diagnostic for the multipair state).
double multipair_contamination(const FockState& state);

// ------------------------------------------------------- entangled pair

double werner_lambda(double fidelity_target);

/// lambda |psi><psi| + (1 - lambda) I/4 with the fidelity solved exactly.
Eigen::Matrix4cd werner_state(const Eigen::Vector4cd& psi,
                              double fidelity_target);

/// Werner mixture around (|00> + |11>)/sqrt(2).
Eigen::Matrix4cd imperfect_entangled_pair(double fidelity_target);

/// Concurrence of the Werner model at the given fidelity: max(0, 2F - 1).
double werner_concurrence(double fidelity_target);

/// Eigen-decomposition of a density matrix into (weight, pure state) pairs
/// with negligible weights dropped, for convex-mixture simulation.
std::vector<std::pair<double, Eigen::Vector4cd>> eigenmixture(
    const Eigen::Matrix4cd& rho, double weight_floor = 1e-12);

}  // namespace loqs
