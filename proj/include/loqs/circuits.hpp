#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loqs/elements.hpp"
#include "loqs/fock.hpp"

namespace loqs {

/// Fixed polarization projection applied at an output port before
/// coincidence analysis (e.g. the diagonal <P| projection).
struct PortProjection {
  std::string port;
  Eigen::Vector2cd jones;  // components on (H, V)
};

/// Fixed two-photon resource added to every logical input (e.g. an EPR
/// pair): c1 |a1>_A |b1>_B + c2 |a2>_A |b2>_B.
struct AncillaPair {
  std::string port_a, port_b;
  Eigen::Vector2cd a1, b1, a2, b2;
  cplx c1{0.0}, c2{0.0};
};

/// How a logical qubit is carried by the optics.
struct QubitEncoding {
  std::vector<std::string> ports;       // 1 port, or 2 for pair encoding
  Eigen::Vector2cd basis0{0.0, 1.0};    // Jones vector for |0>  (default V)
  Eigen::Vector2cd basis1{1.0, 0.0};    // Jones vector for |1>  (default H)
};

/// Declarative circuit: registered ports, ordered elements, IO roles.
struct CircuitSpec {
  std::string name;
  std::vector<std::string> ports;
  int n_internal = 1;
  int n_max = 6;
  std::vector<ElementSpec> elements;
  std::map<std::string, std::string> input_map;   // logical role -> port
  std::map<std::string, std::string> output_map;  // logical role -> port
  std::map<std::string, int> postselect;          // port -> required photons
  std::vector<PortProjection> projections;
  std::vector<QubitEncoding> input_qubits;   // logical order
  std::vector<QubitEncoding> output_qubits;  // logical order; single-port
  std::vector<AncillaPair> ancillae;

  RegistryPtr registry() const;  // memoized; shared across calls

  std::string to_json() const;
  static CircuitSpec from_json(const std::string& text);

 private:
  mutable RegistryPtr registry_;
};

struct CompiledCircuit {
  RegistryPtr registry;
  TransferMatrix total;
  size_t provenance = 0;  // hash of the serialized element list
};

CompiledCircuit compile(const CircuitSpec& spec);

/// Post-selected logical operator of a compiled circuit: M = sqrt(p) U.
struct LogicalOperator {
  MatrixXcd m;             // raw post-selected matrix
  double success = 0.0;    // p from the largest singular value
  MatrixXcd u;             // m / sqrt(p), phase-aligned to nothing
  bool rank_deficient = false;
};

/// Builds the Fock input for one logical basis state of `spec` and returns
/// it; pair-encoded qubits put one photon in each of their two ports.
FockState logical_basis_input(const CircuitSpec& spec, int basis_index);

/// Input for arbitrary logical qubit amplitudes (one 2-vector per qubit).
FockState logical_input(const CircuitSpec& spec,
                        const std::vector<Eigen::Vector2cd>& qubits);

/// Projects every photon at `port` onto the given Jones state (terms with
/// photons in the orthogonal polarization are dropped); the projected
/// photons stay in the port's H slot so coincidence counting still sees
/// them.
FockState project_port(const FockState& state, const std::string& port,
                       const Eigen::Vector2cd& jones);

LogicalOperator extract_logical_operator(const CircuitSpec& spec);

/// Distance min_phase ||e^{i phi} U - ideal||_F, the global-phase-free gap.
double operator_distance(const MatrixXcd& u, const MatrixXcd& ideal);

MatrixXcd fredkin_matrix();
MatrixXcd cnot_matrix();
MatrixXcd swap_matrix();

// ----------------------------------------------------------- constructions

CircuitSpec build_mach_zehnder(double phi);
CircuitSpec build_partial_swap(double phi);
CircuitSpec build_ppbs_cnot();

struct CswapOptions {
  // Measured reflectivities of the two PPBS components (ideal: R_H = 1/3,
  // R_V = 1). The second one acts in the polarization-flipped basis; the
  // builder wraps it in the required wave plates.
  double ppbs_a1_rh = 1.0 / 3.0, ppbs_a1_rv = 1.0;
  double ppbs_a2_rh = 1.0 / 3.0, ppbs_a2_rv = 1.0;
  // Wave plate on C2in mapping the |0> = |VV>, |1> = |HH> pair encoding
  // onto the |0> = |VH>, |1> = |HV> encoding the interferometer consumes.
  bool flip_c2 = true;
};

CircuitSpec build_cswap_simplified(const CswapOptions& opt = {});

/// Fig. 1C variant: single-photon control, EPR ancilla, parity-check
/// encoder. `encoder_minus` / `c2_minus` select the <M| branches of the
/// two diagonal measurements (with their feed-forward corrections applied
/// inside the circuit); summing all four branch probabilities reproduces
/// the quoted overall success rate.
CircuitSpec build_cswap_full(bool encoder_minus = false,
                             bool c2_minus = false);

}  // namespace loqs
