#include "loqs/sources.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace loqs {

namespace {

constexpr double kNormTol = 1e-9;

void check_normalized(const Eigen::Vector2cd& v, const char* name) {
  if (std::abs(v.squaredNorm() - 1.0) > kNormTol)
    throw std::invalid_argument(std::string(name) +
                                " amplitude vector is not normalized");
}

// A creation operator written out as a sum of mode monomials.
struct OperatorTerm {
  cplx coeff;
  std::vector<int> modes;
};
using CreationOp = std::vector<OperatorTerm>;

void append_jones(CreationOp& op, const RegistryPtr& reg,
                  const std::string& port, const Eigen::Vector2cd& jones,
                  cplx scale) {
  CreationOp next;
  for (const auto& t : op) {
    if (jones(0) != cplx(0)) {
      auto m = t.modes;
      m.push_back(reg->index(port, Pol::H, 0));
      next.push_back({t.coeff * scale * jones(0), std::move(m)});
    }
    if (jones(1) != cplx(0)) {
      auto m = t.modes;
      m.push_back(reg->index(port, Pol::V, 0));
      next.push_back({t.coeff * scale * jones(1), std::move(m)});
    }
  }
  op = std::move(next);
}

CreationOp pair_op(const RegistryPtr& reg, const std::string& port_a,
                   const Eigen::Vector2cd& ja, const std::string& port_b,
                   const Eigen::Vector2cd& jb, cplx coeff) {
  CreationOp op{{1.0, {}}};
  append_jones(op, reg, port_a, ja, coeff);
  append_jones(op, reg, port_b, jb, 1.0);
  return op;
}

FockState apply_op(const FockState& state, const CreationOp& op) {
  FockState out(state.registry());
  for (const auto& t : op)
    out = out.plus(state.apply_creation(t.modes).scaled(t.coeff));
  out.prune();
  return out;
}

const QubitEncoding& control_encoding(const CircuitSpec& spec) {
  if (spec.input_qubits.empty())
    throw std::invalid_argument("circuit declares no input qubits");
  const QubitEncoding& enc = spec.input_qubits.front();
  if (enc.ports.size() != 2)
    throw std::invalid_argument(
        "source model requires a pair-encoded control qubit");
  return enc;
}

const QubitEncoding& target_encoding(const CircuitSpec& spec, int which) {
  if (spec.input_qubits.size() != 3 ||
      spec.input_qubits[1].ports.size() != 1 ||
      spec.input_qubits[2].ports.size() != 1)
    throw std::invalid_argument(
        "source model requires two single-port target qubits");
  return spec.input_qubits[which];
}

Eigen::Vector2cd encoded_jones(const QubitEncoding& enc,
                               const Eigen::Vector2cd& amps) {
  return amps(0) * enc.basis0 + amps(1) * enc.basis1;
}

}  // namespace

void SourceConfig::validate() const {
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  if (n_max_pairs < 1) throw std::invalid_argument("n_max_pairs must be >= 1");
  if (overlap < 0.0 || overlap > 1.0)
    throw std::invalid_argument("overlap must be in [0, 1]");
  if (entangled_state_fidelity <= 0.25 || entangled_state_fidelity > 1.0)
    throw std::invalid_argument(
        "entangled_state_fidelity must be in (0.25, 1]");
}

SourceState ideal_input(const CircuitSpec& spec,
                        const Eigen::Vector2cd& control,
                        const Eigen::Vector2cd& t1,
                        const Eigen::Vector2cd& t2) {
  check_normalized(control, "control");
  check_normalized(t1, "t1");
  check_normalized(t2, "t2");
  return {logical_input(spec, {control, t1, t2}), 0.0, false};
}

FockState control_pair_input(const CircuitSpec& spec,
                             const Eigen::Vector4cd& pair_amps,
                             const Eigen::Vector2cd& t1,
                             const Eigen::Vector2cd& t2) {
  const QubitEncoding& enc = control_encoding(spec);
  const QubitEncoding& e1 = target_encoding(spec, 1);
  const QubitEncoding& e2 = target_encoding(spec, 2);
  RegistryPtr reg = spec.registry();
  const Eigen::Vector2cd pol[2] = {Eigen::Vector2cd(0, 1),   // |0> = V
                                   Eigen::Vector2cd(1, 0)};  // |1> = H
  FockState out(reg);
  for (int b = 0; b < 4; ++b) {
    cplx amp = pair_amps(b);
    if (amp == cplx(0)) continue;
    CreationOp op{{amp, {}}};
    append_jones(op, reg, enc.ports[0], pol[(b >> 1) & 1], 1.0);
    append_jones(op, reg, enc.ports[1], pol[b & 1], 1.0);
    append_jones(op, reg, e1.ports[0], encoded_jones(e1, t1), 1.0);
    append_jones(op, reg, e2.ports[0], encoded_jones(e2, t2), 1.0);
    out = out.plus(apply_op(FockState::vacuum(reg), op));
  }
  out.prune();
  return out;
}

namespace {

SourceState spdc_build(const RegistryPtr& reg, const SourceConfig& config,
                       const CreationOp& sa, const CreationOp& sb) {
  const int cap = std::min(config.n_max_pairs, reg->n_max() / 2);
  // Powers of each source operator applied to vacuum, with the 1/n!
  // coherent-expansion weights folded in.
  std::vector<FockState> apow{FockState::vacuum(reg)};
  std::vector<FockState> bpow{FockState::vacuum(reg)};
  for (int n = 1; n <= cap; ++n) {
    apow.push_back(apply_op(apow.back(), sa).scaled(1.0 / n));
    bpow.push_back(apply_op(bpow.back(), sb).scaled(1.0 / n));
  }

  FockState out(reg);
  std::vector<double> order_norm(cap + 1, 0.0);
  for (int k = 0; k <= cap; ++k) {
    FockState order(reg);
    for (int na = 0; na <= k; ++na) {
      // Product of the two independent emissions; B pairs never share
      // modes with A pairs, so the product is a term-by-term merge.
      const FockState& a = apow[na];
      const FockState& b = bpow[k - na];
      for (const auto& [occ_a, amp_a] : a.terms())
        for (const auto& [occ_b, amp_b] : b.terms()) {
          Occupation occ = occ_a;
          for (size_t i = 0; i < occ.size(); ++i) occ[i] += occ_b[i];
          order.add_term(occ, amp_a * amp_b);
        }
    }
    order = order.scaled(std::pow(config.epsilon, k));
    order_norm[k] = order.norm_sq();
    out = out.plus(order);
  }

  double kept = out.norm_sq();
  if (kept <= 0.0) throw std::logic_error("empty multipair expansion");
  // Geometric-tail estimate of the dropped orders.
  double dropped = 0.0;
  if (cap >= 1 && order_norm[cap - 1] > 0.0 && order_norm[cap] > 0.0) {
    double r = order_norm[cap] / order_norm[cap - 1];
    if (r < 1.0) dropped = order_norm[cap] * r / (1.0 - r);
    else dropped = kept;  // expansion not converging at this order
  }
  out = out.scaled(1.0 / std::sqrt(kept));
  out.prune();
  double rel = dropped / kept;
  return {out, rel, rel > 1e-6};
}

}  // namespace

SourceState spdc_multipair_state(const CircuitSpec& spec,
                                 const SourceConfig& config,
                                 const Eigen::Vector2cd& control,
                                 const Eigen::Vector2cd& t1,
                                 const Eigen::Vector2cd& t2) {
  config.validate();
  check_normalized(control, "control");
  check_normalized(t1, "t1");
  check_normalized(t2, "t2");
  const QubitEncoding& enc = control_encoding(spec);
  const QubitEncoding& e1 = target_encoding(spec, 1);
  const QubitEncoding& e2 = target_encoding(spec, 2);
  RegistryPtr reg = spec.registry();
  // Pair creation operators of the two SPDC processes, with the logical
  // amplitudes mapped through each qubit's encoding.
  CreationOp sa = pair_op(reg, enc.ports[0], enc.basis0, enc.ports[1],
                          enc.basis0, control(0));
  CreationOp sa1 = pair_op(reg, enc.ports[0], enc.basis1, enc.ports[1],
                           enc.basis1, control(1));
  sa.insert(sa.end(), sa1.begin(), sa1.end());
  CreationOp sb = pair_op(reg, e1.ports[0], encoded_jones(e1, t1),
                          e2.ports[0], encoded_jones(e2, t2), 1.0);
  return spdc_build(reg, config, sa, sb);
}

namespace {

CreationOp entangled_pair_op(const CircuitSpec& spec,
                             const Eigen::Vector4cd& control_pair) {
  const QubitEncoding& enc = control_encoding(spec);
  RegistryPtr reg = spec.registry();
  const Eigen::Vector2cd pol[2] = {Eigen::Vector2cd(0, 1),   // V
                                   Eigen::Vector2cd(1, 0)};  // H
  CreationOp op;
  for (int b = 0; b < 4; ++b) {
    if (control_pair(b) == cplx(0)) continue;
    CreationOp term = pair_op(reg, enc.ports[0], pol[(b >> 1) & 1],
                              enc.ports[1], pol[b & 1], control_pair(b));
    op.insert(op.end(), term.begin(), term.end());
  }
  return op;
}

CreationOp target_pair_op(const CircuitSpec& spec, const Eigen::Vector2cd& t1,
                          const Eigen::Vector2cd& t2) {
  const QubitEncoding& e1 = target_encoding(spec, 1);
  const QubitEncoding& e2 = target_encoding(spec, 2);
  return pair_op(spec.registry(), e1.ports[0], encoded_jones(e1, t1),
                 e2.ports[0], encoded_jones(e2, t2), 1.0);
}

}  // namespace

SourceState spdc_multipair_state(const CircuitSpec& spec,
                                 const SourceConfig& config,
                                 const Eigen::Vector4cd& control_pair,
                                 const Eigen::Vector2cd& t1,
                                 const Eigen::Vector2cd& t2,
                                 bool emit_entangled, bool emit_targets) {
  config.validate();
  check_normalized(t1, "t1");
  check_normalized(t2, "t2");
  CreationOp sa, sb;
  if (emit_entangled) sa = entangled_pair_op(spec, control_pair);
  if (emit_targets) sb = target_pair_op(spec, t1, t2);
  return spdc_build(spec.registry(), config, sa, sb);
}

FockState spdc_sector(const CircuitSpec& spec, const SourceConfig& config,
                      const Eigen::Vector4cd& control_pair,
                      const Eigen::Vector2cd& t1, const Eigen::Vector2cd& t2,
                      int na, int nb) {
  config.validate();
  check_normalized(t1, "t1");
  check_normalized(t2, "t2");
  RegistryPtr reg = spec.registry();
  const int cap = std::min(config.n_max_pairs, reg->n_max() / 2);
  if (na < 0 || nb < 0 || na + nb > cap)
    throw std::invalid_argument("sector outside the truncated expansion");
  FockState out = FockState::vacuum(reg);
  if (na > 0) {
    CreationOp sa = entangled_pair_op(spec, control_pair);
    for (int n = 1; n <= na; ++n) out = apply_op(out, sa).scaled(1.0 / n);
  }
  if (nb > 0) {
    CreationOp sb = target_pair_op(spec, t1, t2);
    for (int n = 1; n <= nb; ++n) out = apply_op(out, sb).scaled(1.0 / n);
  }
  out = out.scaled(std::pow(config.epsilon, na + nb));
  out.prune();
  return out;
}

FockState apply_distinguishability(const FockState& state,
                                   const std::vector<std::string>& ports,
                                   double s) {
  if (s < 0.0 || s > 1.0)
    throw std::invalid_argument("overlap must be in [0, 1]");
  if (s == 1.0) return state;
  const RegistryPtr& reg = state.registry();
  if (reg->n_internal() < 2)
    throw std::invalid_argument(
        "partial distinguishability needs >= 2 internal modes");
  MatrixXcd u = MatrixXcd::Identity(reg->size(), reg->size());
  double c = std::sqrt(1.0 - s * s);
  for (const std::string& port : ports)
    for (Pol p : {Pol::H, Pol::V}) {
      int i0 = reg->index(port, p, 0), i1 = reg->index(port, p, 1);
      u(i0, i0) = s;
      u(i1, i0) = c;
      u(i0, i1) = -c;
      u(i1, i1) = s;
    }
  return evolve(state, TransferMatrix::checked(std::move(u)));
}

double multipair_contamination(const FockState& state) {
  double four = 0.0, other = 0.0;
  for (const auto& [occ, amp] : state.terms()) {
    double w = std::norm(amp);
    if (total_photons(occ) == 4) four += w;
    else other += w;
  }
  double tot = four + other;
  return tot > 0.0 ? other / tot : 0.0;
}

double werner_lambda(double fidelity_target) {
  if (fidelity_target <= 0.25 || fidelity_target > 1.0)
    throw std::invalid_argument("fidelity target must be in (0.25, 1]");
  return (4.0 * fidelity_target - 1.0) / 3.0;
}

Eigen::Matrix4cd werner_state(const Eigen::Vector4cd& psi,
                              double fidelity_target) {
  double lambda = werner_lambda(fidelity_target);
  return lambda * (psi * psi.adjoint()) +
         (1.0 - lambda) / 4.0 * Eigen::Matrix4cd::Identity();
}

Eigen::Matrix4cd imperfect_entangled_pair(double fidelity_target) {
  Eigen::Vector4cd phi_plus;
  phi_plus << std::sqrt(0.5), 0, 0, std::sqrt(0.5);
  return werner_state(phi_plus, fidelity_target);
}

double werner_concurrence(double fidelity_target) {
  return std::max(0.0, 2.0 * fidelity_target - 1.0);
}

std::vector<std::pair<double, Eigen::Vector4cd>> eigenmixture(
    const Eigen::Matrix4cd& rho, double weight_floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
  std::vector<std::pair<double, Eigen::Vector4cd>> out;
  for (int i = 0; i < 4; ++i) {
    double w = es.eigenvalues()(i);
    if (w > weight_floor) out.push_back({w, es.eigenvectors().col(i)});
  }
  return out;
}

}  // namespace loqs
