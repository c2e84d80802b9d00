#include "loqs/measurement.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace loqs {

namespace {

// Port-local unitary sending `slot_h` to the H slot and `slot_v` to V.
void rotate_port_block(MatrixXcd& u, const RegistryPtr& reg,
                       const std::string& port,
                       const Eigen::Vector2cd& slot_h,
                       const Eigen::Vector2cd& slot_v) {
  for (int l = 0; l < reg->n_internal(); ++l) {
    int ih = reg->index(port, Pol::H, l), iv = reg->index(port, Pol::V, l);
    u(ih, ih) = std::conj(slot_h(0));
    u(ih, iv) = std::conj(slot_h(1));
    u(iv, ih) = std::conj(slot_v(0));
    u(iv, iv) = std::conj(slot_v(1));
  }
}

bool pattern_satisfied(const RegistryPtr& reg, const Occupation& occ,
                       const CoincidencePattern& pattern) {
  for (const auto& [port, n] : pattern.required) {
    int got = 0;
    for (int m : reg->port_modes(port)) got += occ[m];
    if (got != n) return false;
  }
  return true;
}

std::uint64_t mix_seed(std::uint64_t seed, const std::string& setting_id) {
  std::uint64_t h = 1469598103934665603ull ^ seed;
  for (char c : setting_id) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

Eigen::Vector2cd AnalyzerSetting::axis_state(int bit) const {
  double c = std::cos(theta / 2), s = std::sin(theta / 2);
  cplx e = std::exp(cplx(0, phi));
  // |0> = V at the north pole; Jones components ordered (H, V).
  if (bit == 0) return Eigen::Vector2cd(e * s, c);
  return Eigen::Vector2cd(-e * c, s);
}

OutcomeProbabilities outcome_probabilities(
    const FockState& state, const CoincidencePattern& pattern,
    const std::vector<AnalyzerSetting>& settings,
    const std::vector<PortProjection>& projections) {
  const RegistryPtr& reg = state.registry();
  FockState st = state;
  for (const auto& proj : projections)
    st = project_port(st, proj.port, proj.jones);

  MatrixXcd u = MatrixXcd::Identity(reg->size(), reg->size());
  for (const AnalyzerSetting& a : settings)
    rotate_port_block(u, reg, a.port, a.axis_state(0), a.axis_state(1));
  st = evolve(st, TransferMatrix::checked(std::move(u)));

  OutcomeProbabilities out;
  const size_t k = settings.size();
  for (std::uint64_t bits = 0; bits < (1ull << k); ++bits) {
    std::string label(k, '0');
    for (size_t i = 0; i < k; ++i)
      if (bits & (1ull << (k - 1 - i))) label[i] = '1';
    out.probs[label] = 0.0;
  }

  bool any = false;
  for (const auto& [occ, amp] : st.terms()) {
    if (!pattern_satisfied(reg, occ, pattern)) continue;
    any = true;
    std::string label(k, '0');
    bool split = false;
    for (size_t i = 0; i < k && !split; ++i) {
      int nh = 0, nv = 0;
      for (int l = 0; l < reg->n_internal(); ++l) {
        nh += occ[reg->index(settings[i].port, Pol::H, l)];
        nv += occ[reg->index(settings[i].port, Pol::V, l)];
      }
      if (nh > 0 && nv > 0) split = true;
      else if (nv > 0) label[i] = '1';
    }
    if (split) out.ambiguous += std::norm(amp);
    else out.probs[label] += std::norm(amp);
  }
  out.no_photons = !any;
  return out;
}

ConditionalState conditional_logical_state(const CircuitSpec& spec,
                                           const FockState& output_state) {
  const RegistryPtr& reg = output_state.registry();
  FockState st = output_state;
  for (const auto& proj : spec.projections)
    st = project_port(st, proj.port, proj.jones);

  // Rotate every output qubit port so its |1> basis occupies the H slot.
  MatrixXcd u = MatrixXcd::Identity(reg->size(), reg->size());
  std::vector<std::string> qports;
  for (const QubitEncoding& enc : spec.output_qubits) {
    if (enc.ports.size() != 1)
      throw std::invalid_argument("output qubits must be single-port");
    rotate_port_block(u, reg, enc.ports[0], enc.basis1, enc.basis0);
    qports.push_back(enc.ports[0]);
  }
  st = evolve(st, TransferMatrix::checked(std::move(u)));

  CoincidencePattern pattern;
  for (const auto& [port, n] : spec.postselect) pattern.required[port] = n;

  const size_t k = qports.size();
  const int dim = 1 << k;
  // Group amplitudes by everything that is not the logical value: the
  // occupation with the qubit slots cleared (this keeps internal labels
  // and any projected ancilla photons as environment indices).
  std::map<Occupation, VectorXcd> groups;
  for (const auto& [occ, amp] : st.terms()) {
    if (!pattern_satisfied(reg, occ, pattern)) continue;
    int bits = 0;
    bool valid = true;
    Occupation env = occ;
    for (size_t i = 0; i < k && valid; ++i) {
      int nh = 0, nv = 0, label = 0;
      for (int l = 0; l < reg->n_internal(); ++l) {
        int ih = reg->index(qports[i], Pol::H, l);
        int iv = reg->index(qports[i], Pol::V, l);
        nh += occ[ih];
        nv += occ[iv];
        if (occ[ih] || occ[iv]) label = l;
        env[ih] = env[iv] = 0;
      }
      if (nh + nv != 1) valid = false;
      bits = (bits << 1) | (nh ? 1 : 0);
      env.push_back(static_cast<uint8_t>(label));
    }
    if (!valid) continue;
    auto it = groups.try_emplace(env, VectorXcd::Zero(dim)).first;
    it->second(bits) += amp;
  }

  ConditionalState cs;
  cs.rho = MatrixXcd::Zero(dim, dim);
  for (const auto& [env, psi] : groups) cs.rho += psi * psi.adjoint();
  cs.probability = cs.rho.trace().real();
  if (cs.probability <= 0.0) {
    cs.zero_branch = true;
    cs.rho.setZero();
    return cs;
  }
  cs.rho /= cs.probability;
  return cs;
}

std::vector<CountRecord> sample_counts(
    const std::string& setting_id,
    const std::map<std::string, double>& probabilities, std::int64_t shots,
    std::uint64_t seed) {
  if (shots < 0) throw std::invalid_argument("shots must be >= 0");
  double total = 0.0;
  for (const auto& [_, p] : probabilities) {
    if (p < 0.0) throw std::invalid_argument("negative probability");
    total += p;
  }
  std::mt19937_64 rng(mix_seed(seed, setting_id));
  std::vector<CountRecord> out;
  std::int64_t remaining = shots;
  double mass = total;
  for (const auto& [outcome, p] : probabilities) {
    std::int64_t n = 0;
    if (remaining > 0 && mass > 0.0) {
      double q = std::min(1.0, p / mass);
      n = std::binomial_distribution<std::int64_t>(remaining, q)(rng);
    }
    out.push_back({setting_id, outcome, n, shots, seed});
    remaining -= n;
    mass -= p;
  }
  return out;
}

SubtractionResult subtract_single_source_events(
    const std::vector<CountRecord>& total,
    const std::vector<CountRecord>& blocked_a,
    const std::vector<CountRecord>& blocked_b) {
  if (blocked_a.size() != total.size() || blocked_b.size() != total.size())
    throw std::invalid_argument("subtraction runs have different settings");
  SubtractionResult res;
  for (size_t i = 0; i < total.size(); ++i) {
    const CountRecord& t = total[i];
    const CountRecord& a = blocked_a[i];
    const CountRecord& b = blocked_b[i];
    if (a.setting_id != t.setting_id || a.outcome != t.outcome ||
        b.setting_id != t.setting_id || b.outcome != t.outcome)
      throw std::invalid_argument("subtraction runs have different settings");
    std::int64_t net = t.count - a.count - b.count;
    if (net < 0) {
      res.floored_mass += -net;
      res.floored_outcomes += 1;
      net = 0;
    }
    res.counts.push_back({t.setting_id, t.outcome, net, t.shots, t.seed});
  }
  return res;
}

std::map<std::string, std::map<std::string, double>> normalize_per_input(
    const std::map<std::string, std::map<std::string, std::int64_t>>& counts) {
  std::map<std::string, std::map<std::string, double>> out;
  for (const auto& [input, row] : counts) {
    std::int64_t total = 0;
    for (const auto& [_, c] : row) {
      if (c < 0) throw std::invalid_argument("negative count for " + input);
      total += c;
    }
    if (total <= 0)
      throw std::invalid_argument("input " + input + " has zero total counts");
    for (const auto& [outcome, c] : row)
      out[input][outcome] = static_cast<double>(c) / total;
  }
  return out;
}

std::string count_records_to_csv(const std::vector<CountRecord>& records) {
  std::ostringstream os;
  os << "setting_id,outcome,count,shots,seed\n";
  for (const CountRecord& r : records)
    os << r.setting_id << ',' << r.outcome << ',' << r.count << ','
       << r.shots << ',' << r.seed << '\n';
  return os.str();
}

std::vector<CountRecord> count_records_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "setting_id,outcome,count,shots,seed")
    throw std::invalid_argument("bad count record CSV header");
  std::vector<CountRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    CountRecord r;
    std::string field;
    if (!std::getline(ls, r.setting_id, ',') ||
        !std::getline(ls, r.outcome, ','))
      throw std::invalid_argument("bad count record row: " + line);
    std::getline(ls, field, ',');
    r.count = std::stoll(field);
    std::getline(ls, field, ',');
    r.shots = std::stoll(field);
    std::getline(ls, field, ',');
    r.seed = std::stoull(field);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace loqs
