#include "loqs/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <nlohmann/json.hpp>

namespace loqs {

using json = nlohmann::json;

RegistryPtr CircuitSpec::registry() const {
  // Memoized so states built from the same spec share one registry.
  if (!registry_ || registry_->ports() != ports ||
      registry_->n_internal() != n_internal || registry_->n_max() != n_max)
    registry_ = ModeRegistry::make(ports, n_internal, n_max);
  return registry_;
}

CompiledCircuit compile(const CircuitSpec& spec) {
  RegistryPtr reg = spec.registry();
  TransferMatrix total = TransferMatrix::identity(reg->size());
  for (const ElementSpec& el : spec.elements) {
    for (const auto& p : el.ports)
      if (std::find(spec.ports.begin(), spec.ports.end(), p) ==
          spec.ports.end())
        throw std::invalid_argument("element references unregistered port " +
                                    p + " in circuit " + spec.name);
    total = total.then(element_matrix(reg, el));
  }
  size_t prov = std::hash<std::string>{}(spec.to_json());
  return {reg, std::move(total), prov};
}

// -------------------------------------------------------------- logical IO

namespace {

Eigen::Matrix2cd rotation_to_slots(const Eigen::Vector2cd& slot_h,
                                   const Eigen::Vector2cd& slot_v) {
  // Unitary sending the slot_h Jones state to the H mode and slot_v to V.
  Eigen::Matrix2cd u;
  u << std::conj(slot_h(0)), std::conj(slot_h(1)), std::conj(slot_v(0)),
      std::conj(slot_v(1));
  return u;
}

Eigen::Vector2cd orthogonal_jones(const Eigen::Vector2cd& v) {
  return Eigen::Vector2cd(-std::conj(v(1)), std::conj(v(0)));
}

// Creation of a photon in a Jones state at a port (internal label 0).
void add_photon_terms(std::vector<std::pair<std::vector<int>, cplx>>& monos,
                      const RegistryPtr& reg, const std::string& port,
                      const Eigen::Vector2cd& jones) {
  std::vector<std::pair<std::vector<int>, cplx>> next;
  for (const auto& [modes, coeff] : monos) {
    if (jones(0) != cplx(0)) {
      auto m = modes;
      m.push_back(reg->index(port, Pol::H, 0));
      next.push_back({std::move(m), coeff * jones(0)});
    }
    if (jones(1) != cplx(0)) {
      auto m = modes;
      m.push_back(reg->index(port, Pol::V, 0));
      next.push_back({std::move(m), coeff * jones(1)});
    }
  }
  monos = std::move(next);
}

}  // namespace

FockState logical_input(const CircuitSpec& spec,
                        const std::vector<Eigen::Vector2cd>& qubits) {
  if (qubits.size() != spec.input_qubits.size())
    throw std::invalid_argument("wrong number of logical qubit amplitudes");
  RegistryPtr reg = spec.registry();
  std::vector<std::pair<std::vector<int>, cplx>> monos{{{}, 1.0}};
  for (size_t q = 0; q < qubits.size(); ++q) {
    const QubitEncoding& enc = spec.input_qubits[q];
    const cplx a0 = qubits[q](0), a1 = qubits[q](1);
    // Branch over |0> and |1>, each a product over the encoding's ports.
    std::vector<std::pair<std::vector<int>, cplx>> branched;
    for (int bit = 0; bit < 2; ++bit) {
      cplx amp = bit ? a1 : a0;
      if (amp == cplx(0)) continue;
      auto partial = monos;
      for (auto& [modes, coeff] : partial) coeff *= amp;
      for (const std::string& port : enc.ports)
        add_photon_terms(partial, reg, port, bit ? enc.basis1 : enc.basis0);
      branched.insert(branched.end(), partial.begin(), partial.end());
    }
    monos = std::move(branched);
  }
  for (const AncillaPair& anc : spec.ancillae) {
    std::vector<std::pair<std::vector<int>, cplx>> branched;
    const std::pair<cplx, std::pair<Eigen::Vector2cd, Eigen::Vector2cd>>
        arms[2] = {{anc.c1, {anc.a1, anc.b1}}, {anc.c2, {anc.a2, anc.b2}}};
    for (const auto& [amp, jones] : arms) {
      if (amp == cplx(0)) continue;
      auto partial = monos;
      for (auto& [modes, coeff] : partial) coeff *= amp;
      add_photon_terms(partial, reg, anc.port_a, jones.first);
      add_photon_terms(partial, reg, anc.port_b, jones.second);
      branched.insert(branched.end(), partial.begin(), partial.end());
    }
    monos = std::move(branched);
  }
  FockState out(reg);
  FockState vac = FockState::vacuum(reg);
  for (const auto& [modes, coeff] : monos)
    out = out.plus(vac.apply_creation(modes).scaled(coeff));
  out.prune();
  return out;
}

FockState logical_basis_input(const CircuitSpec& spec, int basis_index) {
  const int k = static_cast<int>(spec.input_qubits.size());
  std::vector<Eigen::Vector2cd> qs(k);
  for (int q = 0; q < k; ++q) {
    int bit = (basis_index >> (k - 1 - q)) & 1;
    qs[q] = bit ? Eigen::Vector2cd(0, 1) : Eigen::Vector2cd(1, 0);
  }
  return logical_input(spec, qs);
}

FockState project_port(const FockState& state, const std::string& port,
                       const Eigen::Vector2cd& jones) {
  // Rotate the port so the projected Jones state occupies the H slot, then
  // drop terms with photons in the orthogonal slot.
  const RegistryPtr& reg = state.registry();
  Eigen::Matrix2cd rot = rotation_to_slots(jones, orthogonal_jones(jones));
  MatrixXcd u = MatrixXcd::Identity(reg->size(), reg->size());
  for (int l = 0; l < reg->n_internal(); ++l) {
    int h = reg->index(port, Pol::H, l), v = reg->index(port, Pol::V, l);
    u(h, h) = rot(0, 0);
    u(h, v) = rot(0, 1);
    u(v, h) = rot(1, 0);
    u(v, v) = rot(1, 1);
  }
  FockState rotated = evolve_sequential(state, {u, true});
  FockState out(reg);
  for (const auto& [occ, amp] : rotated.terms()) {
    bool ok = true;
    for (int l = 0; l < reg->n_internal(); ++l)
      if (occ[reg->index(port, Pol::V, l)] > 0) ok = false;
    if (ok) out.add_term(occ, amp);
  }
  return out;
}

LogicalOperator extract_logical_operator(const CircuitSpec& spec) {
  CompiledCircuit cc = compile(spec);
  const RegistryPtr& reg = cc.registry;
  const int k_in = static_cast<int>(spec.input_qubits.size());
  const int k_out = static_cast<int>(spec.output_qubits.size());
  const int n_in = 1 << k_in, n_out = 1 << k_out;
  MatrixXcd m(n_out, n_in);

  for (int in = 0; in < n_in; ++in) {
    FockState st = evolve(logical_basis_input(spec, in), cc.total);
    for (const auto& proj : spec.projections)
      st = project_port(st, proj.port, proj.jones);
    // Rotate each output qubit port so bit 1 sits in the H slot.
    for (const QubitEncoding& enc : spec.output_qubits) {
      Eigen::Matrix2cd rot = rotation_to_slots(enc.basis1, enc.basis0);
      MatrixXcd u = MatrixXcd::Identity(reg->size(), reg->size());
      int h = reg->index(enc.ports.at(0), Pol::H, 0);
      int v = reg->index(enc.ports.at(0), Pol::V, 0);
      u(h, h) = rot(0, 0);
      u(h, v) = rot(0, 1);
      u(v, h) = rot(1, 0);
      u(v, v) = rot(1, 1);
      st = evolve_sequential(st, {u, true});
    }
    for (int out = 0; out < n_out; ++out) {
      Occupation occ(reg->size(), 0);
      bool valid = true;
      for (const auto& proj : spec.projections) {
        int idx = reg->index(proj.port, Pol::H, 0);
        occ[idx] += 1;  // the projected photon, now in the H slot
      }
      for (int q = 0; q < k_out; ++q) {
        int bit = (out >> (k_out - 1 - q)) & 1;
        const QubitEncoding& enc = spec.output_qubits[q];
        int idx = reg->index(enc.ports.at(0), bit ? Pol::H : Pol::V, 0);
        if (occ[idx] > 0) valid = false;
        occ[idx] += 1;
      }
      m(out, in) = valid ? st.amplitude(occ) : cplx(0);
    }
  }

  LogicalOperator op;
  op.m = m;
  Eigen::JacobiSVD<MatrixXcd> svd(m);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  op.success = smax * smax;
  op.rank_deficient = smin < 1e-6 * std::max(smax, 1e-300);
  op.u = smax > 0 ? MatrixXcd(m / smax) : m;
  return op;
}

double operator_distance(const MatrixXcd& u, const MatrixXcd& ideal) {
  cplx overlap = (ideal.adjoint() * u).trace();
  cplx phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : cplx(1);
  return (u / phase - ideal).norm();
}

MatrixXcd fredkin_matrix() {
  MatrixXcd f = MatrixXcd::Zero(8, 8);
  for (int c = 0; c < 2; ++c)
    for (int t1 = 0; t1 < 2; ++t1)
      for (int t2 = 0; t2 < 2; ++t2) {
        int in = c * 4 + t1 * 2 + t2;
        int out = c ? c * 4 + t2 * 2 + t1 : in;
        f(out, in) = 1.0;
      }
  return f;
}

MatrixXcd cnot_matrix() {
  MatrixXcd m = MatrixXcd::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

MatrixXcd swap_matrix() {
  MatrixXcd m = MatrixXcd::Zero(4, 4);
  m(0, 0) = m(3, 3) = m(1, 2) = m(2, 1) = 1.0;
  return m;
}

// ------------------------------------------------------------ constructions

CircuitSpec build_mach_zehnder(double phi) {
  CircuitSpec spec;
  spec.name = "mach-zehnder";
  spec.ports = {"A", "B"};
  spec.n_max = 2;
  spec.elements = {beam_splitter(0.5, "A", "B"), phase_plate(phi, "A"),
                   beam_splitter(0.5, "A", "B")};
  spec.input_map = {{"A", "A"}, {"B", "B"}};
  // At phi = 0 a photon from A crosses; C names that bright output.
  spec.output_map = {{"C", "B"}, {"D", "A"}};
  return spec;
}

CircuitSpec build_partial_swap(double phi) {
  // Mach-Zehnder on the two target photons. The arm element is a phase
  // plate plus attenuator with complex transmission t solved so the
  // post-selected two-qubit operator is exactly P_sym + e^{i phi} P_asym.
  cplx e = std::exp(cplx(0, phi));
  cplx t = std::conj(e) * (cplx(1) - std::sqrt(cplx(1) - e * e));
  if (std::abs(t) > 1.0 + 1e-12)
    t = std::conj(e) * (cplx(1) + std::sqrt(cplx(1) - e * e));
  CircuitSpec spec;
  spec.name = "partial-swap";
  spec.ports = {"T1", "T2"};
  spec.n_max = 4;
  spec.elements = {beam_splitter(0.5, "T1", "T2"),
                   phase_plate(std::arg(t), "T1"),
                   lossy_mirror(std::norm(t), std::norm(t), "T1"),
                   beam_splitter(0.5, "T1", "T2")};
  spec.input_map = {{"T1in", "T1"}, {"T2in", "T2"}};
  spec.output_map = {{"T1out", "T2"}, {"T2out", "T1"}};
  spec.postselect = {{"T1", 1}, {"T2", 1}};
  spec.input_qubits = {{{"T1"}}, {{"T2"}}};
  spec.output_qubits = {{{"T2"}}, {{"T1"}}};
  return spec;
}

CircuitSpec build_ppbs_cnot() {
  CircuitSpec spec;
  spec.name = "ppbs-cnot";
  spec.ports = {"C", "T"};
  spec.n_max = 4;
  spec.elements = {
      lossy_mirror(1.0, 1.0 / 3.0, "C"),
      lossy_mirror(1.0, 1.0 / 3.0, "T"),
      ppbs(1.0 / 3.0, 1.0, "T", "C"),
      port_swap("T", "C"),  // reflection continues each beam
  };
  spec.input_map = {{"control", "C"}, {"target", "T"}};
  spec.output_map = {{"control", "C"}, {"target", "T"}};
  spec.postselect = {{"C", 1}, {"T", 1}};
  const double rt = std::sqrt(0.5);
  // Fig. 2E conventions: control |0>=V, |1>=H; target |0>=(V+H)/sqrt(2),
  // |1>=(V-H)/sqrt(2).
  QubitEncoding control{{"C"}};
  QubitEncoding target{{"T"},
                       Eigen::Vector2cd(rt, rt),
                       Eigen::Vector2cd(-rt, rt)};
  spec.input_qubits = {control, target};
  spec.output_qubits = {control, target};
  return spec;
}

CircuitSpec build_cswap_simplified(const CswapOptions& opt) {
  // Unfolded interferometer: the two control photons apply a pi phase per
  // arm photon when the control pair is |1>. The first PPBS interferes H
  // with C1 in arm T1; the second interferes V with C2 in arm T2, so the
  // two conditional phases cover complementary polarizations and the |1>
  // pair (H on C1, V on C2 after the encoding plate) phases every arm
  // photon regardless of its polarization.
  const double third = 1.0 / 3.0;
  CircuitSpec spec;
  spec.name = "cswap-simplified";
  spec.ports = {"T1", "T2", "C1", "C2"};
  spec.n_max = 6;
  auto& el = spec.elements;
  if (opt.flip_c2) el.push_back(half_wave_plate(M_PI / 4, "C2"));
  // Balancing attenuators for the non-interfering control polarizations.
  el.push_back(lossy_mirror(1.0, third, "C1"));
  el.push_back(lossy_mirror(third, 1.0, "C2"));
  el.push_back(beam_splitter(0.5, "T1", "T2"));
  // Arm compensators for the non-interfering target polarizations.
  el.push_back(lossy_mirror(1.0, third, "T1"));
  el.push_back(lossy_mirror(third, 1.0, "T2"));
  // PPBS 1: H interferes, reflection continues each beam.
  el.push_back(ppbs(opt.ppbs_a1_rh, opt.ppbs_a1_rv, "T1", "C1"));
  el.push_back(port_swap("T1", "C1"));
  // PPBS 2: same component in the polarization-flipped basis (V interferes).
  el.push_back(half_wave_plate(M_PI / 4, "T2"));
  el.push_back(half_wave_plate(M_PI / 4, "C2"));
  el.push_back(ppbs(opt.ppbs_a2_rh, opt.ppbs_a2_rv, "T2", "C2"));
  el.push_back(port_swap("T2", "C2"));
  el.push_back(half_wave_plate(M_PI / 4, "T2"));
  el.push_back(half_wave_plate(M_PI / 4, "C2"));
  el.push_back(beam_splitter(0.5, "T1", "T2"));
  // Relative-phase correction between the two control branches.
  el.push_back(half_wave_plate(0.0, "C1"));

  spec.input_map = {{"T1in", "T1"}, {"T2in", "T2"}, {"C1in", "C1"},
                    {"C2in", "C2"}};
  spec.output_map = {{"T1out", "T2"}, {"T2out", "T1"}, {"C1out", "C1"},
                     {"C2out", "C2"}};
  spec.postselect = {{"T1", 1}, {"T2", 1}, {"C1", 1}, {"C2", 1}};
  const double rt = std::sqrt(0.5);
  spec.projections = {{"C2", Eigen::Vector2cd(rt, rt)}};
  // Control pair encoding |0> = |VV>, |1> = |HH> (Fig.-3 convention);
  // targets |0> = V, |1> = H. Logical order (control, T1, T2).
  spec.input_qubits = {{{"C1", "C2"}}, {{"T1"}}, {{"T2"}}};
  spec.output_qubits = {{{"C1"}}, {{"T2"}}, {{"T1"}}};
  return spec;
}

CircuitSpec build_cswap_full(bool encoder_minus, bool c2_minus) {
  CswapOptions core_opt;
  core_opt.flip_c2 = false;  // the encoder emits |VH>/|HV> directly
  CircuitSpec spec = build_cswap_simplified(core_opt);
  spec.name = "cswap-full";
  spec.ports = {"T1", "T2", "C1", "C2", "D"};
  spec.n_max = 6;

  // Parity-check encoder: control photon enters C1, EPR ancilla on (D, C2).
  // The PBS between C1 and D post-selects the parity; the D photon is then
  // measured in the diagonal basis.
  std::vector<ElementSpec> encoder;
  encoder.push_back(pbs("C1", "D"));
  if (!encoder_minus)
    encoder.push_back(half_wave_plate(0.0, "C1"));  // diag(1,-1) correction
  spec.elements.insert(spec.elements.begin(), encoder.begin(), encoder.end());
  if (c2_minus)
    spec.elements.push_back(half_wave_plate(0.0, "C1"));  // Z feed-forward

  const double rt = std::sqrt(0.5);
  spec.postselect["D"] = 1;
  spec.projections = {
      {"C2", Eigen::Vector2cd(rt, c2_minus ? -rt : rt)},
      {"D", Eigen::Vector2cd(rt, encoder_minus ? -rt : rt)},
  };
  spec.input_map = {{"T1in", "T1"}, {"T2in", "T2"}, {"Cin", "C1"},
                    {"EPR1", "D"},  {"EPR2", "C2"}};
  // Single-photon control at C1 plus the EPR ancilla (|HV> + |VH>)/sqrt(2)
  // across (D, C2).
  QubitEncoding control{{"C1"}};
  spec.input_qubits = {control, {{"T1"}}, {{"T2"}}};
  const Eigen::Vector2cd h(1, 0), v(0, 1);
  spec.ancillae = {{"D", "C2", h, v, v, h, rt, rt}};
  return spec;
}

// ------------------------------------------------------------ serialization

namespace {

json jones_to_json(const Eigen::Vector2cd& v) {
  return json::array({v(0).real(), v(0).imag(), v(1).real(), v(1).imag()});
}

Eigen::Vector2cd jones_from_json(const json& j) {
  return Eigen::Vector2cd(cplx(j.at(0), j.at(1)), cplx(j.at(2), j.at(3)));
}

json encoding_to_json(const QubitEncoding& e) {
  return json{{"ports", e.ports},
              {"basis0", jones_to_json(e.basis0)},
              {"basis1", jones_to_json(e.basis1)}};
}

QubitEncoding encoding_from_json(const json& j) {
  QubitEncoding e;
  e.ports = j.at("ports").get<std::vector<std::string>>();
  e.basis0 = jones_from_json(j.at("basis0"));
  e.basis1 = jones_from_json(j.at("basis1"));
  return e;
}

}  // namespace

std::string CircuitSpec::to_json() const {
  json j;
  j["name"] = name;
  j["ports"] = ports;
  j["n_internal"] = n_internal;
  j["n_max"] = n_max;
  json els = json::array();
  for (const auto& el : elements)
    els.push_back(json{{"kind", element_kind_name(el.kind)},
                       {"params", el.params},
                       {"ports", el.ports}});
  j["elements"] = els;
  j["input_map"] = input_map;
  j["output_map"] = output_map;
  j["postselect"] = postselect;
  json projs = json::array();
  for (const auto& p : projections)
    projs.push_back(json{{"port", p.port}, {"jones", jones_to_json(p.jones)}});
  j["projections"] = projs;
  json in_q = json::array(), out_q = json::array();
  for (const auto& q : input_qubits) in_q.push_back(encoding_to_json(q));
  for (const auto& q : output_qubits) out_q.push_back(encoding_to_json(q));
  j["input_qubits"] = in_q;
  j["output_qubits"] = out_q;
  json ancs = json::array();
  for (const auto& a : ancillae)
    ancs.push_back(json{{"port_a", a.port_a},
                        {"port_b", a.port_b},
                        {"a1", jones_to_json(a.a1)},
                        {"b1", jones_to_json(a.b1)},
                        {"a2", jones_to_json(a.a2)},
                        {"b2", jones_to_json(a.b2)},
                        {"c1", json::array({a.c1.real(), a.c1.imag()})},
                        {"c2", json::array({a.c2.real(), a.c2.imag()})}});
  j["ancillae"] = ancs;
  return j.dump(2);
}

CircuitSpec CircuitSpec::from_json(const std::string& text) {
  json j = json::parse(text);
  CircuitSpec spec;
  spec.name = j.at("name").get<std::string>();
  spec.ports = j.at("ports").get<std::vector<std::string>>();
  spec.n_internal = j.at("n_internal").get<int>();
  spec.n_max = j.at("n_max").get<int>();
  for (const auto& el : j.at("elements")) {
    ElementSpec e;
    e.kind = element_kind_from_name(el.at("kind").get<std::string>());
    e.params = el.at("params").get<std::map<std::string, double>>();
    e.ports = el.at("ports").get<std::vector<std::string>>();
    spec.elements.push_back(std::move(e));
  }
  spec.input_map = j.at("input_map").get<std::map<std::string, std::string>>();
  spec.output_map =
      j.at("output_map").get<std::map<std::string, std::string>>();
  spec.postselect = j.at("postselect").get<std::map<std::string, int>>();
  for (const auto& p : j.at("projections"))
    spec.projections.push_back(
        {p.at("port").get<std::string>(), jones_from_json(p.at("jones"))});
  for (const auto& q : j.at("input_qubits"))
    spec.input_qubits.push_back(encoding_from_json(q));
  for (const auto& q : j.at("output_qubits"))
    spec.output_qubits.push_back(encoding_from_json(q));
  for (const auto& a : j.at("ancillae")) {
    AncillaPair anc;
    anc.port_a = a.at("port_a").get<std::string>();
    anc.port_b = a.at("port_b").get<std::string>();
    anc.a1 = jones_from_json(a.at("a1"));
    anc.b1 = jones_from_json(a.at("b1"));
    anc.a2 = jones_from_json(a.at("a2"));
    anc.b2 = jones_from_json(a.at("b2"));
    anc.c1 = cplx(a.at("c1").at(0), a.at("c1").at(1));
    anc.c2 = cplx(a.at("c2").at(0), a.at("c2").at(1));
    spec.ancillae.push_back(std::move(anc));
  }
  return spec;
}

}  // namespace loqs
