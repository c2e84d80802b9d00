#include "loqs/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace loqs {

using json = nlohmann::json;

// ------------------------------------------------------------ serialization

namespace {

void check_fields(const json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
  if (!j.is_object())
    throw std::invalid_argument(where + " must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw std::invalid_argument("unknown field \"" + key + "\" in " + where);
}

}  // namespace

std::string Scenario::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["name"] = name;
  j["circuit"] = circuit;
  json src;
  src["epsilon"] = source.epsilon;
  src["n_max_pairs"] = source.n_max_pairs;
  src["overlap"] = source.overlap;
  src["entangled_state_fidelity"] = source.entangled_state_fidelity;
  src["component_overrides"] = source.component_overrides;
  j["source"] = src;
  if (shots > 0)
    j["shots"] = shots;
  else
    j["shots"] = "exact";
  j["seed"] = seed;
  j["subtraction"] = subtraction;
  return j.dump(2);
}

Scenario Scenario::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario parse error: ") +
                                e.what());
  }
  check_fields(j,
               {"schema_version", "name", "circuit", "source", "shots", "seed",
                "subtraction"},
               "scenario");
  Scenario s;
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
    throw std::invalid_argument("scenario needs an integer schema_version");
  if (j["schema_version"].get<int>() != 1)
    throw std::invalid_argument("unsupported scenario schema_version");
  s.name = j.value("name", std::string());
  s.circuit = j.value("circuit", s.circuit);
  if (j.contains("source")) {
    const json& src = j["source"];
    check_fields(src,
                 {"epsilon", "n_max_pairs", "overlap",
                  "entangled_state_fidelity", "component_overrides"},
                 "source");
    s.source.epsilon = src.value("epsilon", s.source.epsilon);
    s.source.n_max_pairs = src.value("n_max_pairs", s.source.n_max_pairs);
    s.source.overlap = src.value("overlap", s.source.overlap);
    s.source.entangled_state_fidelity =
        src.value("entangled_state_fidelity", s.source.entangled_state_fidelity);
    if (src.contains("component_overrides"))
      s.source.component_overrides =
          src["component_overrides"].get<std::map<std::string, double>>();
  }
  if (j.contains("shots")) {
    if (j["shots"].is_string()) {
      if (j["shots"].get<std::string>() != "exact")
        throw std::invalid_argument("shots must be an integer or \"exact\"");
      s.shots = 0;
    } else if (j["shots"].is_number_integer()) {
      s.shots = j["shots"].get<std::int64_t>();
      if (s.shots < 0) throw std::invalid_argument("shots must be >= 0");
    } else {
      throw std::invalid_argument("shots must be an integer or \"exact\"");
    }
  }
  s.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("subtraction")) {
    if (!j["subtraction"].is_boolean())
      throw std::invalid_argument("subtraction must be a boolean");
    s.subtraction = j["subtraction"].get<bool>();
  }
  s.source.validate();
  return s;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

// ----------------------------------------------------------------- circuits

CircuitSpec resolve_circuit(const std::string& ref,
                            const SourceConfig& config) {
  CswapOptions opt;
  for (const auto& [key, value] : config.component_overrides) {
    if (key == "ppbs_a1_rh")
      opt.ppbs_a1_rh = value;
    else if (key == "ppbs_a1_rv")
      opt.ppbs_a1_rv = value;
    else if (key == "ppbs_a2_rh")
      opt.ppbs_a2_rh = value;
    else if (key == "ppbs_a2_rv")
      opt.ppbs_a2_rv = value;
    else
      throw std::invalid_argument("unknown component override " + key);
  }
  CircuitSpec spec;
  if (ref == "cswap-simplified") {
    spec = build_cswap_simplified(opt);
  } else {
    if (!config.component_overrides.empty())
      throw std::invalid_argument(
          "component overrides only apply to cswap-simplified");
    if (ref == "cswap-full") {
      spec = build_cswap_full();
    } else if (ref == "ppbs-cnot") {
      spec = build_ppbs_cnot();
    } else {
      std::ifstream in(ref);
      if (!in) throw std::invalid_argument("cannot open circuit file " + ref);
      std::stringstream ss;
      ss << in.rdbuf();
      spec = CircuitSpec::from_json(ss.str());
    }
  }
  if (config.overlap < 1.0) spec.n_internal = std::max(spec.n_internal, 2);
  return spec;
}

// ------------------------------------------------------------- run pipeline

namespace {

struct Pipeline {
  CircuitSpec spec;
  CompiledCircuit compiled;
  CoincidencePattern pattern;
  int required_total = 0;
  bool every_port_postselected = false;
  std::vector<std::string> target_ports;   // input ports of the two targets
  std::vector<std::string> output_ports;   // logical qubit order
};

Pipeline make_pipeline(const Scenario& sc) {
  Pipeline pl;
  pl.spec = resolve_circuit(sc.circuit, sc.source);
  pl.compiled = compile(pl.spec);
  for (const auto& [port, n] : pl.spec.postselect) {
    pl.pattern.required[port] = n;
    pl.required_total += n;
  }
  pl.every_port_postselected =
      pl.pattern.required.size() == pl.spec.ports.size();
  const auto& in = pl.spec.input_qubits;
  if (in.size() != 3 || in[0].ports.size() != 2 || in[1].ports.size() != 1 ||
      in[2].ports.size() != 1 || pl.spec.output_qubits.size() != 3)
    throw std::invalid_argument(
        "scenario runner needs a pair-control three-qubit circuit");
  pl.target_ports = {in[1].ports[0], in[2].ports[0]};
  for (const QubitEncoding& q : pl.spec.output_qubits)
    pl.output_ports.push_back(q.ports[0]);
  return pl;
}

/// Convex decomposition of the control-pair density operator: the Werner
/// mixture around the encoded pure pair carrying logical amplitudes c.
std::vector<std::pair<double, Eigen::Vector4cd>> control_mixture(
    const QubitEncoding& enc, const Eigen::Vector2cd& c, double fidelity) {
  auto pol_amp = [](const Eigen::Vector2cd& jones, int bit) {
    return bit ? jones(0) : jones(1);  // bit 1 = H component, bit 0 = V
  };
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  for (int b = 0; b < 4; ++b)
    psi(b) = c(0) * pol_amp(enc.basis0, b >> 1) * pol_amp(enc.basis0, b & 1) +
             c(1) * pol_amp(enc.basis1, b >> 1) * pol_amp(enc.basis1, b & 1);
  if (fidelity >= 1.0) return {{1.0, psi}};
  return eigenmixture(werner_state(psi, fidelity));
}

/// Terms that can satisfy an exact coincidence pattern covering every port
/// must carry exactly the demanded photon number; the rest are dead weight.
FockState keep_photon_number(const FockState& state, int n) {
  FockState out(state.registry());
  for (const auto& [occ, amp] : state.terms())
    if (total_photons(occ) == n) out.add_term(occ, amp);
  return out;
}

enum Run { kTotal = 0, kBlockedEntangled = 1, kBlockedTargets = 2 };

struct RunSet {
  // Absolute outcome probabilities per acquisition run, identical key sets.
  std::array<std::map<std::string, double>, 3> runs;
  double ambiguous = 0.0;
};

void add_warning(std::vector<std::string>& warnings, const std::string& w) {
  if (std::find(warnings.begin(), warnings.end(), w) == warnings.end())
    warnings.push_back(w);
}

struct SectorProbs {
  double norm = 0.0;
  double ambiguous = 0.0;
  std::vector<std::map<std::string, double>> probs;  // one map per group
};

/// Evolves one logical input through the noisy pipeline and accumulates the
/// outcome distribution of every analyzer group, for the total run and the
/// two single-source blocked runs. Distinct emission events are
/// distinguishable in practice, so pair-number sectors of the multi-pair
/// expansion contribute incoherently; the single-source sectors are exactly
/// what the blocked acquisition runs see.
std::vector<RunSet> input_distributions(
    const Pipeline& pl, const Scenario& sc, const Eigen::Vector2cd& c,
    const Eigen::Vector2cd& t1, const Eigen::Vector2cd& t2,
    const std::vector<std::vector<AnalyzerSetting>>& groups,
    std::vector<std::string>& warnings) {
  std::vector<RunSet> out(groups.size());
  auto mixture = control_mixture(pl.spec.input_qubits[0], c,
                                 sc.source.entangled_state_fidelity);

  auto measure = [&](const FockState& sector, SectorProbs& sp) {
    sp.norm += sector.norm_sq();
    sp.probs.resize(groups.size());
    FockState in = pl.every_port_postselected
                       ? keep_photon_number(sector, pl.required_total)
                       : sector;
    if (sc.source.overlap < 1.0)
      in = apply_distinguishability(in, pl.target_ports, sc.source.overlap);
    if (in.term_count() == 0) return;
    FockState evolved = evolve(in, pl.compiled.total);
    for (size_t g = 0; g < groups.size(); ++g) {
      OutcomeProbabilities op = outcome_probabilities(
          evolved, pl.pattern, groups[g], pl.spec.projections);
      for (const auto& [outcome, p] : op.probs) sp.probs[g][outcome] += p;
      sp.ambiguous += op.ambiguous;
    }
  };

  if (sc.source.epsilon <= 0.0) {
    for (const auto& [weight, psi] : mixture) {
      SectorProbs sp;
      measure(control_pair_input(pl.spec, psi, t1, t2), sp);
      for (size_t g = 0; g < groups.size(); ++g) {
        for (const auto& [outcome, p] : sp.probs[g])
          out[g].runs[kTotal][outcome] += weight * p;
        out[g].ambiguous += weight * sp.ambiguous;
      }
    }
  } else {
    const int cap =
        std::min(sc.source.n_max_pairs, pl.spec.registry()->n_max() / 2);
    // Target-only sectors are independent of the control mixture component.
    std::map<int, SectorProbs> target_only;
    for (int nb = 1; nb <= cap; ++nb)
      measure(spdc_sector(pl.spec, sc.source, Eigen::Vector4cd::Zero(), t1,
                          t2, 0, nb),
              target_only[nb]);
    if (cap >= 1) {
      // Convergence estimate for the truncated expansion (geometric tail of
      // the target-only ladder, the sector family with the largest norms).
      double last = target_only[cap].norm;
      double prev = cap >= 2 ? target_only[cap - 1].norm : 1.0;
      if (prev > 0.0 && last > 0.0) {
        double r = last / prev;
        double rel = r < 1.0 ? last * r / (1.0 - r) : 1.0;
        if (rel > 1e-6)
          add_warning(warnings,
                      "multi-pair truncation drops a relative norm of " +
                          std::to_string(rel));
      }
    }
    for (const auto& [weight, psi] : mixture) {
      double norm = 1.0;  // vacuum sector
      std::vector<std::tuple<int, int, SectorProbs>> contribs;
      for (int nb = 1; nb <= cap; ++nb) {
        norm += target_only[nb].norm;
        contribs.emplace_back(0, nb, target_only[nb]);
      }
      for (int na = 1; na <= cap; ++na)
        for (int nb = 0; na + nb <= cap; ++nb) {
          SectorProbs sp;
          measure(spdc_sector(pl.spec, sc.source, psi, t1, t2, na, nb), sp);
          norm += sp.norm;
          contribs.emplace_back(na, nb, std::move(sp));
        }
      double ambiguous = 0.0;
      for (const auto& [na, nb, sp] : contribs) {
        ambiguous += sp.ambiguous;
        for (size_t g = 0; g < groups.size(); ++g)
          for (const auto& [outcome, p] : sp.probs[g]) {
            double share = weight * p / norm;
            out[g].runs[kTotal][outcome] += share;
            if (na == 0) out[g].runs[kBlockedEntangled][outcome] += share;
            if (nb == 0) out[g].runs[kBlockedTargets][outcome] += share;
          }
      }
      for (RunSet& rs : out) rs.ambiguous += weight * ambiguous / norm;
    }
  }
  // Unify outcome keys across runs so subtraction lines up index by index.
  for (RunSet& rs : out)
    for (const auto& run : rs.runs)
      for (const auto& [outcome, _] : run)
        for (auto& other : rs.runs) other.try_emplace(outcome, 0.0);
  return out;
}

struct SettingResult {
  std::map<std::string, double> probs;   // normalized, after subtraction
  std::map<std::string, double> sigmas;  // zero in exact mode
  std::map<std::string, std::int64_t> counts;  // sampled mode only
  double absolute = 0.0;  // coincidence probability after subtraction
};

/// Reduces one setting's run distributions to a corrected outcome
/// distribution: exact probability arithmetic, or sampled counts with the
/// blocked runs drawn at shots scaled to equal acquisition.
SettingResult reduce_setting(const RunSet& rs, const Scenario& sc,
                             const std::string& setting_id,
                             std::vector<CountRecord>& records,
                             std::vector<std::string>& warnings) {
  SettingResult res;
  std::array<double, 3> mass{};
  for (int r = 0; r < 3; ++r)
    for (const auto& [_, p] : rs.runs[r]) mass[r] += p;

  std::map<std::string, double> corrected;
  for (const auto& [outcome, p] : rs.runs[kTotal])
    corrected[outcome] =
        sc.subtraction
            ? std::max(0.0, p - rs.runs[kBlockedEntangled].at(outcome) -
                                rs.runs[kBlockedTargets].at(outcome))
            : p;
  for (const auto& [_, p] : corrected) res.absolute += p;

  if (sc.shots <= 0) {
    double norm = res.absolute;
    if (norm <= 0.0)
      throw std::invalid_argument("input " + setting_id +
                                  " has zero total counts");
    for (const auto& [outcome, p] : corrected) {
      res.probs[outcome] = p / norm;
      res.sigmas[outcome] = 0.0;
    }
    return res;
  }

  // Sampled acquisition: the blocked runs get shots proportional to their
  // coincidence rates, emulating equal wall-clock integration.
  std::array<std::vector<CountRecord>, 3> drawn;
  const std::array<std::uint64_t, 3> seed_salt = {
      0u, 0x6b5dca5a1a2be0c5u, 0x94d049bb133111ebu};
  const int n_runs = sc.subtraction ? 3 : 1;
  for (int r = 0; r < n_runs; ++r) {
    std::int64_t shots =
        r == kTotal || mass[kTotal] <= 0.0
            ? sc.shots
            : std::llround(static_cast<double>(sc.shots) * mass[r] /
                           mass[kTotal]);
    drawn[r] = sample_counts(setting_id, rs.runs[r], shots,
                             sc.seed ^ seed_salt[r]);
  }
  std::vector<CountRecord> net = drawn[kTotal];
  if (sc.subtraction) {
    SubtractionResult sub = subtract_single_source_events(
        drawn[kTotal], drawn[kBlockedEntangled], drawn[kBlockedTargets]);
    if (sub.floored_mass > 0)
      add_warning(warnings, "subtraction floored " +
                                std::to_string(sub.floored_mass) +
                                " counts at zero");
    net = sub.counts;
  }
  static const char* run_tag[3] = {"total", "blocked-entangled",
                                   "blocked-targets"};
  for (int r = 0; r < n_runs; ++r)
    for (CountRecord rec : drawn[r]) {
      rec.setting_id += std::string("|") + run_tag[r];
      records.push_back(rec);
    }

  std::int64_t kept = 0;
  for (const CountRecord& rec : net) kept += rec.count;
  if (kept <= 0)
    throw std::invalid_argument("input " + setting_id +
                                " has zero total counts");
  for (const CountRecord& rec : net) {
    double f = static_cast<double>(rec.count) / static_cast<double>(kept);
    res.counts[rec.outcome] = rec.count;
    res.probs[rec.outcome] = f;
    res.sigmas[rec.outcome] =
        std::sqrt(f * (1.0 - f) / static_cast<double>(kept));
  }
  return res;
}

std::vector<AnalyzerSetting> axis_settings(const Pipeline& pl, double theta,
                                           const std::array<double, 3>& phis) {
  std::vector<AnalyzerSetting> s;
  for (int q = 0; q < 3; ++q)
    s.push_back({pl.output_ports[q], theta, phis[q]});
  return s;
}

std::string bits3(int b) {
  std::string s(3, '0');
  for (int i = 0; i < 3; ++i)
    if (b & (1 << (2 - i))) s[i] = '1';
  return s;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& scenario) {
  scenario.source.validate();
  ScenarioResult result;
  result.scenario = scenario;
  Pipeline pl = make_pipeline(scenario);

  // Logical amplitude vectors: component 0 multiplies |0>, component 1 |1>.
  const Eigen::Vector2cd zero(1, 0), one(0, 1);
  const Eigen::Vector2cd plus = (zero + one) / std::sqrt(2.0);
  std::vector<std::vector<AnalyzerSetting>> zzz = {
      axis_settings(pl, 0.0, {0.0, 0.0, 0.0})};

  // Computational-basis truth table.
  std::vector<std::string> labels;
  std::map<std::string, std::map<std::string, double>> truth_rows;
  std::map<std::string, std::map<std::string, double>> truth_sigmas;
  for (int b = 0; b < 8; ++b) {
    std::string label = bits3(b);
    labels.push_back(label);
    Eigen::Vector2cd c = (b & 4) ? one : zero;
    Eigen::Vector2cd t1 = (b & 2) ? one : zero;
    Eigen::Vector2cd t2 = (b & 1) ? one : zero;
    RunSet rs = input_distributions(pl, scenario, c, t1, t2, zzz,
                                    result.warnings)[0];
    SettingResult sr = reduce_setting(rs, scenario, "zzz:" + label,
                                      result.counts, result.warnings);
    truth_rows[label] = sr.probs;
    truth_sigmas[label] = sr.sigmas;
    result.success_per_input[label] = sr.absolute;
    if (rs.ambiguous > 1e-9)
      add_warning(result.warnings,
                  "ambiguous analyzer mass discarded on input " + label);
  }
  result.truth.labels = labels;
  result.truth.probs = Eigen::MatrixXd::Zero(8, 8);
  result.truth.sigmas = Eigen::MatrixXd::Zero(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const auto& row = truth_rows[labels[i]];
      auto it = row.find(labels[j]);
      if (it == row.end()) continue;
      result.truth.probs(i, j) = it->second;
      result.truth.sigmas(i, j) = truth_sigmas[labels[i]][labels[j]];
    }
  ValueWithError f_zzz =
      truth_table_fidelity(result.truth, fredkin_truth_map());

  // GHZ-coherence settings on the (|0> + |1>)|10> / sqrt(2) input.
  std::vector<std::vector<AnalyzerSetting>> ghz_groups = {
      axis_settings(pl, 0.0, {0.0, 0.0, 0.0}),
      axis_settings(pl, M_PI / 2, m_setting_phis(1)),
      axis_settings(pl, M_PI / 2, m_setting_phis(2)),
      axis_settings(pl, M_PI / 2, m_setting_phis(3)),
  };
  std::vector<RunSet> ghz = input_distributions(pl, scenario, plus, one, zero,
                                                ghz_groups, result.warnings);
  std::map<std::string, SettingDistribution> settings;
  for (int m = 0; m < 4; ++m) {
    std::string key = "m" + std::to_string(m);
    SettingResult sr = reduce_setting(ghz[m], scenario, key, result.counts,
                                      result.warnings);
    settings[key] = {sr.probs, sr.sigmas};
  }
  result.report =
      make_metrics_report(f_zzz, m_correlations(settings), scenario.subtraction);
  return result;
}

// -------------------------------------------------------------------- sweep

std::vector<SweepRow> sweep(const Scenario& base, const std::string& parameter,
                            const std::vector<double>& values, int jobs) {
  static const std::vector<std::string> override_keys = {
      "ppbs_a1_rh", "ppbs_a1_rv", "ppbs_a2_rh", "ppbs_a2_rv"};
  auto apply = [&](Scenario s, double v) {
    if (parameter == "epsilon")
      s.source.epsilon = v;
    else if (parameter == "overlap")
      s.source.overlap = v;
    else if (parameter == "entangled_state_fidelity")
      s.source.entangled_state_fidelity = v;
    else if (parameter == "shots")
      s.shots = std::llround(v);
    else if (std::find(override_keys.begin(), override_keys.end(),
                       parameter) != override_keys.end())
      s.source.component_overrides[parameter] = v;
    else
      throw std::invalid_argument("unknown sweep parameter " + parameter);
    return s;
  };

  std::vector<SweepRow> rows(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  int n_jobs = std::max(1, jobs);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < values.size();
         i = next.fetch_add(1)) {
      try {
        rows[i] = {values[i], run_scenario(apply(base, values[i]))};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (n_jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

std::string sweep_table_csv(const std::string& parameter,
                            const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os.precision(12);
  os << parameter
     << ",f_zzz,f_zzz_sigma,coherence,coherence_sigma,f_process,"
        "f_process_sigma,f_ghz,f_ghz_sigma,entanglement\n";
  for (const SweepRow& row : rows) {
    const MetricsReport& r = row.result.report;
    os << row.value << ',' << r.f_zzz.value << ',' << r.f_zzz.sigma << ','
       << r.coherence.value << ',' << r.coherence.sigma << ','
       << r.f_process.value << ',' << r.f_process.sigma << ','
       << r.f_ghz.value << ',' << r.f_ghz.sigma << ','
       << entanglement_class_name(r.verdict) << '\n';
  }
  return os.str();
}

// -------------------------------------------------------------- calibration

double scenario_contamination(const Scenario& scenario) {
  if (scenario.source.epsilon <= 0.0) return 0.0;
  CircuitSpec spec = resolve_circuit(scenario.circuit, scenario.source);
  const Eigen::Vector2cd zero(1, 0), one(0, 1);
  const Eigen::Vector2cd plus = (zero + one) / std::sqrt(2.0);
  SourceState src =
      spdc_multipair_state(spec, scenario.source, plus, one, zero);
  double four = 0.0, extra = 0.0;
  for (const auto& [occ, amp] : src.state.terms()) {
    int n = total_photons(occ);
    if (n == 4) four += std::norm(amp);
    if (n > 4) extra += std::norm(amp);
  }
  return four + extra > 0.0 ? extra / (four + extra) : 0.0;
}

double calibrate_epsilon_for_contamination(const Scenario& base,
                                           double target) {
  if (target <= 0.0 || target >= 1.0)
    throw std::invalid_argument("contamination target must be in (0, 1)");
  Scenario probe = base;
  double lo = 1e-4, hi = 0.9;
  for (int it = 0; it < 60; ++it) {
    probe.source.epsilon = (lo + hi) / 2;
    (scenario_contamination(probe) < target ? lo : hi) = probe.source.epsilon;
  }
  return (lo + hi) / 2;
}

// ----------------------------------------------------------------- builtins

std::vector<std::string> builtin_scenario_names() {
  return {"cswap-ideal-truth-table", "cswap-ghz-coherence",
          "cswap-measured-noise"};
}

Scenario builtin_scenario(const std::string& name) {
  Scenario s;
  s.name = name;
  if (name == "cswap-ideal-truth-table" || name == "cswap-ghz-coherence") {
    s.subtraction = false;
    return s;
  }
  if (name == "cswap-measured-noise") {
    // epsilon calibrated (calibrate_epsilon_for_contamination) so that the
    // three-pair fraction of potential four-fold events is about 10%.
    s.source.epsilon = 0.3066;
    s.source.n_max_pairs = 3;
    s.source.overlap = std::sqrt(0.862);
    s.source.entangled_state_fidelity = 0.962;
    s.source.component_overrides = {{"ppbs_a1_rh", 0.34},
                                    {"ppbs_a1_rv", 0.98},
                                    {"ppbs_a2_rh", 0.36},
                                    {"ppbs_a2_rv", 0.98}};
    s.seed = 7;
    s.subtraction = true;
    return s;
  }
  throw std::invalid_argument("unknown built-in scenario " + name);
}

// --------------------------------------------------------------- validation

ValidationReport validate_builtins() {
  std::ostringstream os;
  os.setf(std::ios::scientific);
  os.precision(3);
  bool ok = true;
  auto line = [&](const std::string& name, bool pass, bool report_only,
                  const std::string& detail) {
    const char* tag = report_only ? "REPORT" : (pass ? "PASS" : "FAIL");
    if (!report_only && !pass) ok = false;
    os << tag << "  " << name << ": " << detail << '\n';
  };
  auto check_gate = [&](const std::string& name, const CircuitSpec& spec,
                        const MatrixXcd& ideal, double success,
                        bool report_only) {
    LogicalOperator op = extract_logical_operator(spec);
    double dist = operator_distance(op.u, ideal);
    std::ostringstream d;
    d.setf(std::ios::scientific);
    d.precision(3);
    d << "distance " << dist << ", success " << op.success;
    line(name, dist < 1e-9 && std::abs(op.success - success) < 1e-9,
         report_only, d.str());
  };

  check_gate("cswap-simplified ideal", build_cswap_simplified(),
             fredkin_matrix(), 1.0 / 162.0, false);
  {
    LogicalOperator op = extract_logical_operator(build_cswap_simplified());
    MatrixXcd sq = op.u * op.u;
    line("cswap-simplified involution", operator_distance(
             sq, MatrixXcd::Identity(8, 8)) < 1e-9, false,
         "U^2 = I up to phase");
  }
  {
    CswapOptions measured;
    measured.ppbs_a1_rh = 0.34;
    measured.ppbs_a1_rv = 0.98;
    measured.ppbs_a2_rh = 0.36;
    measured.ppbs_a2_rv = 0.98;
    LogicalOperator op =
        extract_logical_operator(build_cswap_simplified(measured));
    std::ostringstream d;
    d.setf(std::ios::scientific);
    d.precision(3);
    d << "distance " << operator_distance(op.u, fredkin_matrix())
      << ", success " << op.success << " (measured reflectivities)";
    line("cswap-simplified measured PPBS", true, true, d.str());
  }
  double branch_total = 0.0;
  for (int b = 0; b < 4; ++b) {
    CircuitSpec spec = build_cswap_full(b & 1, b & 2);
    LogicalOperator op = extract_logical_operator(spec);
    branch_total += op.success;
    std::ostringstream d;
    d.setf(std::ios::scientific);
    d.precision(3);
    d << "distance " << operator_distance(op.u, fredkin_matrix())
      << ", success " << op.success;
    line("cswap-full branch " + std::to_string(b),
         operator_distance(op.u, fredkin_matrix()) < 1e-9 &&
             std::abs(op.success - 1.0 / 648.0) < 1e-9,
         false, d.str());
  }
  line("cswap-full branch sum", std::abs(branch_total - 1.0 / 162.0) < 1e-9,
       false, "total success 1/162");
  check_gate("ppbs-cnot ideal", build_ppbs_cnot(), cnot_matrix(), 1.0 / 9.0,
             false);
  {
    LogicalOperator half = extract_logical_operator(build_partial_swap(M_PI / 2));
    MatrixXcd sq = half.u * half.u;
    line("partial-swap sqrt composition",
         operator_distance(sq, swap_matrix()) < 1e-7, false,
         "sqrt(SWAP)^2 = SWAP up to phase");
  }
  ValidationReport report;
  report.ok = ok;
  report.text = os.str() + (ok ? "all checks passed\n" : "FAILURES present\n");
  return report;
}

// ------------------------------------------------------------------ results

std::string ScenarioResult::counts_csv() const {
  return count_records_to_csv(counts);
}

std::string ScenarioResult::to_json() const {
  json j;
  j["scenario"] = json::parse(scenario.to_json());
  j["report"] = json::parse(report.to_json());
  json truth_json;
  truth_json["labels"] = truth.labels;
  json probs = json::array(), sigmas = json::array();
  for (int i = 0; i < truth.probs.rows(); ++i) {
    json prow = json::array(), srow = json::array();
    for (int k = 0; k < truth.probs.cols(); ++k) {
      prow.push_back(truth.probs(i, k));
      srow.push_back(truth.sigmas(i, k));
    }
    probs.push_back(prow);
    sigmas.push_back(srow);
  }
  truth_json["probs"] = probs;
  truth_json["sigmas"] = sigmas;
  j["truth_table"] = truth_json;
  j["success_per_input"] = success_per_input;
  j["warnings"] = warnings;
  return j.dump(2);
}

std::string ScenarioResult::to_text() const {
  std::ostringstream os;
  os << "scenario: " << scenario.name << '\n' << report.to_text();
  os.setf(std::ios::fixed);
  os.precision(4);
  os << "truth table (rows = inputs, cols = outputs):\n";
  for (size_t i = 0; i < truth.labels.size(); ++i) {
    os << "  " << truth.labels[i] << " |";
    for (size_t k = 0; k < truth.labels.size(); ++k)
      os << ' ' << truth.probs(static_cast<int>(i), static_cast<int>(k));
    os << '\n';
  }
  os << "success probability per input:\n";
  os.setf(std::ios::scientific, std::ios::floatfield);
  os.precision(4);
  for (const auto& [input, p] : success_per_input)
    os << "  " << input << ": " << p << '\n';
  for (const std::string& w : warnings) os << "warning: " << w << '\n';
  return os.str();
}

}  // namespace loqs
