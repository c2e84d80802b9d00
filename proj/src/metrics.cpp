#include "loqs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace loqs {

namespace {

const double kPi = 3.14159265358979323846;

Eigen::MatrixXcd kron3(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b,
                       const Eigen::Matrix2cd& c) {
  Eigen::MatrixXcd ab = Eigen::MatrixXcd::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) ab.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  Eigen::MatrixXcd abc = Eigen::MatrixXcd::Zero(8, 8);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) abc.block<2, 2>(2 * i, 2 * j) = ab(i, j) * c;
  return abc;
}

void check_density(const MatrixXcd& rho) {
  if (rho.rows() != rho.cols())
    throw std::invalid_argument("density matrix must be square");
  if ((rho - rho.adjoint()).norm() > 1e-8)
    throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(rho.trace() - cplx(1.0)) > 1e-8)
    throw std::invalid_argument("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho);
  if (es.eigenvalues().minCoeff() < -1e-8)
    throw std::invalid_argument("density matrix is not PSD");
}

ValueWithError clamp01(ValueWithError v, int& clamps) {
  if (v.value < 0.0 || v.value > 1.0) {
    v.value = std::clamp(v.value, 0.0, 1.0);
    ++clamps;
  }
  return v;
}

}  // namespace

TruthTable TruthTable::from_counts(
    const std::map<std::string, std::map<std::string, std::int64_t>>&
        counts) {
  std::set<std::string> label_set;
  for (const auto& [input, row] : counts) {
    label_set.insert(input);
    for (const auto& [outcome, _] : row) label_set.insert(outcome);
  }
  TruthTable tt;
  tt.labels.assign(label_set.begin(), label_set.end());
  const int n = static_cast<int>(tt.labels.size());
  tt.probs = Eigen::MatrixXd::Zero(n, n);
  tt.sigmas = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    auto it = counts.find(tt.labels[r]);
    if (it == counts.end())
      throw std::invalid_argument("missing counts for input " + tt.labels[r]);
    double total = 0.0;
    for (const auto& [_, c] : it->second) total += static_cast<double>(c);
    if (total <= 0.0)
      throw std::invalid_argument("input " + tt.labels[r] +
                                  " has zero total counts");
    for (int c = 0; c < n; ++c) {
      auto jt = it->second.find(tt.labels[c]);
      double p = jt == it->second.end()
                     ? 0.0
                     : static_cast<double>(jt->second) / total;
      tt.probs(r, c) = p;
      tt.sigmas(r, c) = std::sqrt(p * (1.0 - p) / total);
    }
  }
  return tt;
}

ValueWithError truth_table_fidelity(
    const TruthTable& tt, const std::map<std::string, std::string>& ideal) {
  const int n = static_cast<int>(tt.labels.size());
  auto col = [&](const std::string& label) {
    auto it = std::find(tt.labels.begin(), tt.labels.end(), label);
    if (it == tt.labels.end())
      throw std::invalid_argument("unknown truth table label " + label);
    return static_cast<int>(it - tt.labels.begin());
  };
  double sum = 0.0, var = 0.0;
  for (int r = 0; r < n; ++r) {
    int c = col(ideal.at(tt.labels[r]));
    sum += tt.probs(r, c);
    var += tt.sigmas(r, c) * tt.sigmas(r, c);
  }
  return {sum / n, std::sqrt(var) / n};
}

std::map<std::string, std::string> fredkin_truth_map() {
  std::map<std::string, std::string> m;
  for (int i = 0; i < 8; ++i) {
    int c = (i >> 2) & 1, t1 = (i >> 1) & 1, t2 = i & 1;
    int o = c ? (c << 2) | (t2 << 1) | t1 : i;
    auto label = [](int v) {
      std::string s(3, '0');
      for (int b = 0; b < 3; ++b)
        if (v & (1 << (2 - b))) s[b] = '1';
      return s;
    };
    m[label(i)] = label(o);
  }
  return m;
}

Eigen::Matrix2cd s_operator(double phi) {
  Eigen::Matrix2cd s;
  s << 0.0, std::exp(cplx(0, -phi)), std::exp(cplx(0, phi)), 0.0;
  return s;
}

MatrixXcd m_operator(int which) {
  if (which == 0) {
    MatrixXcd m = MatrixXcd::Zero(8, 8);
    m(2, 2) = m(5, 5) = 1.0;
    return m;
  }
  auto phis = m_setting_phis(which);
  MatrixXcd m =
      kron3(s_operator(phis[0]), s_operator(phis[1]), s_operator(phis[2]));
  return which == 1 ? MatrixXcd(-m) : m;
}

std::array<double, 3> m_setting_phis(int which) {
  switch (which) {
    case 1: return {-kPi / 3, kPi / 3, -kPi / 3};
    case 2: return {-2 * kPi / 3, 2 * kPi / 3, -2 * kPi / 3};
    case 3: return {0.0, 0.0, 0.0};
  }
  throw std::invalid_argument("m operator index must be 1..3");
}

std::array<double, 8> m_sign_pattern(int which) {
  MatrixXcd m = m_operator(which);
  auto phis = m_setting_phis(which);
  std::array<double, 8> signs{};
  for (int bits = 0; bits < 8; ++bits) {
    // Outcome eigenvector in the analyzer convention: bit 0 is the +1
    // eigenstate (|0> + e^{i phi}|1>)/sqrt(2) of S(phi).
    VectorXcd psi = VectorXcd::Ones(1);
    for (int q = 0; q < 3; ++q) {
      int b = (bits >> (2 - q)) & 1;
      Eigen::Vector2cd v(std::sqrt(0.5),
                         (b ? -1.0 : 1.0) * std::sqrt(0.5) *
                             std::exp(cplx(0, phis[q])));
      VectorXcd next(psi.size() * 2);
      for (int i = 0; i < psi.size(); ++i) {
        next(2 * i) = psi(i) * v(0);
        next(2 * i + 1) = psi(i) * v(1);
      }
      psi = next;
    }
    cplx e = (psi.adjoint() * m * psi)(0);
    double s = e.real();
    if (std::abs(std::abs(s) - 1.0) > 1e-10 || std::abs(e.imag()) > 1e-10)
      throw std::logic_error("analyzer states are not M eigenstates");
    signs[bits] = s > 0 ? 1.0 : -1.0;
  }
  return signs;
}

CorrelationResult m_correlations(
    const std::map<std::string, SettingDistribution>& settings) {
  auto get = [&](const std::string& key) -> const SettingDistribution& {
    auto it = settings.find(key);
    if (it == settings.end())
      throw std::invalid_argument("missing measurement setting " + key);
    return it->second;
  };
  auto prob = [](const SettingDistribution& d, const std::string& outcome) {
    auto it = d.probs.find(outcome);
    return it == d.probs.end() ? 0.0 : it->second;
  };
  auto sig = [](const SettingDistribution& d, const std::string& outcome) {
    auto it = d.sigmas.find(outcome);
    return it == d.sigmas.end() ? 0.0 : it->second;
  };
  auto label = [](int bits) {
    std::string s(3, '0');
    for (int b = 0; b < 3; ++b)
      if (bits & (1 << (2 - b))) s[b] = '1';
    return s;
  };

  CorrelationResult res;
  const SettingDistribution& z = get("m0");
  res.m0.value = prob(z, "010") + prob(z, "101");
  res.m0.sigma = std::hypot(sig(z, "010"), sig(z, "101"));
  ValueWithError* out[3] = {&res.m1, &res.m2, &res.m3};
  for (int which = 1; which <= 3; ++which) {
    const SettingDistribution& d = get("m" + std::to_string(which));
    auto signs = m_sign_pattern(which);
    double v = 0.0, var = 0.0;
    for (int bits = 0; bits < 8; ++bits) {
      std::string l = label(bits);
      v += signs[bits] * prob(d, l);
      var += sig(d, l) * sig(d, l);
    }
    out[which - 1]->value = v;
    out[which - 1]->sigma = std::sqrt(var);
  }
  return res;
}

ValueWithError coherence_C(const CorrelationResult& corr) {
  double v = (corr.m1.value + corr.m2.value + corr.m3.value) / 3.0;
  double s = std::sqrt(corr.m1.sigma * corr.m1.sigma +
                       corr.m2.sigma * corr.m2.sigma +
                       corr.m3.sigma * corr.m3.sigma) /
             3.0;
  return {v, s};
}

double coherence_from_rho(const MatrixXcd& rho) {
  if (rho.rows() != 8 || rho.cols() != 8)
    throw std::invalid_argument("coherence route needs an 8x8 matrix");
  return 2.0 * rho(2, 5).real();
}

EntanglementClass entanglement_class(double c) {
  if (c > 0.5) return EntanglementClass::RequiresGenuineTripartite;
  if (c > 0.25) return EntanglementClass::RequiresBipartite;
  return EntanglementClass::ConsistentWithSeparable;
}

const char* entanglement_class_name(EntanglementClass cls) {
  switch (cls) {
    case EntanglementClass::ConsistentWithSeparable:
      return "consistent-with-separable";
    case EntanglementClass::RequiresBipartite:
      return "requires-bipartite";
    case EntanglementClass::RequiresGenuineTripartite:
      return "requires-genuine-tripartite";
  }
  return "?";
}

ValueWithError ghz_fidelity(const ValueWithError& m0,
                            const ValueWithError& c) {
  return {(m0.value + c.value) / 2.0, std::hypot(m0.sigma, c.sigma) / 2.0};
}

ValueWithError process_fidelity_estimate(const ValueWithError& f_zzz,
                                         const ValueWithError& c) {
  return {(f_zzz.value + c.value) / 2.0,
          std::hypot(f_zzz.sigma, c.sigma) / 2.0};
}

double state_fidelity(const MatrixXcd& rho, const VectorXcd& target) {
  check_density(rho);
  if (target.size() != rho.rows())
    throw std::invalid_argument("target dimension mismatch");
  return (target.adjoint() * rho * target)(0).real();
}

double concurrence(const Eigen::Matrix4cd& rho) {
  check_density(rho);
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = -1, yy(1, 2) = 1, yy(2, 1) = 1, yy(3, 0) = -1;
  Eigen::Matrix4cd r = rho * yy * rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(r);
  std::vector<double> lams;
  for (int i = 0; i < 4; ++i)
    lams.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i).real())));
  std::sort(lams.begin(), lams.end(), std::greater<>());
  return std::max(0.0, lams[0] - lams[1] - lams[2] - lams[3]);
}

double gaussian_confidence(double c, double sigma, double threshold) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  if (sigma == 0.0) {
    if (c > threshold) return 1.0;
    return c < threshold ? 0.0 : 0.5;
  }
  return 0.5 * std::erfc((threshold - c) / (sigma * std::sqrt(2.0)));
}

double bootstrap_sigma(
    const std::vector<std::int64_t>& counts,
    const std::function<double(const std::vector<double>&)>& statistic,
    int replicas, std::uint64_t seed) {
  if (replicas < 2) throw std::invalid_argument("need >= 2 replicas");
  std::int64_t total = 0;
  for (std::int64_t c : counts) total += c;
  if (total <= 0) throw std::invalid_argument("empty counts");
  std::mt19937_64 rng(seed);
  std::vector<double> values(replicas);
  std::vector<double> freq(counts.size());
  for (int r = 0; r < replicas; ++r) {
    std::int64_t remaining = total;
    double mass = 1.0;
    for (size_t i = 0; i < counts.size(); ++i) {
      double p = static_cast<double>(counts[i]) / total;
      std::int64_t n = 0;
      if (remaining > 0 && mass > 0.0) {
        double q = std::min(1.0, p / mass);
        n = std::binomial_distribution<std::int64_t>(remaining, q)(rng);
      }
      freq[i] = static_cast<double>(n) / total;
      remaining -= n;
      mass -= p;
    }
    values[r] = statistic(freq);
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= replicas;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return std::sqrt(var / (replicas - 1));
}

MetricsReport make_metrics_report(const ValueWithError& f_zzz,
                                  const CorrelationResult& corr,
                                  bool subtracted) {
  MetricsReport rep;
  rep.correlations = corr;
  rep.subtracted = subtracted;
  ValueWithError c = coherence_C(corr);
  rep.coherence = c;
  rep.f_zzz = clamp01(f_zzz, rep.clamp_events);
  rep.f_ghz = clamp01(ghz_fidelity(corr.m0, c), rep.clamp_events);
  rep.f_process =
      clamp01(process_fidelity_estimate(rep.f_zzz, c), rep.clamp_events);
  rep.verdict = entanglement_class(c.value);
  return rep;
}

std::string MetricsReport::to_json() const {
  nlohmann::json j;
  auto put = [&](const char* name, const ValueWithError& v) {
    j[name] = {{"value", v.value}, {"sigma", v.sigma}};
  };
  put("f_zzz", f_zzz);
  put("coherence", coherence);
  put("f_process", f_process);
  put("f_ghz", f_ghz);
  put("m0", correlations.m0);
  put("m1", correlations.m1);
  put("m2", correlations.m2);
  put("m3", correlations.m3);
  j["entanglement"] = entanglement_class_name(verdict);
  j["subtracted"] = subtracted;
  j["clamp_events"] = clamp_events;
  return j.dump(2);
}

std::string MetricsReport::to_text() const {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  auto line = [&](const char* name, const ValueWithError& v) {
    os << name << " = " << v.value << " +- " << v.sigma << '\n';
  };
  line("F_zzz     ", f_zzz);
  line("<M0>      ", correlations.m0);
  line("<M1>      ", correlations.m1);
  line("<M2>      ", correlations.m2);
  line("<M3>      ", correlations.m3);
  line("C         ", coherence);
  line("F_GHZ     ", f_ghz);
  line("F_process ", f_process);
  os << "entanglement: " << entanglement_class_name(verdict)
     << (subtracted ? " (subtracted)" : " (raw)") << '\n';
  if (clamp_events) os << "clamped values: " << clamp_events << '\n';
  return os.str();
}

}  // namespace loqs
