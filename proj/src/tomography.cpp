#include "loqs/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace loqs {

namespace {

const char kAxes[3] = {'X', 'Y', 'Z'};

Eigen::Matrix2cd pauli(char axis) {
  Eigen::Matrix2cd m;
  switch (axis) {
    case 'X': m << 0, 1, 1, 0; return m;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; return m;
    case 'Z': m << 1, 0, 0, -1; return m;
  }
  throw std::invalid_argument("unknown Pauli axis");
}

/// Projector onto the (+1 if bit == 0 else -1) eigenspace.
Eigen::Matrix2cd pauli_projector(char axis, int bit) {
  double sign = bit ? -1.0 : 1.0;
  return (Eigen::Matrix2cd::Identity() + sign * pauli(axis)) / 2.0;
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return m;
}

const std::array<std::string, 4> kOutcomes = {"00", "01", "10", "11"};

}  // namespace

std::vector<CountRecord> TomographyDataset::to_records() const {
  std::vector<CountRecord> recs;
  for (const auto& [setting, freq] : frequencies)
    for (int o = 0; o < 4; ++o) {
      std::int64_t scale = shots > 0 ? shots : 1000000000;
      recs.push_back({setting, kOutcomes[o],
                      std::llround(freq[o] * static_cast<double>(scale)),
                      scale, seed});
    }
  return recs;
}

TomographyDataset TomographyDataset::from_records(
    const std::vector<CountRecord>& recs) {
  TomographyDataset data;
  std::map<std::string, std::int64_t> totals;
  for (const CountRecord& r : recs) {
    auto it = std::find(kOutcomes.begin(), kOutcomes.end(), r.outcome);
    if (it == kOutcomes.end())
      throw std::invalid_argument("bad tomography outcome " + r.outcome);
    data.frequencies.try_emplace(r.setting_id, std::array<double, 4>{});
    data.frequencies[r.setting_id][it - kOutcomes.begin()] +=
        static_cast<double>(r.count);
    totals[r.setting_id] += r.count;
    data.shots = r.shots;
    data.seed = r.seed;
  }
  for (auto& [setting, freq] : data.frequencies) {
    if (totals[setting] <= 0)
      throw std::invalid_argument("empty tomography setting " + setting);
    for (double& f : freq) f /= static_cast<double>(totals[setting]);
  }
  return data;
}

TomographyDataset simulate_tomography(const Eigen::Matrix4cd& rho,
                                      std::int64_t shots,
                                      std::uint64_t seed) {
  if ((rho - rho.adjoint()).norm() > 1e-8 ||
      std::abs(rho.trace() - cplx(1.0)) > 1e-8)
    throw std::invalid_argument("tomography input is not a density matrix");
  TomographyDataset data;
  data.shots = shots;
  data.seed = seed;
  for (char a : kAxes)
    for (char b : kAxes) {
      std::string setting{a, b};
      std::map<std::string, double> probs;
      for (int o = 0; o < 4; ++o) {
        Eigen::Matrix4cd proj =
            kron(pauli_projector(a, o >> 1), pauli_projector(b, o & 1));
        probs[kOutcomes[o]] = std::max(0.0, (rho * proj).trace().real());
      }
      std::array<double, 4> freq{};
      if (shots > 0) {
        for (const CountRecord& r : sample_counts(setting, probs, shots, seed))
          freq[std::find(kOutcomes.begin(), kOutcomes.end(), r.outcome) -
               kOutcomes.begin()] =
              static_cast<double>(r.count) / static_cast<double>(shots);
      } else {
        for (int o = 0; o < 4; ++o) freq[o] = probs[kOutcomes[o]];
      }
      data.frequencies[setting] = freq;
    }
  return data;
}

Eigen::Matrix4cd reconstruct_linear(const TomographyDataset& data) {
  for (char a : kAxes)
    for (char b : kAxes)
      if (!data.frequencies.count(std::string{a, b}))
        throw std::invalid_argument(std::string("missing setting ") + a + b);

  auto corr = [&](const std::string& setting, bool first, bool second) {
    const auto& f = data.frequencies.at(setting);
    double v = 0.0;
    for (int o = 0; o < 4; ++o) {
      double sign = 1.0;
      if (first && (o >> 1)) sign = -sign;
      if (second && (o & 1)) sign = -sign;
      v += sign * f[o];
    }
    return v;
  };

  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Identity() / 4.0;
  for (char a : kAxes)
    for (char b : kAxes)
      rho += corr(std::string{a, b}, true, true) / 4.0 *
             kron(pauli(a), pauli(b));
  // Single-qubit terms: marginals averaged over the partner's settings.
  for (char a : kAxes) {
    double m1 = 0.0, m2 = 0.0;
    for (char b : kAxes) {
      m1 += corr(std::string{a, b}, true, false) / 3.0;
      m2 += corr(std::string{b, a}, false, true) / 3.0;
    }
    rho += m1 / 4.0 * kron(pauli(a), Eigen::Matrix2cd::Identity());
    rho += m2 / 4.0 * kron(Eigen::Matrix2cd::Identity(), pauli(a));
  }
  return (rho + rho.adjoint()) / 2.0;
}

double min_eigenvalue(const Eigen::Matrix4cd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd>(m)
      .eigenvalues()
      .minCoeff();
}

Eigen::Matrix4cd project_psd(const Eigen::Matrix4cd& rho_raw) {
  if ((rho_raw - rho_raw.adjoint()).norm() > 1e-8)
    throw std::invalid_argument("project_psd needs a Hermitian input");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho_raw);
  Eigen::Vector4d e = es.eigenvalues();
  // Projection onto the probability simplex (sorted-threshold rule).
  std::array<double, 4> sorted{e(0), e(1), e(2), e(3)};
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  int k = 0;
  for (int i = 0; i < 4; ++i) {
    cum += sorted[i];
    double t = (cum - 1.0) / (i + 1);
    if (sorted[i] - t > 0) {
      theta = t;
      k = i + 1;
    }
  }
  (void)k;
  Eigen::Vector4d clipped;
  for (int i = 0; i < 4; ++i) clipped(i) = std::max(0.0, e(i) - theta);
  return es.eigenvectors() * clipped.asDiagonal() *
         es.eigenvectors().adjoint();
}

Eigen::Matrix4cd reconstruct_ml(const TomographyDataset& data,
                                int iterations) {
  Eigen::Matrix4cd rho = project_psd(reconstruct_linear(data));
  // Mix in a little identity so zero eigenvalues can move.
  rho = 0.99 * rho + 0.01 * Eigen::Matrix4cd::Identity() / 4.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::Matrix4cd r = Eigen::Matrix4cd::Zero();
    for (const auto& [setting, freq] : data.frequencies)
      for (int o = 0; o < 4; ++o) {
        if (freq[o] <= 0.0) continue;
        Eigen::Matrix4cd proj =
            kron(pauli_projector(setting[0], o >> 1),
                 pauli_projector(setting[1], o & 1));
        double p = (rho * proj).trace().real();
        if (p > 1e-12) r += freq[o] / p * proj;
      }
    Eigen::Matrix4cd next = r * rho * r;
    next /= next.trace();
    if ((next - rho).norm() < 1e-12) return next;
    rho = next;
  }
  return rho;
}

}  // namespace loqs
