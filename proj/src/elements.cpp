#include "loqs/elements.hpp"

#include <cmath>

namespace loqs {

namespace {

const std::map<std::string, ElementKind> kKindNames = {
    {"bs", ElementKind::BS},
    {"ppbs", ElementKind::PPBS},
    {"pbs", ElementKind::PBS},
    {"hwp", ElementKind::HWP},
    {"qwp", ElementKind::QWP},
    {"phase_plate", ElementKind::PhasePlate},
    {"mirror", ElementKind::Mirror},
    {"polarization_rotation", ElementKind::PolarizationRotation},
    {"swap", ElementKind::Swap},
};

void check_reflectivity(double r, const char* name) {
  if (!(r >= 0.0 && r <= 1.0))
    throw std::invalid_argument(std::string(name) + " must be in [0, 1], got " +
                                std::to_string(r));
}

// Writes a 2x2 coupling between two modes into an identity-initialized u.
void couple(MatrixXcd& u, int i, int j, const Eigen::Matrix2cd& block) {
  u(i, i) = block(0, 0);
  u(i, j) = block(0, 1);
  u(j, i) = block(1, 0);
  u(j, j) = block(1, 1);
}

Eigen::Matrix2cd bs_block(double R) {
  Eigen::Matrix2cd b;
  double t = std::sqrt(1.0 - R), r = std::sqrt(R);
  b << t, cplx(0, r), cplx(0, r), t;
  return b;
}

}  // namespace

std::string element_kind_name(ElementKind k) {
  for (const auto& [name, kind] : kKindNames)
    if (kind == k) return name;
  throw std::logic_error("unnamed element kind");
}

ElementKind element_kind_from_name(const std::string& name) {
  auto it = kKindNames.find(name);
  if (it == kKindNames.end())
    throw std::invalid_argument("unknown element kind: " + name);
  return it->second;
}

double ElementSpec::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end())
    throw std::invalid_argument("element missing parameter " + name);
  return it->second;
}

Eigen::Matrix2cd jones_hwp(double theta) {
  Eigen::Matrix2cd j;
  double c = std::cos(2 * theta), s = std::sin(2 * theta);
  j << c, s, s, -c;
  return j;
}

Eigen::Matrix2cd jones_qwp(double theta) {
  // Retarder diag(1, -i) rotated to fast-axis angle theta; the e^{-i pi/4}
  // global phase is dropped. QWP(45 deg) maps |H> to (|H> + i|V>)/sqrt(2)
  // up to global phase.
  double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2cd j;
  j << cplx(c * c, -s * s), cplx(s * c, s * c), cplx(s * c, s * c),
      cplx(s * s, -c * c);
  return j;
}

TransferMatrix element_matrix(const RegistryPtr& reg,
                              const ElementSpec& spec) {
  MatrixXcd u = MatrixXcd::Identity(reg->size(), reg->size());
  const int labels = reg->n_internal();

  auto idx = [&](const std::string& port, Pol pol, int label) {
    return reg->index(port, pol, label);
  };

  switch (spec.kind) {
    case ElementKind::BS: {
      double R = spec.param("R");
      check_reflectivity(R, "R");
      for (int l = 0; l < labels; ++l)
        for (Pol p : {Pol::H, Pol::V})
          couple(u, idx(spec.ports.at(0), p, l), idx(spec.ports.at(1), p, l),
                 bs_block(R));
      break;
    }
    case ElementKind::PPBS: {
      double rh = spec.param("R_H"), rv = spec.param("R_V");
      check_reflectivity(rh, "R_H");
      check_reflectivity(rv, "R_V");
      for (int l = 0; l < labels; ++l) {
        couple(u, idx(spec.ports.at(0), Pol::H, l),
               idx(spec.ports.at(1), Pol::H, l), bs_block(rh));
        couple(u, idx(spec.ports.at(0), Pol::V, l),
               idx(spec.ports.at(1), Pol::V, l), bs_block(rv));
      }
      break;
    }
    case ElementKind::PBS: {
      // H transmits, V reflects with phase i (R=1 beam splitter on V).
      for (int l = 0; l < labels; ++l)
        couple(u, idx(spec.ports.at(0), Pol::V, l),
               idx(spec.ports.at(1), Pol::V, l), bs_block(1.0));
      break;
    }
    case ElementKind::HWP:
    case ElementKind::QWP: {
      double theta = spec.param("theta");
      Eigen::Matrix2cd j = spec.kind == ElementKind::HWP ? jones_hwp(theta)
                                                         : jones_qwp(theta);
      for (int l = 0; l < labels; ++l)
        couple(u, idx(spec.ports.at(0), Pol::H, l),
               idx(spec.ports.at(0), Pol::V, l), j);
      break;
    }
    case ElementKind::PhasePlate: {
      cplx f = std::exp(cplx(0, spec.param("phi")));
      for (int l = 0; l < labels; ++l)
        for (Pol p : {Pol::H, Pol::V}) {
          int i = idx(spec.ports.at(0), p, l);
          u(i, i) = f;
        }
      break;
    }
    case ElementKind::Mirror: {
      double rh = spec.param("R_H"), rv = spec.param("R_V");
      check_reflectivity(rh, "R_H");
      check_reflectivity(rv, "R_V");
      for (int l = 0; l < labels; ++l) {
        u(idx(spec.ports.at(0), Pol::H, l), idx(spec.ports.at(0), Pol::H, l)) =
            std::sqrt(rh);
        u(idx(spec.ports.at(0), Pol::V, l), idx(spec.ports.at(0), Pol::V, l)) =
            std::sqrt(rv);
      }
      break;
    }
    case ElementKind::PolarizationRotation: {
      double theta = spec.param("theta");
      Eigen::Matrix2cd j;
      j << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
      for (int l = 0; l < labels; ++l)
        couple(u, idx(spec.ports.at(0), Pol::H, l),
               idx(spec.ports.at(0), Pol::V, l), j);
      break;
    }
    case ElementKind::Swap: {
      Eigen::Matrix2cd x;
      x << 0, 1, 1, 0;
      for (int l = 0; l < labels; ++l)
        for (Pol p : {Pol::H, Pol::V})
          couple(u, idx(spec.ports.at(0), p, l), idx(spec.ports.at(1), p, l),
                 x);
      break;
    }
  }
  return TransferMatrix::checked(std::move(u));
}

ElementSpec beam_splitter(double R, const std::string& a,
                          const std::string& b) {
  check_reflectivity(R, "R");
  return {ElementKind::BS, {{"R", R}}, {a, b}};
}

ElementSpec ppbs(double R_H, double R_V, const std::string& a,
                 const std::string& b) {
  check_reflectivity(R_H, "R_H");
  check_reflectivity(R_V, "R_V");
  return {ElementKind::PPBS, {{"R_H", R_H}, {"R_V", R_V}}, {a, b}};
}

ElementSpec pbs(const std::string& a, const std::string& b) {
  return {ElementKind::PBS, {}, {a, b}};
}

ElementSpec half_wave_plate(double theta, const std::string& port) {
  return {ElementKind::HWP, {{"theta", theta}}, {port}};
}

ElementSpec quarter_wave_plate(double theta, const std::string& port) {
  return {ElementKind::QWP, {{"theta", theta}}, {port}};
}

ElementSpec phase_plate(double phi, const std::string& port) {
  return {ElementKind::PhasePlate, {{"phi", phi}}, {port}};
}

ElementSpec lossy_mirror(double R_H, double R_V, const std::string& port) {
  check_reflectivity(R_H, "R_H");
  check_reflectivity(R_V, "R_V");
  return {ElementKind::Mirror, {{"R_H", R_H}, {"R_V", R_V}}, {port}};
}

ElementSpec polarization_rotation(double theta, const std::string& port) {
  return {ElementKind::PolarizationRotation, {{"theta", theta}}, {port}};
}

ElementSpec port_swap(const std::string& a, const std::string& b) {
  return {ElementKind::Swap, {}, {a, b}};
}

}  // namespace loqs
