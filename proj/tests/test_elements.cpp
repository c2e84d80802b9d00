#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "loqs/elements.hpp"

using namespace loqs;

namespace {

const double kPi = 3.14159265358979323846;

RegistryPtr two_port_reg() { return ModeRegistry::make({"A", "B"}); }

FockState one_photon(const RegistryPtr& reg, const std::string& port, Pol p) {
  return FockState::vacuum(reg).apply_creation({reg->index(port, p)});
}

cplx amp(const FockState& st, const std::string& port, Pol p) {
  Occupation occ(st.registry()->size(), 0);
  occ[st.registry()->index(port, p)] = 1;
  return st.amplitude(occ);
}

}  // namespace

TEST_CASE("ideal builders produce unitary matrices") {
  auto reg = two_port_reg();
  const ElementSpec specs[] = {
      beam_splitter(0.5, "A", "B"),    beam_splitter(0.0, "A", "B"),
      ppbs(1.0 / 3.0, 1.0, "A", "B"), pbs("A", "B"),
      half_wave_plate(0.3, "A"),       quarter_wave_plate(1.1, "A"),
      phase_plate(0.7, "A"),           lossy_mirror(1.0, 1.0, "A"),
      polarization_rotation(0.4, "A"), port_swap("A", "B"),
  };
  for (const auto& s : specs) {
    TransferMatrix m = element_matrix(reg, s);
    CHECK(m.unitary);
    CHECK((m.m.adjoint() * m.m - MatrixXcd::Identity(4, 4)).norm() < 1e-9);
  }
}

TEST_CASE("imperfect components: ppbs stays unitary, mirrors do not") {
  auto reg = two_port_reg();
  // A ppbs with off-nominal reflectivities is still a lossless coupling.
  CHECK(element_matrix(reg, ppbs(0.34, 0.98, "A", "B")).unitary);
  CHECK_FALSE(element_matrix(reg, lossy_mirror(0.99, 1.0, "A")).unitary);
}

TEST_CASE("ppbs with equal reflectivities degenerates to a beam splitter") {
  auto reg = two_port_reg();
  MatrixXcd a = element_matrix(reg, ppbs(0.5, 0.5, "A", "B")).m;
  MatrixXcd b = element_matrix(reg, beam_splitter(0.5, "A", "B")).m;
  CHECK((a - b).norm() == 0.0);
  MatrixXcd c = element_matrix(reg, ppbs(0.38, 0.38, "A", "B")).m;
  MatrixXcd d = element_matrix(reg, beam_splitter(0.38, "A", "B")).m;
  CHECK((c - d).norm() == 0.0);
}

TEST_CASE("beam splitter conventions") {
  auto reg = two_port_reg();
  TransferMatrix bs = element_matrix(reg, beam_splitter(0.5, "A", "B"));
  FockState out = evolve(one_photon(reg, "A", Pol::H), bs);
  CHECK(std::abs(amp(out, "A", Pol::H) - std::sqrt(0.5)) < 1e-12);
  CHECK(std::abs(amp(out, "B", Pol::H) - cplx(0, std::sqrt(0.5))) < 1e-12);
  // R = 0 is the identity.
  TransferMatrix id = element_matrix(reg, beam_splitter(0.0, "A", "B"));
  CHECK((id.m - MatrixXcd::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("pbs transmits H and reflects V with phase i") {
  auto reg = two_port_reg();
  TransferMatrix m = element_matrix(reg, pbs("A", "B"));
  FockState h_out = evolve(one_photon(reg, "A", Pol::H), m);
  CHECK(std::abs(amp(h_out, "A", Pol::H) - 1.0) < 1e-12);
  FockState v_out = evolve(one_photon(reg, "A", Pol::V), m);
  CHECK(std::abs(amp(v_out, "B", Pol::V) - cplx(0, 1)) < 1e-12);
  // Diagonal input splits 50/50 across the ports.
  FockState p_in = one_photon(reg, "A", Pol::H)
                       .scaled(std::sqrt(0.5))
                       .plus(one_photon(reg, "A", Pol::V).scaled(
                           std::sqrt(0.5)));
  FockState p_out = evolve(p_in, m);
  CHECK(std::abs(std::norm(amp(p_out, "A", Pol::H)) - 0.5) < 1e-12);
  CHECK(std::abs(std::norm(amp(p_out, "B", Pol::V)) - 0.5) < 1e-12);
}

TEST_CASE("wave plate Jones conventions") {
  // HWP at 22.5 degrees maps H to the plus-diagonal state.
  Eigen::Matrix2cd h = jones_hwp(kPi / 8);
  CHECK(std::abs(h(0, 0) - std::sqrt(0.5)) < 1e-12);
  CHECK(std::abs(h(1, 0) - std::sqrt(0.5)) < 1e-12);
  // HWP at 0 flips the sign of V.
  Eigen::Matrix2cd h0 = jones_hwp(0.0);
  CHECK(std::abs(h0(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(h0(1, 1) + 1.0) < 1e-12);
  // QWP at 45 degrees makes circular light from H, up to global phase.
  Eigen::Matrix2cd q = jones_qwp(kPi / 4);
  cplx ratio = q(1, 0) / q(0, 0);
  CHECK(std::abs(ratio - cplx(0, 1)) < 1e-12);
  CHECK(std::abs(std::norm(q(0, 0)) - 0.5) < 1e-12);
}

TEST_CASE("wave plate periodicity up to global phase") {
  for (double theta : {0.0, 0.2, kPi / 8, kPi / 4, 1.0}) {
    Eigen::Matrix2cd h2 = jones_hwp(theta) * jones_hwp(theta);
    CHECK((h2 - Eigen::Matrix2cd::Identity()).norm() < 1e-12);
    Eigen::Matrix2cd q = jones_qwp(theta);
    Eigen::Matrix2cd q4 = q * q * q * q;
    cplx phase = q4(0, 0);
    CHECK(std::abs(std::abs(phase) - 1.0) < 1e-12);
    CHECK((q4 / phase - Eigen::Matrix2cd::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("two quarter-wave plates make a half-wave plate") {
  for (double theta : {0.0, 0.35, kPi / 8}) {
    Eigen::Matrix2cd qq = jones_qwp(theta) * jones_qwp(theta);
    Eigen::Matrix2cd h = jones_hwp(theta);
    cplx phase = qq(0, 0) / h(0, 0);
    CHECK(std::abs(std::abs(phase) - 1.0) < 1e-12);
    CHECK((qq / phase - h).norm() < 1e-11);
  }
}

TEST_CASE("phase plate multiplies both polarizations") {
  auto reg = two_port_reg();
  TransferMatrix m = element_matrix(reg, phase_plate(0.9, "A"));
  cplx f = std::exp(cplx(0, 0.9));
  CHECK(std::abs(m.m(reg->index("A", Pol::H), reg->index("A", Pol::H)) - f) <
        1e-12);
  CHECK(std::abs(m.m(reg->index("A", Pol::V), reg->index("A", Pol::V)) - f) <
        1e-12);
  TransferMatrix id = element_matrix(reg, phase_plate(0.0, "A"));
  CHECK((id.m - MatrixXcd::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("lossy mirror attenuates per polarization") {
  auto reg = two_port_reg();
  TransferMatrix m = element_matrix(reg, lossy_mirror(0.99, 1.0, "A"));
  CHECK(std::abs(m.m(reg->index("A", Pol::H), reg->index("A", Pol::H)) -
                 std::sqrt(0.99)) < 1e-12);
  CHECK(std::abs(m.m(reg->index("A", Pol::V), reg->index("A", Pol::V)) - 1.0) <
        1e-12);
  // R_H = 0 removes H photons entirely.
  TransferMatrix dead = element_matrix(reg, lossy_mirror(0.0, 1.0, "A"));
  FockState out = evolve(one_photon(reg, "A", Pol::H), dead);
  CHECK(out.norm_sq() < 1e-15);
}

TEST_CASE("elements on disjoint ports commute") {
  auto reg = ModeRegistry::make({"A", "B", "C", "D"});
  TransferMatrix u1 = element_matrix(reg, beam_splitter(0.3, "A", "B"));
  TransferMatrix u2 = element_matrix(reg, ppbs(1.0 / 3.0, 1.0, "C", "D"));
  CHECK((u1.then(u2).m - u2.then(u1).m).norm() < 1e-12);
  TransferMatrix w1 = element_matrix(reg, half_wave_plate(0.4, "A"));
  TransferMatrix w2 = element_matrix(reg, quarter_wave_plate(0.2, "C"));
  CHECK((w1.then(w2).m - w2.then(w1).m).norm() < 1e-12);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(beam_splitter(1.2, "A", "B"), std::invalid_argument);
  CHECK_THROWS_AS(ppbs(-0.1, 0.5, "A", "B"), std::invalid_argument);
  CHECK_THROWS_AS(lossy_mirror(0.5, 1.5, "A"), std::invalid_argument);
  CHECK_THROWS_AS(element_kind_from_name("prism"), std::invalid_argument);
}

TEST_CASE("element kind names round-trip") {
  for (ElementKind k :
       {ElementKind::BS, ElementKind::PPBS, ElementKind::PBS, ElementKind::HWP,
        ElementKind::QWP, ElementKind::PhasePlate, ElementKind::Mirror,
        ElementKind::PolarizationRotation, ElementKind::Swap}) {
    CHECK(element_kind_from_name(element_kind_name(k)) == k);
  }
}

TEST_CASE("elements act identically on every internal label") {
  auto reg = ModeRegistry::make({"A", "B"}, 2);
  TransferMatrix m = element_matrix(reg, beam_splitter(0.5, "A", "B"));
  for (int l = 0; l < 2; ++l) {
    FockState in = FockState::vacuum(reg).apply_creation(
        {reg->index("A", Pol::H, l)});
    FockState out = evolve(in, m);
    Occupation stay(reg->size(), 0), cross(reg->size(), 0);
    stay[reg->index("A", Pol::H, l)] = 1;
    cross[reg->index("B", Pol::H, l)] = 1;
    CHECK(std::abs(out.amplitude(stay) - std::sqrt(0.5)) < 1e-12);
    CHECK(std::abs(out.amplitude(cross) - cplx(0, std::sqrt(0.5))) < 1e-12);
  }
}
