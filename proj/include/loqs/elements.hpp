#pragma once

#include <map>
#include <string>
#include <vector>

#include "loqs/fock.hpp"

namespace loqs {

enum class ElementKind {
  BS,
  PPBS,
  PBS,
  HWP,
  QWP,
  PhasePlate,
  Mirror,
  PolarizationRotation,
  Swap,  // port relabeling; models "reflection continues the beam" geometry
};

std::string element_kind_name(ElementKind k);
ElementKind element_kind_from_name(const std::string& name);

/// One optical element bound to spatial ports. Parameter names:
///   BS: R            PPBS: R_H, R_V      Mirror: R_H, R_V
///   HWP/QWP/PolarizationRotation: theta  PhasePlate: phi
struct ElementSpec {
  ElementKind kind;
  std::map<std::string, double> params;
  std::vector<std::string> ports;

  double param(const std::string& name) const;
};

/// Expands an element to a transfer matrix on the full registry. Acts
/// identically on every internal distinguishability label.
TransferMatrix element_matrix(const RegistryPtr& reg, const ElementSpec& spec);

// Convenience builders (validate parameters, fill the spec).
ElementSpec beam_splitter(double R, const std::string& a,
                          const std::string& b);
ElementSpec ppbs(double R_H, double R_V, const std::string& a,
                 const std::string& b);
ElementSpec pbs(const std::string& a, const std::string& b);
ElementSpec half_wave_plate(double theta, const std::string& port);
ElementSpec quarter_wave_plate(double theta, const std::string& port);
ElementSpec phase_plate(double phi, const std::string& port);
ElementSpec lossy_mirror(double R_H, double R_V, const std::string& port);
ElementSpec polarization_rotation(double theta, const std::string& port);
ElementSpec port_swap(const std::string& a, const std::string& b);

/// Jones matrices on (H, V) for the single-port elements.
Eigen::Matrix2cd jones_hwp(double theta);
Eigen::Matrix2cd jones_qwp(double theta);

}  // namespace loqs
