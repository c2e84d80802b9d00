#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "loqs/fock.hpp"
#include "loqs/measurement.hpp"

namespace loqs {

/// Two-qubit Pauli tomography data: outcome frequencies per basis pair
/// ("XX".."ZZ", outcomes 00..11 with bit 0 = +1 eigenstate). shots = 0
/// marks exact Born frequencies.
struct TomographyDataset {
  std::map<std::string, std::array<double, 4>> frequencies;
  std::int64_t shots = 0;
  std::uint64_t seed = 0;

  std::vector<CountRecord> to_records() const;
  static TomographyDataset from_records(const std::vector<CountRecord>& recs);
};

/// Born-rule sampling of all 9 Pauli basis pairs; shots = 0 stores exact
/// probabilities, otherwise deterministic multinomial counts per setting.
TomographyDataset simulate_tomography(const Eigen::Matrix4cd& rho,
                                      std::int64_t shots, std::uint64_t seed);

/// Linear inversion rho = 1/4 sum <sigma_i x sigma_j> sigma_i x sigma_j.
/// Hermitian with unit trace by construction; may be non-PSD for finite
/// counts (check with min_eigenvalue).
Eigen::Matrix4cd reconstruct_linear(const TomographyDataset& data);

double min_eigenvalue(const Eigen::Matrix4cd& m);

/// Frobenius-nearest PSD trace-1 matrix: eigenvalues projected onto the
/// probability simplex in the matrix's own eigenbasis.
Eigen::Matrix4cd project_psd(const Eigen::Matrix4cd& rho_raw);

/// Optional iterative refinement (R rho R fixed point) starting from the
/// PSD-projected linear estimate.
Eigen::Matrix4cd reconstruct_ml(const TomographyDataset& data,
                                int iterations = 200);

}  // namespace loqs
