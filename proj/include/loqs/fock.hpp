#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace loqs {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

enum class Pol : int { H = 0, V = 1 };

inline const char* pol_name(Pol p) { return p == Pol::H ? "H" : "V"; }

/// One optical mode: a spatial port, a polarization, and a small integer
/// label used to model partial distinguishability between photon sources.
struct ModeKey {
  std::string port;
  Pol pol = Pol::H;
  int internal = 0;

  bool operator==(const ModeKey& o) const {
    return port == o.port && pol == o.pol && internal == o.internal;
  }
};

/// Assigns a stable dense index to every (port, polarization, internal)
/// triple. Frozen once states start referencing it.
class ModeRegistry {
 public:
  ModeRegistry() = default;

  /// Registers every polarization/internal combination for each port.
  static std::shared_ptr<const ModeRegistry> make(
      const std::vector<std::string>& ports, int n_internal = 1,
      int n_max = 6);

  int add(const std::string& port, Pol pol, int internal = 0);

  int index(const std::string& port, Pol pol, int internal = 0) const;
  bool has(const std::string& port, Pol pol, int internal = 0) const;
  const ModeKey& key(int idx) const { return modes_.at(idx); }
  int size() const { return static_cast<int>(modes_.size()); }
  int n_max() const { return n_max_; }
  int n_internal() const { return n_internal_; }
  const std::vector<std::string>& ports() const { return ports_; }

  /// All mode indices belonging to one spatial port.
  std::vector<int> port_modes(const std::string& port) const;

 private:
  std::vector<ModeKey> modes_;
  std::map<std::tuple<std::string, int, int>, int> lookup_;
  std::vector<std::string> ports_;
  int n_internal_ = 1;
  int n_max_ = 6;
};

using RegistryPtr = std::shared_ptr<const ModeRegistry>;

/// Photon occupation numbers, one entry per registered mode.
using Occupation = std::vector<uint8_t>;

struct OccupationHash {
  size_t operator()(const Occupation& occ) const {
    size_t h = 1469598103934665603ull;
    for (uint8_t c : occ) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return h;
  }
};

int total_photons(const Occupation& occ);

/// Mode transfer matrix acting on creation operators. `unitary` is a
/// checked claim, not a cache: set only when M^dag M = I holds.
struct TransferMatrix {
  MatrixXcd m;
  bool unitary = true;

  static TransferMatrix identity(int dim);
  /// Verifies singular values <= 1 and sets the unitary flag from M^dag M.
  static TransferMatrix checked(MatrixXcd m, double tol = 1e-9);

  TransferMatrix then(const TransferMatrix& next) const;
};

/// Sparse superposition over occupation vectors. Sub-normalized states are
/// legal; the missing norm is post-selection/loss probability.
class FockState {
 public:
  explicit FockState(RegistryPtr reg) : reg_(std::move(reg)) {}

  static FockState vacuum(RegistryPtr reg);

  const RegistryPtr& registry() const { return reg_; }
  const std::unordered_map<Occupation, cplx, OccupationHash>& terms() const {
    return terms_;
  }

  void add_term(const Occupation& occ, cplx amp);
  cplx amplitude(const Occupation& occ) const;
  double norm_sq() const;
  size_t term_count() const { return terms_.size(); }

  FockState scaled(cplx factor) const;
  FockState plus(const FockState& other) const;
  /// Drops terms with |amp| below the threshold (default 1e-14).
  void prune(double threshold = 1e-14);

  /// Applies a product of creation operators (mode index, count) to each
  /// term, with bosonic sqrt factors.
  FockState apply_creation(const std::vector<int>& modes) const;

  std::string to_json() const;
  static FockState from_json(const std::string& text, RegistryPtr reg);

 private:
  RegistryPtr reg_;
  std::unordered_map<Occupation, cplx, OccupationHash> terms_;
};

/// Matrix permanent by Ryser's inclusion-exclusion with Gray-code updates.
/// Empty matrix returns 1.
cplx permanent(const MatrixXcd& m);

/// Evolves a state through a transfer matrix using per-transition matrix
/// permanents: amp(m|n) = Per(U[m|n]) / sqrt(prod n_i! prod m_j!).
FockState evolve_permanent(const FockState& state, const TransferMatrix& u);

/// Same map computed by rewriting each creation operator as a sum over
/// output modes and expanding the product. Cross-validates evolve_permanent.
FockState evolve_sequential(const FockState& state, const TransferMatrix& u);

/// Default evolution path (sequential substitution).
inline FockState evolve(const FockState& state, const TransferMatrix& u) {
  return evolve_sequential(state, u);
}

cplx inner_product(const FockState& a, const FockState& b);

/// Raised when a state would exceed the registry's photon cap.
class TruncationError : public std::runtime_error {
 public:
  explicit TruncationError(const std::string& what)
      : std::runtime_error(what) {}
};

double factorial(int n);

}  // namespace loqs
