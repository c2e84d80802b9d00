#include "loqs/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace loqs {

using json = nlohmann::json;

double factorial(int n) {
  static const double table[] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320,
                                 362880, 3628800, 39916800, 479001600};
  if (n < 0) throw std::invalid_argument("factorial of negative number");
  if (n < 13) return table[n];
  double r = table[12];
  for (int k = 13; k <= n; ++k) r *= k;
  return r;
}

int total_photons(const Occupation& occ) {
  int t = 0;
  for (uint8_t c : occ) t += c;
  return t;
}

// ---------------------------------------------------------------- registry

std::shared_ptr<const ModeRegistry> ModeRegistry::make(
    const std::vector<std::string>& ports, int n_internal, int n_max) {
  auto reg = std::make_shared<ModeRegistry>();
  reg->n_internal_ = n_internal;
  reg->n_max_ = n_max;
  for (const auto& p : ports)
    for (int label = 0; label < n_internal; ++label) {
      reg->add(p, Pol::H, label);
      reg->add(p, Pol::V, label);
    }
  return reg;
}

int ModeRegistry::add(const std::string& port, Pol pol, int internal) {
  auto key = std::make_tuple(port, static_cast<int>(pol), internal);
  auto it = lookup_.find(key);
  if (it != lookup_.end())
    throw std::invalid_argument("mode registered twice: " + port);
  int idx = static_cast<int>(modes_.size());
  modes_.push_back({port, pol, internal});
  lookup_[key] = idx;
  if (std::find(ports_.begin(), ports_.end(), port) == ports_.end())
    ports_.push_back(port);
  return idx;
}

int ModeRegistry::index(const std::string& port, Pol pol, int internal) const {
  auto it = lookup_.find(std::make_tuple(port, static_cast<int>(pol), internal));
  if (it == lookup_.end())
    throw std::invalid_argument("unregistered mode: " + port + "/" +
                                pol_name(pol) + "/" + std::to_string(internal));
  return it->second;
}

bool ModeRegistry::has(const std::string& port, Pol pol, int internal) const {
  return lookup_.count(std::make_tuple(port, static_cast<int>(pol), internal)) >
         0;
}

std::vector<int> ModeRegistry::port_modes(const std::string& port) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (modes_[i].port == port) out.push_back(i);
  return out;
}

// ---------------------------------------------------------- transfer matrix

TransferMatrix TransferMatrix::identity(int dim) {
  return {MatrixXcd::Identity(dim, dim), true};
}

TransferMatrix TransferMatrix::checked(MatrixXcd m, double tol) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("transfer matrix must be square");
  Eigen::JacobiSVD<MatrixXcd> svd(m);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  if (smax > 1.0 + tol)
    throw std::invalid_argument("transfer matrix amplifies: sigma_max = " +
                                std::to_string(smax));
  MatrixXcd gram = m.adjoint() * m;
  bool unitary =
      (gram - MatrixXcd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <
      tol;
  return {std::move(m), unitary};
}

TransferMatrix TransferMatrix::then(const TransferMatrix& next) const {
  return {next.m * m, unitary && next.unitary};
}

// ------------------------------------------------------------------ state

FockState FockState::vacuum(RegistryPtr reg) {
  FockState s(std::move(reg));
  s.add_term(Occupation(s.reg_->size(), 0), 1.0);
  return s;
}

void FockState::add_term(const Occupation& occ, cplx amp) {
  if (static_cast<int>(occ.size()) != reg_->size())
    throw std::invalid_argument("occupation size does not match registry");
  if (total_photons(occ) > reg_->n_max())
    throw TruncationError("term exceeds photon cap N_max=" +
                          std::to_string(reg_->n_max()));
  auto [it, fresh] = terms_.try_emplace(occ, amp);
  if (!fresh) it->second += amp;
}

cplx FockState::amplitude(const Occupation& occ) const {
  auto it = terms_.find(occ);
  return it == terms_.end() ? cplx(0) : it->second;
}

double FockState::norm_sq() const {
  double n = 0;
  for (const auto& [occ, amp] : terms_) n += std::norm(amp);
  return n;
}

FockState FockState::scaled(cplx factor) const {
  FockState out(reg_);
  for (const auto& [occ, amp] : terms_) out.terms_[occ] = amp * factor;
  return out;
}

FockState FockState::plus(const FockState& other) const {
  if (reg_ != other.reg_)
    throw std::invalid_argument("states live on different registries");
  FockState out = *this;
  for (const auto& [occ, amp] : other.terms_) out.add_term(occ, amp);
  return out;
}

void FockState::prune(double threshold) {
  for (auto it = terms_.begin(); it != terms_.end();)
    it = std::abs(it->second) < threshold ? terms_.erase(it) : std::next(it);
}

FockState FockState::apply_creation(const std::vector<int>& modes) const {
  FockState out(reg_);
  for (const auto& [occ, amp] : terms_) {
    Occupation next = occ;
    double factor = 1.0;
    for (int m : modes) {
      factor *= std::sqrt(static_cast<double>(next[m] + 1));
      next[m]++;
    }
    out.add_term(next, amp * factor);
  }
  return out;
}

cplx inner_product(const FockState& a, const FockState& b) {
  if (a.registry() != b.registry())
    throw std::invalid_argument("inner product across different registries");
  // Iterate the smaller map.
  const FockState& small = a.term_count() <= b.term_count() ? a : b;
  const FockState& large = a.term_count() <= b.term_count() ? b : a;
  cplx r = 0;
  for (const auto& [occ, amp] : small.terms()) {
    cplx other = large.amplitude(occ);
    if (&small == &a)
      r += std::conj(amp) * other;
    else
      r += std::conj(other) * amp;
  }
  return r;
}

std::string FockState::to_json() const {
  json j;
  json header = json::array();
  for (int i = 0; i < reg_->size(); ++i) {
    const ModeKey& k = reg_->key(i);
    header.push_back({k.port, pol_name(k.pol), k.internal});
  }
  j["modes"] = header;
  j["n_max"] = reg_->n_max();
  json terms = json::array();
  // Canonical order for byte-stable output.
  std::vector<const Occupation*> keys;
  keys.reserve(terms_.size());
  for (const auto& [occ, amp] : terms_) keys.push_back(&occ);
  std::sort(keys.begin(), keys.end(),
            [](const Occupation* x, const Occupation* y) { return *x < *y; });
  for (const Occupation* occ : keys) {
    cplx amp = terms_.at(*occ);
    json t;
    t["n"] = *occ;
    t["re"] = amp.real();
    t["im"] = amp.imag();
    terms.push_back(t);
  }
  j["terms"] = terms;
  return j.dump(2);
}

FockState FockState::from_json(const std::string& text, RegistryPtr reg) {
  json j = json::parse(text);
  FockState s(std::move(reg));
  if (j.at("modes").size() != static_cast<size_t>(s.reg_->size()))
    throw std::invalid_argument("serialized mode count mismatch");
  for (const auto& t : j.at("terms")) {
    Occupation occ = t.at("n").get<std::vector<uint8_t>>();
    s.add_term(occ, cplx(t.at("re").get<double>(), t.at("im").get<double>()));
  }
  return s;
}

// -------------------------------------------------------------- permanent

cplx permanent(const MatrixXcd& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("permanent requires a square matrix");
  const int n = static_cast<int>(m.rows());
  if (n == 0) return 1.0;
  if (n == 1) return m(0, 0);
  // Ryser with Gray-code subset updates: O(2^n * n).
  VectorXcd row_sum = VectorXcd::Zero(n);
  cplx total = 0;
  uint64_t gray = 0;
  double sign = 1.0;
  const uint64_t count = 1ull << n;
  for (uint64_t k = 1; k < count; ++k) {
    uint64_t next_gray = k ^ (k >> 1);
    uint64_t diff = gray ^ next_gray;
    int j = 0;
    while (!((diff >> j) & 1)) ++j;
    if (next_gray & diff)
      row_sum += m.col(j);
    else
      row_sum -= m.col(j);
    gray = next_gray;
    cplx prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= row_sum(i);
    sign = (std::popcount(gray) % 2 == n % 2) ? 1.0 : -1.0;
    total += sign * prod;
  }
  return total;
}

// -------------------------------------------------------------- evolution

namespace {

// Column-sparse view of u restricted to occupied input modes.
struct SparseCols {
  std::vector<std::vector<std::pair<int, cplx>>> cols;  // per input mode
};

void check_photon_cap(const FockState& state) {
  const int cap = state.registry()->n_max();
  for (const auto& [occ, amp] : state.terms())
    if (total_photons(occ) > cap)
      throw TruncationError("state exceeds photon cap");
}

// Recursively distributes photons of one input term over output modes.
void expand_photons(const std::vector<int>& photons, size_t next,
                    const std::vector<std::vector<std::pair<int, cplx>>>& cols,
                    Occupation& occ, cplx coeff, FockState& out) {
  if (next == photons.size()) {
    double boson = 1.0;
    for (size_t i = 0; i < occ.size(); ++i)
      if (occ[i] > 1) boson *= factorial(occ[i]);
    out.add_term(occ, coeff * std::sqrt(boson));
    return;
  }
  for (const auto& [row, amp] : cols[photons[next]]) {
    occ[row]++;
    expand_photons(photons, next + 1, cols, occ, coeff * amp, out);
    occ[row]--;
  }
}

// Enumerates output occupations with a fixed photon total over a mode subset.
void enumerate_outputs(const std::vector<int>& rows, size_t next, int remaining,
                       Occupation& occ, const MatrixXcd& u,
                       const std::vector<int>& in_modes, double in_factor,
                       cplx in_amp, FockState& out) {
  if (next == rows.size()) {
    if (remaining != 0) return;
    std::vector<int> out_modes;
    double out_factor = 1.0;
    for (size_t i = 0; i < occ.size(); ++i)
      for (int c = 0; c < occ[i]; ++c) out_modes.push_back(static_cast<int>(i));
    for (size_t i = 0; i < occ.size(); ++i)
      if (occ[i] > 1) out_factor *= factorial(occ[i]);
    MatrixXcd sub(out_modes.size(), in_modes.size());
    for (size_t r = 0; r < out_modes.size(); ++r)
      for (size_t c = 0; c < in_modes.size(); ++c)
        sub(r, c) = u(out_modes[r], in_modes[c]);
    cplx amp = permanent(sub) / std::sqrt(in_factor * out_factor);
    if (amp != cplx(0)) out.add_term(occ, in_amp * amp);
    return;
  }
  int row = rows[next];
  for (int c = 0; c <= remaining; ++c) {
    occ[row] = static_cast<uint8_t>(c);
    enumerate_outputs(rows, next + 1, remaining - c, occ, u, in_modes,
                      in_factor, in_amp, out);
  }
  occ[row] = 0;
}

}  // namespace

FockState evolve_sequential(const FockState& state, const TransferMatrix& u) {
  check_photon_cap(state);
  const auto& reg = state.registry();
  if (u.m.rows() != reg->size())
    throw std::invalid_argument("transfer matrix dimension != mode count");
  std::vector<std::vector<std::pair<int, cplx>>> cols(reg->size());
  std::vector<bool> built(reg->size(), false);
  FockState out(reg);
  for (const auto& [occ, amp] : state.terms()) {
    std::vector<int> photons;
    double in_factor = 1.0;
    for (size_t i = 0; i < occ.size(); ++i) {
      for (int c = 0; c < occ[i]; ++c) photons.push_back(static_cast<int>(i));
      if (occ[i] > 1) in_factor *= factorial(occ[i]);
      if (occ[i] > 0 && !built[i]) {
        for (int r = 0; r < u.m.rows(); ++r)
          if (u.m(r, i) != cplx(0)) cols[i].push_back({r, u.m(r, i)});
        built[i] = true;
      }
    }
    Occupation target(reg->size(), 0);
    expand_photons(photons, 0, cols, target, amp / std::sqrt(in_factor), out);
  }
  out.prune();
  return out;
}

FockState evolve_permanent(const FockState& state, const TransferMatrix& u) {
  check_photon_cap(state);
  const auto& reg = state.registry();
  if (u.m.rows() != reg->size())
    throw std::invalid_argument("transfer matrix dimension != mode count");
  FockState out(reg);
  for (const auto& [occ, amp] : state.terms()) {
    std::vector<int> in_modes;
    double in_factor = 1.0;
    for (size_t i = 0; i < occ.size(); ++i) {
      for (int c = 0; c < occ[i]; ++c) in_modes.push_back(static_cast<int>(i));
      if (occ[i] > 1) in_factor *= factorial(occ[i]);
    }
    // Photons can only land in rows coupled to an occupied column.
    std::vector<int> rows;
    for (int r = 0; r < u.m.rows(); ++r) {
      for (int c : in_modes)
        if (u.m(r, c) != cplx(0)) {
          rows.push_back(r);
          break;
        }
    }
    Occupation target(reg->size(), 0);
    enumerate_outputs(rows, 0, static_cast<int>(in_modes.size()), target, u.m,
                      in_modes, in_factor, amp, out);
  }
  out.prune();
  return out;
}

}  // namespace loqs
