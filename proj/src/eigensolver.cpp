#include "qgf/eigensolver.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>

#include <boost/random/discrete_distribution.hpp>

#include "qgf/errors.hpp"

namespace qgf {

std::vector<std::uint64_t> sector_basis(int n_qubits, int n_electrons) {
  if (n_qubits < 0 || n_qubits > kMaxQubits) throw RangeError("qubit count out of range");
  if (n_electrons < 0 || n_electrons > n_qubits) {
    throw RangeError("electron count " + std::to_string(n_electrons) + " outside [0, " + std::to_string(n_qubits) +
                     "]");
  }
  std::vector<std::uint64_t> out;
  if (n_electrons == 0) return {0};
  // Gosper's hack walks the fixed-popcount words in increasing order.
  std::uint64_t v = (std::uint64_t{1} << n_electrons) - 1;
  const std::uint64_t limit = std::uint64_t{1} << n_qubits;
  while (v < limit) {
    out.push_back(v);
    const std::uint64_t t = v | (v - 1);
    v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
  }
  return out;
}

// --- SectorSpectrum ----------------------------------------------------------

SectorSpectrum::SectorSpectrum(int n_qubits, int n_electrons, std::vector<std::uint64_t> basis,
                               Eigen::VectorXd energies, Eigen::MatrixXcd vectors)
    : n_qubits_(n_qubits),
      n_electrons_(n_electrons),
      basis_(std::move(basis)),
      energies_(std::move(energies)),
      vectors_(std::move(vectors)) {
  const auto d = static_cast<Eigen::Index>(basis_.size());
  if (energies_.size() != d || vectors_.rows() != d || vectors_.cols() != d) {
    throw DimensionError("spectrum arrays do not match the sector dimension");
  }
  for (int i = 0; i < dim();) {
    PoleGroup g{energies_[i], i, 0};
    while (i < dim() && energies_[i] - g.energy < kDegeneracyTol) {
      ++g.size;
      ++i;
    }
    groups_.push_back(g);
  }
}

int SectorSpectrum::index_of(std::uint64_t bits) const {
  auto it = std::lower_bound(basis_.begin(), basis_.end(), bits);
  if (it == basis_.end() || *it != bits) return -1;
  return static_cast<int>(it - basis_.begin());
}

StateVector SectorSpectrum::state(int lambda) const {
  if (lambda < 0 || lambda >= dim()) throw RangeError("eigenstate index out of range");
  return embed(vectors_.col(lambda));
}

SectorProjection SectorSpectrum::project(const StateVector& state) const {
  if (state.n_qubits() != n_qubits_) throw DimensionError("register size differs from the spectrum");
  SectorProjection p;
  p.coeffs.resize(dim());
  double inside = 0.0;
  for (int i = 0; i < dim(); ++i) {
    p.coeffs[i] = state[basis_[i]];
    inside += std::norm(p.coeffs[i]);
  }
  p.leak = std::max(0.0, state.norm_squared() - inside);
  return p;
}

StateVector SectorSpectrum::embed(const Eigen::VectorXcd& coeffs) const {
  if (coeffs.size() != dim()) throw DimensionError("coefficient vector does not match the sector");
  StateVector s(n_qubits_);
  s[0] = 0.0;
  for (int i = 0; i < dim(); ++i) s[basis_[i]] = coeffs[i];
  return s;
}

Eigen::VectorXcd SectorSpectrum::overlaps(const Eigen::VectorXcd& coeffs) const {
  if (coeffs.size() != dim()) throw DimensionError("coefficient vector does not match the sector");
  return vectors_.adjoint() * coeffs;
}

std::vector<double> SectorSpectrum::group_weights(const Eigen::VectorXcd& coeffs) const {
  const Eigen::VectorXcd ov = overlaps(coeffs);
  std::vector<double> w(groups_.size(), 0.0);
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    for (int k = 0; k < groups_[g].size; ++k) w[g] += std::norm(ov[groups_[g].first + k]);
  }
  return w;
}

// --- diagonalization ---------------------------------------------------------

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void join(int a, int b) { parent[find(a)] = find(b); }
};

SectorSpectrum solve(const PauliSum& h, int n_electrons, const EigensolverOptions& options) {
  const int n = h.n_qubits();
  auto basis = sector_basis(n, n_electrons);
  const int d = static_cast<int>(basis.size());
  if (d > options.max_dim) {
    throw ResourceError("sector dimension " + std::to_string(d) + " exceeds the budget of " +
                        std::to_string(options.max_dim));
  }
  const auto terms = h.terms();
  auto position = [&](std::uint64_t bits) {
    auto it = std::lower_bound(basis.begin(), basis.end(), bits);
    return (it != basis.end() && *it == bits) ? static_cast<int>(it - basis.begin()) : -1;
  };

  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  std::unordered_map<std::uint64_t, cplx> outside;
  double leak = 0.0;
  for (int j = 0; j < d; ++j) {
    outside.clear();
    for (const auto& t : terms) {
      const auto [target, f] = t.apply_to_basis(basis[j]);
      const int i = std::popcount(target) == n_electrons ? position(target) : -1;
      if (i >= 0) {
        m(i, j) += f;
      } else {
        outside[target] += f;
      }
    }
    for (const auto& [bits, amp] : outside) leak = std::max(leak, std::abs(amp));
  }
  if (leak > 1e-10) {
    throw SectorLeakError("Hamiltonian does not conserve electron number (leak " + std::to_string(leak) + ")");
  }

  DisjointSets sets(d);
  bool real = true;
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      if (std::abs(m(i, j)) < 1e-14) continue;
      if (std::abs(m(i, j).imag()) > 1e-14) real = false;
      if (i != j) sets.join(i, j);
    }
  }
  std::map<int, std::vector<int>> blocks;
  for (int i = 0; i < d; ++i) blocks[sets.find(i)].push_back(i);

  std::vector<double> energies;
  std::vector<Eigen::VectorXcd> columns;
  energies.reserve(d);
  columns.reserve(d);
  for (const auto& [root, idx] : blocks) {
    const auto bd = static_cast<Eigen::Index>(idx.size());
    auto scatter = [&](const auto& vec) {
      Eigen::VectorXcd full = Eigen::VectorXcd::Zero(d);
      for (Eigen::Index a = 0; a < bd; ++a) full[idx[a]] = vec[a];
      return full;
    };
    if (real) {
      Eigen::MatrixXd b(bd, bd);
      for (Eigen::Index a = 0; a < bd; ++a)
        for (Eigen::Index c = 0; c < bd; ++c) b(a, c) = m(idx[a], idx[c]).real();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
      for (Eigen::Index k = 0; k < bd; ++k) {
        energies.push_back(es.eigenvalues()[k]);
        columns.push_back(scatter(es.eigenvectors().col(k).cast<cplx>()));
      }
    } else {
      Eigen::MatrixXcd b(bd, bd);
      for (Eigen::Index a = 0; a < bd; ++a)
        for (Eigen::Index c = 0; c < bd; ++c) b(a, c) = m(idx[a], idx[c]);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b);
      for (Eigen::Index k = 0; k < bd; ++k) {
        energies.push_back(es.eigenvalues()[k]);
        columns.push_back(scatter(es.eigenvectors().col(k)));
      }
    }
  }

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return energies[a] < energies[b]; });
  Eigen::VectorXd e(d);
  Eigen::MatrixXcd v(d, d);
  for (int k = 0; k < d; ++k) {
    e[k] = energies[order[k]];
    v.col(k) = columns[order[k]];
  }
  return SectorSpectrum(n, n_electrons, std::move(basis), std::move(e), std::move(v));
}

}  // namespace

SectorSpectrum diagonalize_sector(const PauliSum& h, int n_electrons, const EigensolverOptions& options) {
  if (!h.is_hermitian(1e-12)) throw RangeError("Hamiltonian is not Hermitian");
  if (options.cache_dir.empty()) return solve(h, n_electrons, options);

  const std::uint64_t key = hamiltonian_hash(h);
  char name[64];
  std::snprintf(name, sizeof name, "spectrum_%016llx_n%d.bin", static_cast<unsigned long long>(key), n_electrons);
  const auto path = options.cache_dir / name;
  if (auto cached = load_spectrum(path, key); cached && cached->n_electrons() == n_electrons) return *cached;
  SectorSpectrum spec = solve(h, n_electrons, options);
  std::filesystem::create_directories(options.cache_dir);
  save_spectrum(path, spec, key);
  return spec;
}

// --- idealized QPE -----------------------------------------------------------

std::vector<double> qpe_distribution(const StateVector& reg, const SectorSpectrum& spectrum) {
  const SectorProjection p = spectrum.project(reg);
  const double total = reg.norm_squared();
  if (total <= 0.0) throw RangeError("QPE on a zero register");
  if (p.leak > 1e-8 * total) {
    throw SectorLeakError("register has weight " + std::to_string(p.leak / total) + " outside the " +
                          std::to_string(spectrum.n_electrons()) + "-electron sector");
  }
  auto w = spectrum.group_weights(p.coeffs);
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= sum;
  return w;
}

QpeOutcome ideal_qpe_sample(const StateVector& reg, const SectorSpectrum& spectrum, StreamRng& rng) {
  const auto w = qpe_distribution(reg, spectrum);
  boost::random::discrete_distribution<int, double> pick(w.begin(), w.end());
  const int g = pick(rng);
  return {g, spectrum.groups()[g].energy};
}

// --- cache -------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'Q', 'G', 'F', 'S', 'P', 'E', 'C', '\0'};
constexpr std::uint32_t kCacheVersion = 1;

static_assert(std::endian::native == std::endian::little, "spectrum cache assumes a little-endian host");

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(std::istream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

}  // namespace

std::uint64_t hamiltonian_hash(const PauliSum& h) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto feed = [&](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) hash = (hash ^ p[i]) * 0x100000001b3ULL;
  };
  const int n = h.n_qubits();
  feed(&n, sizeof n);
  for (const auto& t : h.terms()) {
    const std::uint64_t x = t.x_mask();
    const std::uint64_t z = t.z_mask();
    const double re = t.coefficient().real();
    const double im = t.coefficient().imag();
    feed(&x, sizeof x);
    feed(&z, sizeof z);
    feed(&re, sizeof re);
    feed(&im, sizeof im);
  }
  return hash;
}

void save_spectrum(const std::filesystem::path& path, const SectorSpectrum& spectrum, std::uint64_t hash) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write spectrum cache " + path.string());
  out.write(kMagic, sizeof kMagic);
  put(out, kCacheVersion);
  put(out, hash);
  put(out, static_cast<std::int32_t>(spectrum.n_qubits()));
  put(out, static_cast<std::int32_t>(spectrum.n_electrons()));
  put(out, static_cast<std::uint64_t>(spectrum.dim()));
  for (auto b : spectrum.basis()) put(out, b);
  for (int i = 0; i < spectrum.dim(); ++i) put(out, spectrum.energies()[i]);
  const auto& v = spectrum.vectors();
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      put(out, v(i, j).real());
      put(out, v(i, j).imag());
    }
  }
}

std::optional<SectorSpectrum> load_spectrum(const std::filesystem::path& path, std::uint64_t hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  std::uint32_t version = 0;
  std::uint64_t stored = 0;
  std::int32_t n = 0;
  std::int32_t ne = 0;
  std::uint64_t d = 0;
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) return std::nullopt;
  if (!get(in, version) || version != kCacheVersion) return std::nullopt;
  if (!get(in, stored) || stored != hash) return std::nullopt;
  if (!get(in, n) || !get(in, ne) || !get(in, d)) return std::nullopt;
  if (n < 0 || n > kMaxQubits || d > (std::uint64_t{1} << std::min(n, 30))) return std::nullopt;
  std::vector<std::uint64_t> basis(d);
  for (auto& b : basis)
    if (!get(in, b)) return std::nullopt;
  Eigen::VectorXd e(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < e.size(); ++i)
    if (!get(in, e[i])) return std::nullopt;
  Eigen::MatrixXcd v(e.size(), e.size());
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      double re = 0.0;
      double im = 0.0;
      if (!get(in, re) || !get(in, im)) return std::nullopt;
      v(i, j) = {re, im};
    }
  }
  return SectorSpectrum(n, ne, std::move(basis), std::move(e), std::move(v));
}

}  // namespace qgf
