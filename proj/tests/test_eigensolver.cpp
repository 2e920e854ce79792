#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "qgf/eigensolver.hpp"
#include "qgf/errors.hpp"
#include "qgf/integrals.hpp"
#include "qgf/units.hpp"

using namespace qgf;
using oracle::Mat;
using oracle::Vec;

namespace {

MolecularIntegrals random_integrals(int n_orb, int n_elec, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 0.3);
  MolecularIntegrals ints(n_orb, n_elec);
  for (int p = 0; p < n_orb; ++p)
    for (int q = 0; q <= p; ++q) ints.set_h(p, q, g(rng));
  for (int p = 0; p < n_orb; ++p)
    for (int q = 0; q < n_orb; ++q)
      for (int r = 0; r < n_orb; ++r)
        for (int s = 0; s < n_orb; ++s) ints.set_eri(p, q, r, s, g(rng));
  return ints;
}

StateVector to_state(const Vec& v, int n) { return StateVector(n, std::vector<cplx>(v.data(), v.data() + v.size())); }

long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / ("qgf_eig_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("sector bases") {
  CHECK(sector_basis(2, 1) == std::vector<std::uint64_t>{0b01, 0b10});
  CHECK(sector_basis(4, 0) == std::vector<std::uint64_t>{0});
  CHECK(sector_basis(12, 5).size() == 792);
  for (int n = 1; n <= 10; ++n)
    for (int k = 0; k <= n; ++k) {
      const auto b = sector_basis(n, k);
      CHECK(static_cast<long>(b.size()) == binomial(n, k));
      for (std::size_t i = 0; i < b.size(); ++i) {
        CHECK(__builtin_popcountll(b[i]) == k);
        if (i) CHECK(b[i - 1] < b[i]);
      }
    }
  CHECK_THROWS_AS(sector_basis(4, 5), RangeError);
  CHECK_THROWS_AS(sector_basis(4, -1), RangeError);
}

TEST_CASE("single level is spin degenerate") {
  const double e = -0.8;
  const auto spec = diagonalize_sector(build_qubit_hamiltonian(builtin_model("single_level", {{"eps", e}})), 1);
  REQUIRE(spec.dim() == 2);
  CHECK(spec.energies()[0] == doctest::Approx(e));
  CHECK(spec.energies()[1] == doctest::Approx(e));
  REQUIRE(spec.groups().size() == 1);
  CHECK(spec.groups()[0].size == 2);
}

TEST_CASE("Hubbard dimer ground state") {
  const auto h = build_qubit_hamiltonian(builtin_model("hubbard_dimer", {{"t", 1.0}, {"U", 2.0}}));
  CHECK(diagonalize_sector(h, 2).energies()[0] == doctest::Approx(1.0 - std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("spectrum invariant under an orbital relabelling") {
  const auto a = builtin_model("hubbard_dimer", {{"t", 1.0}, {"U", 3.0}});
  MolecularIntegrals b(2, 2);
  const int perm[2] = {1, 0};
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) {
      b.set_h(perm[p], perm[q], a.h()(p, q));
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) b.set_eri(perm[p], perm[q], perm[r], perm[s], a.eri(p, q, r, s));
    }
  for (int ne = 0; ne <= 4; ++ne) {
    const auto ea = diagonalize_sector(build_qubit_hamiltonian(a), ne).energies();
    const auto eb = diagonalize_sector(build_qubit_hamiltonian(b), ne).energies();
    CHECK((ea - eb).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("sector spectra agree with dense diagonalisation and are orthonormal eigenpairs") {
  std::mt19937_64 rng(31);
  const auto ints = random_integrals(3, 2, rng);
  const auto h = build_qubit_hamiltonian(ints);
  const Mat dense = dense_matrix(h);
  for (int ne = 0; ne <= 6; ++ne) {
    const auto spec = diagonalize_sector(h, ne);
    const auto ref = oracle::sector_eigen(dense, 6, ne);
    REQUIRE(spec.dim() == static_cast<int>(ref.energies.size()));
    const double scale = std::max(1.0, spec.energies().cwiseAbs().maxCoeff());
    for (int k = 0; k < spec.dim(); ++k) {
      CHECK(std::abs(spec.energies()[k] - ref.energies[k]) < 1e-10 * scale);
      if (k) CHECK(spec.energies()[k - 1] <= spec.energies()[k]);
      const Vec v = spec.state(k).as_eigen();
      CHECK((dense * v - spec.energies()[k] * v).norm() < 1e-9 * scale);
    }
    const Mat gram = spec.vectors().adjoint() * spec.vectors();
    CHECK((gram - Mat::Identity(spec.dim(), spec.dim())).cwiseAbs().maxCoeff() < 1e-10);
    int covered = 0;
    for (const auto& g : spec.groups()) {
      CHECK(g.first == covered);
      for (int k = g.first; k < g.first + g.size; ++k)
        CHECK(std::abs(spec.energies()[k] - g.energy) <= kDegeneracyTol * (g.size));
      covered += g.size;
    }
    CHECK(covered == spec.dim());
  }
}

TEST_CASE("projections are complete over the sector") {
  std::mt19937_64 rng(37);
  const auto h = build_qubit_hamiltonian(random_integrals(3, 2, rng));
  const auto spec = diagonalize_sector(h, 3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto psi = to_state(oracle::random_sector_state(6, 3, rng), 6);
    const auto proj = spec.project(psi);
    CHECK(proj.leak < 1e-28);
    double total = 0.0;
    for (double w : spec.group_weights(proj.coeffs)) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    CHECK((spec.embed(proj.coeffs).as_eigen() - psi.as_eigen()).cwiseAbs().maxCoeff() < 1e-14);
  }
  const auto mixed = to_state(oracle::random_state(64, rng), 6);
  CHECK(spec.project(mixed).leak > 0.1);
}

TEST_CASE("LiH ground state reproduces the FCI energy") {
  const auto ints = read_fcidump(QGF_DATA_DIR "/lih_sto3g.fcidump");
  const auto spec = diagonalize_sector(build_qubit_hamiltonian(ints), 4);
  CHECK(spec.dim() == 495);
  CHECK(ha_to_ev(spec.energies()[0]) == doctest::Approx(-214.4889).epsilon(0.05 / 214.4889));
}

TEST_CASE("errors") {
  const auto h = build_qubit_hamiltonian(builtin_model("hubbard_dimer"));
  EigensolverOptions tight;
  tight.max_dim = 5;
  CHECK_THROWS_AS(diagonalize_sector(h, 2, tight), ResourceError);
  CHECK_NOTHROW(diagonalize_sector(h, 1, tight));

  PauliSum broken = h;
  broken.add(PauliTerm::parse(4, "X0", 0.1));
  CHECK_THROWS_AS(diagonalize_sector(broken, 2), SectorLeakError);
}

TEST_CASE("spectrum cache round trip") {
  TempDir dir;
  std::mt19937_64 rng(41);
  const auto h = build_qubit_hamiltonian(random_integrals(3, 2, rng));
  const auto spec = diagonalize_sector(h, 3);
  const auto hash = hamiltonian_hash(h);
  const auto file = dir.path / "s.bin";
  save_spectrum(file, spec, hash);
  const auto back = load_spectrum(file, hash);
  REQUIRE(back.has_value());
  CHECK(back->basis() == spec.basis());
  CHECK(back->n_electrons() == 3);
  CHECK((back->energies() - spec.energies()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back->vectors() - spec.vectors()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back->groups().size() == spec.groups().size());
  CHECK_FALSE(load_spectrum(file, hash + 1).has_value());
  CHECK_FALSE(load_spectrum(dir.path / "missing.bin", hash).has_value());

  PauliSum other = h;
  other.add(PauliTerm::parse(6, "Z0", 1e-3));
  CHECK(hamiltonian_hash(other) != hash);

  EigensolverOptions cached;
  cached.cache_dir = dir.path / "cache";
  const auto first = diagonalize_sector(h, 2, cached);
  const auto second = diagonalize_sector(h, 2, cached);
  CHECK((first.energies() - second.energies()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(!std::filesystem::is_empty(cached.cache_dir));
}

TEST_CASE("ideal phase estimation") {
  std::mt19937_64 gen(43);
  const auto ints = random_integrals(3, 2, gen);
  const auto h = build_qubit_hamiltonian(ints);
  const auto spec = diagonalize_sector(h, 2);
  const auto& groups = spec.groups();
  REQUIRE(groups.size() >= 2);

  SUBCASE("an eigenstate is read with certainty") {
    StreamRng rng(1);
    const int lambda = groups[1].first;
    for (int k = 0; k < 100; ++k) {
      const auto out = ideal_qpe_sample(spec.state(lambda), spec, rng);
      CHECK(out.group == 1);
      CHECK(out.energy == groups[1].energy);
    }
  }
  SUBCASE("equal superposition splits 1/2 within 4 sigma") {
    const Vec v = (spec.state(groups[0].first).as_eigen() + spec.state(groups.back().first).as_eigen()) / std::sqrt(2.0);
    const auto reg = to_state(v, 6);
    StreamRng rng(2);
    const int shots = 100000;
    int low = 0;
    for (int k = 0; k < shots; ++k) {
      const auto out = ideal_qpe_sample(reg, spec, rng);
      CHECK((out.group == 0 || out.group == static_cast<int>(groups.size()) - 1));
      low += out.group == 0;
    }
    CHECK(std::abs(low - shots / 2.0) < 4.0 * std::sqrt(shots * 0.25));
  }
  SUBCASE("a_m dagger on the N-1 ground state follows the transition weights") {
    const Mat dense = dense_matrix(h);
    const auto minus = oracle::sector_eigen(dense, 6, 1);
    const auto plus = oracle::sector_eigen(dense, 6, 2);
    const int m = 3;
    const Vec raw = oracle::creation(m, 6) * minus.states[0];
    const double p = raw.squaredNorm();
    REQUIRE(p > 1e-3);
    // exact weights from the oracle eigenbasis, grouped by the library's pole groups
    std::vector<double> expect(groups.size(), 0.0);
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (int k = groups[g].first; k < groups[g].first + groups[g].size; ++k)
        expect[g] += std::norm(plus.states[k].dot(raw)) / p;
    const auto reg = to_state(raw / std::sqrt(p), 6);
    const auto dist = qpe_distribution(reg, spec);
    for (std::size_t g = 0; g < groups.size(); ++g) CHECK(dist[g] == doctest::Approx(expect[g]).epsilon(1e-9));

    StreamRng rng(3);
    const int shots = 100000;
    std::vector<int> counts(groups.size(), 0);
    for (int k = 0; k < shots; ++k) ++counts[ideal_qpe_sample(reg, spec, rng).group];
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double sigma = std::sqrt(shots * expect[g] * (1 - expect[g]));
      CHECK(std::abs(counts[g] - shots * expect[g]) <= 4.0 * sigma + 1e-9);
    }
  }
  SUBCASE("a register outside the sector is rejected") {
    StreamRng rng(4);
    const auto reg = to_state(oracle::random_sector_state(6, 3, gen), 6);
    CHECK_THROWS_AS(ideal_qpe_sample(reg, spec, rng), SectorLeakError);
    Vec v = spec.state(0).as_eigen();
    v[0] += 1e-3;  // vacuum component
    CHECK_THROWS_AS(qpe_distribution(to_state(v.normalized(), 6), spec), SectorLeakError);
  }
}
