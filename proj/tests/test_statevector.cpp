#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qgf/errors.hpp"
#include "qgf/statevector.hpp"

using namespace qgf;
using oracle::Mat;
using oracle::Vec;

namespace {

const double kPi = std::numbers::pi;
const cplx I1{0.0, 1.0};

// 2x2 block u on qubit j of an n-qubit register.
Mat embed(const Mat& u, int j, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int q = n - 1; q >= 0; --q) out = oracle::kron(out, q == j ? u : Mat(Mat::Identity(2, 2)));
  return out;
}

Mat projector(int bit) {
  Mat p = Mat::Zero(2, 2);
  p(bit, bit) = 1.0;
  return p;
}

StateVector to_state(const Vec& v, int n) { return StateVector(n, std::vector<cplx>(v.data(), v.data() + v.size())); }

Vec to_vec(const StateVector& s) { return s.as_eigen(); }

Mat rotation_oracle(const Mat& p, double theta) {
  Eigen::SelfAdjointEigenSolver<Mat> es(p);
  Vec phases(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases[k] = std::exp(-I1 * theta * es.eigenvalues()[k] / 2.0);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double diff(const Vec& a, const Vec& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("H on |0> gives the plus state") {
  StateVector s(1);
  apply(s, HGate{0});
  CHECK(std::abs(s[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(s[1] - 1.0 / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("Z rotation of |0> is a phase") {
  StateVector s(1);
  const double theta = 0.83;
  apply(s, PauliRotation{PauliTerm::parse(1, "Z0"), theta});
  CHECK(std::abs(s[0] - std::exp(-I1 * theta / 2.0)) < 1e-15);
  CHECK(std::abs(s[1]) < 1e-15);
}

TEST_CASE("elementary gates match Kronecker-built matrices") {
  const int n = 3;
  std::mt19937_64 rng(1);
  const Vec psi = oracle::random_state(1 << n, rng);
  Mat h(2, 2), rx(2, 2), rz(2, 2), ph(2, 2);
  const double t = 0.61;
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  rx << std::cos(t / 2), -I1 * std::sin(t / 2), -I1 * std::sin(t / 2), std::cos(t / 2);
  rz << std::exp(-I1 * t / 2.0), 0, 0, std::exp(I1 * t / 2.0);
  ph << 1, 0, 0, std::exp(I1 * t);
  for (int j = 0; j < n; ++j) {
    const std::vector<std::pair<Gate, Mat>> cases{{XGate{j}, embed(oracle::single('X'), j, n)},
                                                  {HGate{j}, embed(h, j, n)},
                                                  {RxGate{j, t}, embed(rx, j, n)},
                                                  {RzGate{j, t}, embed(rz, j, n)},
                                                  {PhaseGate{j, t}, embed(ph, j, n)}};
    for (const auto& [gate, m] : cases) {
      StateVector s = to_state(psi, n);
      apply(s, gate);
      CHECK(diff(to_vec(s), m * psi) < 1e-14);
      CHECK(std::abs(s.norm_squared() - 1.0) < 1e-12);
    }
  }
  for (int c = 0; c < n; ++c)
    for (int tq = 0; tq < n; ++tq) {
      if (c == tq) continue;
      const Mat cnot = embed(projector(0), c, n) + embed(projector(1), c, n) * embed(oracle::single('X'), tq, n);
      StateVector s = to_state(psi, n);
      apply(s, CnotGate{c, tq});
      CHECK(diff(to_vec(s), cnot * psi) < 1e-14);
    }
}

TEST_CASE("controlled Pauli strings") {
  const int n = 4;
  std::mt19937_64 rng(2);
  const Vec psi = oracle::random_state(1 << n, rng);
  const PauliTerm op = PauliTerm::parse(n, "Z0 Y1 X2", I1);
  const Mat p = I1 * oracle::string_matrix("ZYXI");
  for (int value : {0, 1}) {
    StateVector s = to_state(psi, n);
    apply(s, ControlledPauli{{{3, value}}, op});
    const Mat expect = embed(projector(1 - value), 3, n) + embed(projector(value), 3, n) * p;
    CHECK(diff(to_vec(s), expect * psi) < 1e-14);
  }
  Circuit c(n);
  CHECK_THROWS_AS(c.add(ControlledPauli{{{1, 0}}, op}), RangeError);
  CHECK_THROWS_AS(c.add(ControlledPauli{{{3, 0}}, PauliTerm::parse(n, "X0", 2.0)}), RangeError);
  CHECK_THROWS_AS(c.add(ControlledPauli{{{3, 2}}, op}), RangeError);
}

TEST_CASE("Pauli rotations match the eigendecomposition exponential") {
  const int n = 6;
  std::mt19937_64 rng(3);
  const Vec psi = oracle::random_state(1 << n, rng);
  const std::vector<std::pair<std::string, std::string>> strings{
      {"Y5 X4 X3 X2", "IIXXXY"}, {"Z0 Y1", "ZYIIII"}, {"X0 Z3 Y4 X5", "XIIZYX"}};
  for (const auto& [text, letters] : strings)
    for (double theta : {0.0, 0.37, -1.9, 4.0 * kPi}) {
      for (double sign : {1.0, -1.0}) {
        StateVector s = to_state(psi, n);
        apply(s, PauliRotation{PauliTerm::parse(n, text, sign), theta});
        const Mat u = rotation_oracle(sign * oracle::string_matrix(letters), theta);
        CHECK(diff(to_vec(s), u * psi) < 1e-12);
      }
    }
  Circuit c(n);
  CHECK_THROWS_AS(c.add(PauliRotation{PauliTerm::parse(n, "X0", I1), 0.3}), RangeError);
  CHECK_THROWS_AS(c.add(XGate{n}), RangeError);
}

TEST_CASE("compiled basis-change ladder reproduces the native rotation") {
  const int n = 6;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (const std::string text : {"Y5 X4 X3 X2", "Y11 X10 X3 X2", "X1", "Z0 Z2", "Y0 Y1 Z3 X5"}) {
    const int width = text.find("11") != std::string::npos ? 12 : n;
    const Vec psi = oracle::random_state(1 << width, rng);
    for (double sign : {1.0, -1.0}) {
      const PauliTerm op = PauliTerm::parse(width, text, sign);
      const double theta = angle(rng);
      StateVector native = to_state(psi, width);
      apply(native, PauliRotation{op, theta});
      StateVector ladder = to_state(psi, width);
      apply(ladder, compile_pauli_rotation(op, theta));
      CHECK(diff(to_vec(native), to_vec(ladder)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(compile_pauli_rotation(PauliTerm(3), 0.1), RangeError);
}

TEST_CASE("diagonal circuit branches") {
  SUBCASE("occupied single mode") {
    StateVector s = StateVector::basis_state(1, 1).with_ancillae(1);
    apply(s, build_diag_circuit(0, 1));
    const auto hole = s.ancilla_branch(1, 0);
    const auto elec = s.ancilla_branch(1, 1);
    CHECK(std::abs(hole[0]) == doctest::Approx(1.0));
    CHECK(std::abs(hole[1]) < 1e-15);
    CHECK(elec.norm_squared() < 1e-30);
  }
  SUBCASE("empty single mode") {
    StateVector s = StateVector::basis_state(1, 0).with_ancillae(1);
    apply(s, build_diag_circuit(0, 1));
    CHECK(s.ancilla_branch(1, 0).norm_squared() < 1e-30);
    CHECK(std::abs(s.ancilla_branch(1, 1)[1]) == doctest::Approx(1.0));
  }
  SUBCASE("random register") {
    const int n = 4;
    std::mt19937_64 rng(5);
    const Vec psi = oracle::random_state(1 << n, rng);
    for (int m = 0; m < n; ++m) {
      StateVector s = to_state(psi, n).with_ancillae(1);
      apply(s, build_diag_circuit(m, n));
      const Vec hole = to_vec(s.ancilla_branch(1, 0));
      const Vec elec = to_vec(s.ancilla_branch(1, 1));
      // up to a global phase common to both branches
      const Vec a_psi = oracle::annihilation(m, n) * psi;
      const Vec c_psi = oracle::creation(m, n) * psi;
      const cplx phase = hole.dot(a_psi) / a_psi.squaredNorm();
      CHECK(std::abs(std::abs(phase) - 1.0) < 1e-12);
      CHECK(diff(phase * hole, a_psi) < 1e-12);
      CHECK(diff(phase * elec, c_psi) < 1e-12);
      // p(h) + p(e) = 1
      CHECK(a_psi.squaredNorm() + c_psi.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(build_diag_circuit(n, n), RangeError);
  }
}

TEST_CASE("diagonal circuit preserves sectors branch by branch") {
  const int n = 6, ne = 3;
  std::mt19937_64 rng(6);
  const Vec psi = oracle::random_sector_state(n, ne, rng);
  for (int m = 0; m < n; ++m) {
    StateVector s = to_state(psi, n).with_ancillae(1);
    apply(s, build_diag_circuit(m, n));
    for (int pattern : {0, 1}) {
      const auto branch = s.ancilla_branch(1, pattern);
      const int target = pattern == 0 ? ne - 1 : ne + 1;
      double outside = 0.0;
      for (std::uint64_t b = 0; b < branch.dim(); ++b)
        if (__builtin_popcountll(b) != target) outside += std::norm(branch[b]);
      CHECK(outside < 1e-28);
    }
  }
}

TEST_CASE("off-diagonal circuit four-branch map") {
  const int n = 4;
  std::mt19937_64 rng(7);
  const cplx w = std::polar(1.0, kPi / 4.0);
  for (int trial = 0; trial < 3; ++trial) {
    const Vec psi = oracle::random_state(1 << n, rng);
    for (int m = 0; m < n; ++m)
      for (int mp = 0; mp < n; ++mp) {
        if (m == mp) continue;
        StateVector s = to_state(psi, n).with_ancillae(2);
        apply(s, build_offdiag_circuit(m, mp, n));
        // a^{+-}_{mm'} = (a_m +- e^{-i pi/4} a_m') / 2
        const Mat am = oracle::annihilation(m, n), amp = oracle::annihilation(mp, n);
        const Mat plus_mmp = (am + std::conj(w) * amp) / 2.0;
        const Mat minus_mmp = (am - std::conj(w) * amp) / 2.0;
        const Mat plus_pm = (amp + std::conj(w) * am) / 2.0;
        const Mat minus_pm = (amp - std::conj(w) * am) / 2.0;
        const std::array<Vec, 4> expect{Vec(w * plus_pm * psi), Vec(plus_mmp.adjoint() * psi),
                                        Vec(-w * minus_pm * psi), Vec(minus_mmp.adjoint() * psi)};
        double total = 0.0;
        cplx phase = 0.0;
        for (int pattern = 0; pattern < 4; ++pattern) {
          const Vec got = to_vec(s.ancilla_branch(2, pattern));
          total += got.squaredNorm();
          CHECK(got.squaredNorm() == doctest::Approx(expect[pattern].squaredNorm()).epsilon(1e-10));
          if (phase == 0.0 && expect[pattern].norm() > 0.1) phase = got.dot(expect[pattern]) / got.squaredNorm();
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        for (int pattern = 0; pattern < 4; ++pattern)
          CHECK(diff(phase * to_vec(s.ancilla_branch(2, pattern)), expect[pattern]) < 1e-12);
      }
  }
  CHECK_THROWS_AS(build_offdiag_circuit(1, 1, n), RangeError);
}

TEST_CASE("off-diagonal circuit on the vacuum has no hole branches") {
  StateVector s = StateVector(3).with_ancillae(2);
  apply(s, build_offdiag_circuit(0, 2, 3));
  const std::vector<int> anc{3, 4};
  const auto p = outcome_probabilities(s, anc);
  CHECK(p[0] < 1e-30);
  CHECK(p[2] < 1e-30);
  CHECK(p[1] + p[3] == doctest::Approx(1.0));
}

TEST_CASE("built circuits are unitary") {
  const int n = 4;
  for (int m = 0; m < n; ++m) {
    CHECK(oracle::unitary(circuit_matrix(build_diag_circuit(m, n)), 1e-10));
    for (int mp = 0; mp < n; ++mp)
      if (mp != m) CHECK(oracle::unitary(circuit_matrix(build_offdiag_circuit(m, mp, n)), 1e-10));
  }
  CHECK(oracle::unitary(circuit_matrix(compile_pauli_rotation(PauliTerm::parse(5, "Y4 X3 Z1"), 0.8)), 1e-10));
}

TEST_CASE("measurement") {
  SUBCASE("|0> always reads 0") {
    StreamRng rng(1);
    const std::vector<int> q{0};
    for (int k = 0; k < 100; ++k) CHECK(measure(StateVector(1), q, rng).outcome[0] == 0);
  }
  SUBCASE("an occupied mode never yields the electron branch") {
    StateVector s = StateVector::basis_state(3, 0b011).with_ancillae(1);
    apply(s, build_diag_circuit(1, 3));
    const std::vector<int> q{3};
    StreamRng rng(2);
    for (int k = 0; k < 200; ++k) {
      const auto rec = measure(s, q, rng);
      CHECK(rec.outcome[0] == 0);
      CHECK(rec.probability == doctest::Approx(1.0));
    }
  }
  SUBCASE("frequencies follow Born probabilities within 4 sigma") {
    const int n = 3;
    std::mt19937_64 gen(8);
    const Vec psi = oracle::random_state(1 << n, gen);
    const StateVector s = to_state(psi, n);
    const std::vector<int> q{2, 0};
    std::array<double, 4> exact{};
    for (int b = 0; b < (1 << n); ++b) exact[((b >> 2) & 1) | ((b & 1) << 1)] += std::norm(psi[b]);
    const auto probs = outcome_probabilities(s, q);
    for (int k = 0; k < 4; ++k) CHECK(probs[k] == doctest::Approx(exact[k]).epsilon(1e-12));

    StreamRng rng(99);
    const int shots = 100000;
    std::array<int, 4> counts{};
    for (int k = 0; k < shots; ++k) {
      const auto rec = measure(s, q, rng);
      const int pattern = rec.outcome[0] | (rec.outcome[1] << 1);
      ++counts[pattern];
      if (k < 20) {
        CHECK(rec.probability == doctest::Approx(exact[pattern]).epsilon(1e-12));
        CHECK(rec.post.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
        // post-state is the normalised projection
        for (int b = 0; b < (1 << n); ++b) {
          const bool keep = ((b >> 2) & 1) == rec.outcome[0] && (b & 1) == rec.outcome[1];
          const cplx want = keep ? psi[b] / std::sqrt(exact[pattern]) : 0.0;
          CHECK(std::abs(rec.post[b] - want) < 1e-12);
        }
      }
    }
    for (int k = 0; k < 4; ++k) {
      const double sigma = std::sqrt(shots * exact[k] * (1 - exact[k]));
      CHECK(std::abs(counts[k] - shots * exact[k]) < 4 * sigma);
    }
  }
  SUBCASE("seeded streams are reproducible") {
    std::mt19937_64 gen(9);
    const StateVector s = to_state(oracle::random_state(8, gen), 3);
    const std::vector<int> q{0, 1, 2};
    StreamRng a(5), b(5);
    for (int k = 0; k < 50; ++k) CHECK(measure(s, q, a).outcome == measure(s, q, b).outcome);
  }
}

TEST_CASE("expectation values") {
  CHECK(expectation(StateVector(1), PauliTerm::parse(1, "Z0")) == 1.0);

  const int n = 4;
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> letter(0, 3);
  PauliSum op(n);
  for (int k = 0; k < 12; ++k) {
    PauliTerm t(n, g(rng));
    for (int q = 0; q < n; ++q) t.set(q, static_cast<Pauli>(letter(rng)));
    op.add(t);
  }
  const Vec psi = oracle::random_state(1 << n, rng);
  const double dense = (psi.adjoint() * dense_matrix(op) * psi)(0, 0).real();
  CHECK(expectation(to_state(psi, n), op) == doctest::Approx(dense).epsilon(1e-12));

  const CompiledOperator compiled(op);
  CHECK(compiled.expectation(to_state(psi, n)) == doctest::Approx(dense).epsilon(1e-12));
  std::vector<cplx> out(psi.size());
  compiled.apply(std::span<const cplx>(psi.data(), psi.size()), out);
  const Vec expect = dense_matrix(op) * psi;
  for (Eigen::Index i = 0; i < psi.size(); ++i) CHECK(std::abs(out[i] - expect[i]) < 1e-12);

  PauliSum bad(n);
  bad.add(PauliTerm::parse(n, "X0", I1));
  CHECK_THROWS_AS(expectation(to_state(psi, n), bad), RangeError);
  CHECK_THROWS_AS(expectation(StateVector(2), op), DimensionError);
}

TEST_CASE("register bookkeeping") {
  CHECK_THROWS_AS(StateVector(2, std::vector<cplx>(3)), DimensionError);
  CHECK_THROWS_AS(StateVector(31), ResourceError);
  CHECK_THROWS_AS(StateVector::basis_state(2, 4), RangeError);
  const auto s = StateVector::basis_state(2, 2).with_ancillae(1);
  CHECK(s.n_qubits() == 3);
  CHECK(s[2] == cplx(1.0));
  CHECK_THROWS_AS(s.ancilla_branch(1, 2), RangeError);
  StateVector big(3);
  CHECK_THROWS_AS(apply(big, Circuit(4)), DimensionError);
}
