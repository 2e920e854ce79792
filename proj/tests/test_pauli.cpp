#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qgf/errors.hpp"
#include "qgf/jordan_wigner.hpp"
#include "qgf/pauli.hpp"

using namespace qgf;
using oracle::Mat;

namespace {

const cplx I1{0.0, 1.0};

std::string letters_of(const PauliTerm& t) {
  std::string s(t.n_qubits(), 'I');
  for (int q = 0; q < t.n_qubits(); ++q) s[q] = "IXYZ"[static_cast<int>(t.letter(q))];
  return s;
}

PauliTerm random_term(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> letter(0, 3);
  std::normal_distribution<double> g;
  PauliTerm t(n, cplx{g(rng), g(rng)});
  for (int q = 0; q < n; ++q) t.set(q, static_cast<Pauli>(letter(rng)));
  return t;
}

double max_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("single-qubit products follow the Pauli group table") {
  const auto x = PauliTerm::parse(1, "X0");
  const auto y = PauliTerm::parse(1, "Y0");
  const auto p = x * y;
  CHECK(p.coefficient() == I1);
  CHECK(p.letter(0) == Pauli::Z);
  CHECK((y * x).coefficient() == -I1);
  CHECK((x * x).letter(0) == Pauli::I);
}

TEST_CASE("identity is neutral under multiplication") {
  const auto p = PauliTerm::parse(3, "Y2 Z0", cplx{0.3, -1.2});
  const auto r = PauliTerm(3) * p;
  CHECK(r == p);
}

TEST_CASE("products of random strings match dense matrix products") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_term(4, rng);
    const auto b = random_term(4, rng);
    const Mat expect = a.coefficient() * oracle::string_matrix(letters_of(a)) * b.coefficient() *
                       oracle::string_matrix(letters_of(b));
    CHECK(max_diff(dense_matrix(a * b), expect) < 1e-12);
    CHECK(std::abs(std::abs((a * b).coefficient()) - std::abs(a.coefficient()) * std::abs(b.coefficient())) < 1e-12);
    const auto c = random_term(4, rng);
    CHECK(max_diff(dense_matrix((a * b) * c), dense_matrix(a * (b * c))) < 1e-12);
  }
}

TEST_CASE("multiplying strings on different registers is a dimension error") {
  CHECK_THROWS_AS(PauliTerm(2) * PauliTerm(3), DimensionError);
  CHECK_THROWS_AS(PauliSum(2) += PauliSum(3), DimensionError);
}

TEST_CASE("unit-coefficient strings are unitary") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto t = random_term(6, rng);
    t.set_coefficient(std::polar(1.0, 0.7 * trial));
    CHECK(oracle::unitary(dense_matrix(t), 1e-12));
  }
}

TEST_CASE("sums merge equal letter patterns canonically") {
  PauliSum s(2);
  s.add(PauliTerm::parse(2, "X0 X1", 0.5));
  s.add(PauliTerm::parse(2, "X1 X0", 0.25));
  s.add(PauliTerm::parse(2, "Z0", 1.0));
  CHECK(s.size() == 2);
  const auto terms = s.terms();
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = i + 1; j < terms.size(); ++j)
      CHECK_FALSE((terms[i].x_mask() == terms[j].x_mask() && terms[i].z_mask() == terms[j].z_mask()));
}

TEST_CASE("hermitian sums have hermitian dense matrices") {
  PauliSum s(3);
  s.add(PauliTerm::parse(3, "X0 Y2", 0.4));
  s.add(PauliTerm::parse(3, "Z1", -1.1));
  CHECK(s.is_hermitian());
  const Mat m = dense_matrix(s);
  CHECK(max_diff(m, m.adjoint()) < 1e-14);
  s.add(PauliTerm::parse(3, "Y1", I1));
  CHECK_FALSE(s.is_hermitian());
}

TEST_CASE("parse rejects malformed strings") {
  CHECK_THROWS_AS(PauliTerm::parse(3, "Q1"), ParseError);
  CHECK_THROWS_AS(PauliTerm::parse(3, "X"), ParseError);
  CHECK_THROWS_AS(PauliTerm::parse(3, "X1 Z1"), ParseError);
  CHECK_THROWS_AS(PauliTerm::parse(3, "X3"), RangeError);
}

TEST_CASE("Majorana pair follows the JW definition") {
  SUBCASE("one qubit") {
    const auto [u0, u1] = jw_majorana_pair(0, 1);
    CHECK(u0 == PauliTerm::parse(1, "X0"));
    CHECK(u1 == PauliTerm::parse(1, "Y0", I1));
    Mat lower(2, 2);
    lower << 0, 1, 0, 0;
    CHECK(max_diff((dense_matrix(u0) + dense_matrix(u1)) / 2.0, lower) < 1e-15);
  }
  SUBCASE("m = 2 on four qubits") {
    const auto [u0, u1] = jw_majorana_pair(2, 4);
    CHECK(u0 == PauliTerm::parse(4, "Z0 Z1 X2"));
    CHECK(u1 == PauliTerm::parse(4, "Z0 Z1 Y2", I1));
  }
  SUBCASE("out of range") {
    CHECK_THROWS_AS(jw_majorana_pair(4, 4), RangeError);
    CHECK_THROWS_AS(jw_majorana_pair(-1, 4), RangeError);
  }
}

TEST_CASE("ladder operators match Kronecker-built matrices and anticommute") {
  const int n = 6;
  const Mat id = Mat::Identity(1 << n, 1 << n);
  for (int m = 0; m < n; ++m) {
    const auto [u0, u1] = jw_majorana_pair(m, n);
    CHECK(oracle::unitary(dense_matrix(u0), 1e-12));
    CHECK(oracle::unitary(dense_matrix(u1), 1e-12));
    const Mat a = (dense_matrix(u0) + dense_matrix(u1)) / 2.0;
    const Mat ad = (dense_matrix(u0) - dense_matrix(u1)) / 2.0;
    CHECK(max_diff(a, oracle::annihilation(m, n)) < 1e-12);
    CHECK(max_diff(ad, oracle::creation(m, n)) < 1e-12);
    CHECK(max_diff(a * ad + ad * a, id) < 1e-12);
    for (int k = 0; k < m; ++k) {
      const Mat b = oracle::annihilation(k, n);
      CHECK(max_diff(a * b + b * a, Mat::Zero(1 << n, 1 << n)) < 1e-12);
      CHECK(max_diff(ad * b + b * ad, Mat::Zero(1 << n, 1 << n)) < 1e-12);
    }
  }
}

TEST_CASE("jw_transform of fermionic monomials") {
  SUBCASE("number operator") {
    const auto n0 = jw_transform(FermionTerm{1.0, {{0, true}, {0, false}}}, 1);
    PauliSum expect(1);
    expect.add(PauliTerm(1, 0.5));
    expect.add(PauliTerm::parse(1, "Z0", -0.5));
    CHECK(max_diff(dense_matrix(n0), dense_matrix(expect)) < 1e-15);
    CHECK(n0.size() == 2);
  }
  SUBCASE("hopping term") {
    const std::vector<FermionTerm> hop{{1.0, {{0, true}, {1, false}}}, {1.0, {{1, true}, {0, false}}}};
    const auto h = jw_transform(hop, 2);
    PauliSum expect(2);
    expect.add(PauliTerm::parse(2, "X0 X1", 0.5));
    expect.add(PauliTerm::parse(2, "Y0 Y1", 0.5));
    CHECK(max_diff(dense_matrix(h), dense_matrix(expect)) < 1e-15);
    const Mat dense = oracle::creation(0, 2) * oracle::annihilation(1, 2) +
                      oracle::creation(1, 2) * oracle::annihilation(0, 2);
    CHECK(max_diff(dense_matrix(h), dense) < 1e-15);
    CHECK(h.max_imag_coefficient() < 1e-15);
  }
  SUBCASE("repeated creation vanishes") {
    const auto z = jw_transform(FermionTerm{1.0, {{1, true}, {1, true}}}, 3);
    CHECK(z.empty());
  }
  SUBCASE("index out of range") {
    CHECK_THROWS_AS(jw_transform(FermionTerm{1.0, {{3, true}}}, 3), RangeError);
  }
}

TEST_CASE("jw_transform agrees with dense products for random monomials and is linear") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> mode(0, 3);
  std::bernoulli_distribution dag(0.5);
  const int n = 4;
  for (int trial = 0; trial < 30; ++trial) {
    FermionTerm t{cplx{0.3, 0.1 * trial}, {}};
    Mat dense = t.coefficient * Mat::Identity(1 << n, 1 << n);
    for (int k = 0; k < 4; ++k) {
      const LadderOp op{mode(rng), dag(rng)};
      t.ops.push_back(op);
      dense = dense * (op.creation ? oracle::creation(op.mode, n) : oracle::annihilation(op.mode, n));
    }
    CHECK(max_diff(dense_matrix(jw_transform(t, n)), dense) < 1e-12);
    FermionTerm u{cplx{-0.7, 0.2}, {{mode(rng), true}, {mode(rng), false}}};
    const std::vector<FermionTerm> both{t, u};
    const PauliSum lin = jw_transform(both, n) - (jw_transform(t, n) + jw_transform(u, n));
    for (const auto& term : lin.terms()) CHECK(std::abs(term.coefficient()) < 1e-14);
  }
}

TEST_CASE("hermitian fermionic operators map to real coefficients") {
  // a+_0 a_2 + a+_2 a_0 + a+_1 a+_3 a_3 a_1
  const std::vector<FermionTerm> h{{0.7, {{0, true}, {2, false}}},
                                   {0.7, {{2, true}, {0, false}}},
                                   {1.3, {{1, true}, {3, true}, {3, false}, {1, false}}}};
  CHECK(jw_transform(h, 4).max_imag_coefficient() < 1e-15);
}

TEST_CASE("auxiliary ladder operators") {
  const cplx phase = std::polar(1.0, -std::numbers::pi / 4.0);
  const auto aux = aux_ladder(0, 1, +1, 2);
  const Mat expect = (oracle::annihilation(0, 2) + phase * oracle::annihilation(1, 2)) / 2.0;
  CHECK(max_diff(dense_matrix(aux.annihilation), expect) < 1e-14);
  CHECK(max_diff(dense_matrix(aux.creation), expect.adjoint()) < 1e-14);

  const auto minus = aux_ladder(0, 1, -1, 2);
  const Mat expect_minus = (oracle::annihilation(0, 2) - phase * oracle::annihilation(1, 2)) / 2.0;
  CHECK(max_diff(dense_matrix(minus.annihilation), expect_minus) < 1e-14);

  CHECK_THROWS_AS(aux_ladder(1, 1, +1, 2), RangeError);
  CHECK_THROWS_AS(aux_ladder(0, 1, 0, 2), RangeError);
}
