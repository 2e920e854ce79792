#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qgf {

using cplx = std::complex<double>;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Largest register a Pauli string may act on (one bit per qubit in a 64-bit mask).
inline constexpr int kMaxQubits = 62;

/// Largest register for which dense 2^n x 2^n matrices are built.
inline constexpr int kMaxDenseQubits = 12;

/**
 * A phased Pauli string c * P_{n-1} ... P_1 P_0.
 *
 * Letters are stored as an (x, z) bit pair per qubit: X = (1,0), Y = (1,1),
 * Z = (0,1). Qubit 0 is the least significant bit of a basis index.
 */
class PauliTerm {
 public:
  explicit PauliTerm(int n_qubits, cplx coefficient = 1.0);
  PauliTerm(cplx coefficient, std::span<const Pauli> letters);

  /// Parses "Y5 X4 X3 X2" style text (qubit index after each letter).
  static PauliTerm parse(int n_qubits, std::string_view text, cplx coefficient = 1.0);

  int n_qubits() const noexcept { return n_; }
  cplx coefficient() const noexcept { return coeff_; }
  void set_coefficient(cplx c) noexcept { coeff_ = c; }

  Pauli letter(int qubit) const;
  PauliTerm& set(int qubit, Pauli p);

  std::uint64_t x_mask() const noexcept { return x_; }
  std::uint64_t z_mask() const noexcept { return z_; }
  /// Qubits carrying a non-identity letter.
  std::uint64_t support() const noexcept { return x_ | z_; }
  int weight() const noexcept;

  /// P|b> = factor |target>.
  std::pair<std::uint64_t, cplx> apply_to_basis(std::uint64_t basis) const noexcept {
    const int sign_bits = __builtin_popcountll(basis & z_) & 1;
    cplx f = coeff_ * y_phase_;
    return {basis ^ x_, sign_bits ? -f : f};
  }

  std::string str() const;

  friend bool operator==(const PauliTerm& a, const PauliTerm& b) {
    return a.n_ == b.n_ && a.x_ == b.x_ && a.z_ == b.z_ && a.coeff_ == b.coeff_;
  }

 private:
  void refresh_phase() noexcept;

  int n_;
  cplx coeff_;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  cplx y_phase_ = 1.0;  // i^{number of Y letters}
};

PauliTerm multiply(const PauliTerm& a, const PauliTerm& b);
inline PauliTerm operator*(const PauliTerm& a, const PauliTerm& b) { return multiply(a, b); }

/// Sum of Pauli strings with canonical merging: one entry per letter pattern.
class PauliSum {
 public:
  explicit PauliSum(int n_qubits) : n_(n_qubits) {}
  PauliSum(const PauliTerm& term);  // NOLINT(google-explicit-constructor)

  int n_qubits() const noexcept { return n_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  PauliSum& add(const PauliTerm& term);
  PauliSum& operator+=(const PauliSum& other);
  PauliSum& operator-=(const PauliSum& other);
  PauliSum& operator*=(cplx scale);

  /// Terms in canonical (x_mask, z_mask) order.
  std::vector<PauliTerm> terms() const;
  /// Coefficient of the identity string.
  cplx identity_coefficient() const;

  PauliSum adjoint() const;
  bool is_hermitian(double tol = 1e-12) const;
  /// Largest |Im c| over all terms.
  double max_imag_coefficient() const;
  /// Drops terms with |c| <= tol.
  PauliSum& prune(double tol = 1e-14);

 private:
  using Key = std::pair<std::uint64_t, std::uint64_t>;
  void check(const PauliTerm& t) const;

  int n_;
  std::map<Key, cplx> terms_;
};

PauliSum operator+(PauliSum a, const PauliSum& b);
PauliSum operator-(PauliSum a, const PauliSum& b);
PauliSum operator*(const PauliSum& a, const PauliSum& b);
PauliSum operator*(cplx s, PauliSum a);

Eigen::MatrixXcd dense_matrix(const PauliTerm& term);
Eigen::MatrixXcd dense_matrix(const PauliSum& sum);

}  // namespace qgf
