#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qgf/pauli.hpp"

namespace qgf {

/// Spin-orbital index of spatial orbital p with spin s (0 = up, 1 = down).
constexpr int spin_orbital(int p, int s) { return 2 * p + s; }

/**
 * Jordan-Wigner unitaries for mode m on n qubits:
 *   U0 = Z_0 ... Z_{m-1} X_m,   U1 = i Z_0 ... Z_{m-1} Y_m,
 * so that a_m = (U0 + U1)/2 and a_m^dagger = (U0 - U1)/2.
 */
std::pair<PauliTerm, PauliTerm> jw_majorana_pair(int m, int n_qubits);

PauliSum jw_annihilation(int m, int n_qubits);
PauliSum jw_creation(int m, int n_qubits);

struct LadderOp {
  int mode;
  bool creation;
};

/// coefficient * ops[0] ops[1] ... (leftmost operator acts last).
struct FermionTerm {
  cplx coefficient = 1.0;
  std::vector<LadderOp> ops;
};

PauliSum jw_transform(const FermionTerm& term, int n_qubits);
PauliSum jw_transform(std::span<const FermionTerm> terms, int n_qubits);

/// Auxiliary pair (a_m +- e^{-i pi/4} a_{m'})/2 and its adjoint.
struct AuxLadder {
  PauliSum creation;
  PauliSum annihilation;
};

/// sign is +1 or -1.
AuxLadder aux_ladder(int m, int m_prime, int sign, int n_qubits);

/// a_m |b> on a computational basis state; returns false when the result vanishes.
inline bool annihilate_basis(int m, std::uint64_t basis, std::uint64_t& out, double& sign) {
  const std::uint64_t bit = std::uint64_t{1} << m;
  if (!(basis & bit)) return false;
  sign = (__builtin_popcountll(basis & (bit - 1)) & 1) ? -1.0 : 1.0;
  out = basis ^ bit;
  return true;
}

/// a_m^dagger |b> on a computational basis state; returns false when the result vanishes.
inline bool create_basis(int m, std::uint64_t basis, std::uint64_t& out, double& sign) {
  const std::uint64_t bit = std::uint64_t{1} << m;
  if (basis & bit) return false;
  sign = (__builtin_popcountll(basis & (bit - 1)) & 1) ? -1.0 : 1.0;
  out = basis | bit;
  return true;
}

}  // namespace qgf
