#include "qgf/jordan_wigner.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qgf/errors.hpp"

namespace qgf {

namespace {

void check_mode(int m, int n_qubits) {
  if (m < 0 || m >= n_qubits) {
    throw RangeError("spin-orbital " + std::to_string(m) + " outside [0, " +
                     std::to_string(n_qubits) + ")");
  }
}

}  // namespace

std::pair<PauliTerm, PauliTerm> jw_majorana_pair(int m, int n_qubits) {
  check_mode(m, n_qubits);
  PauliTerm u0(n_qubits, 1.0);
  PauliTerm u1(n_qubits, cplx{0.0, 1.0});
  for (int q = 0; q < m; ++q) {
    u0.set(q, Pauli::Z);
    u1.set(q, Pauli::Z);
  }
  u0.set(m, Pauli::X);
  u1.set(m, Pauli::Y);
  return {u0, u1};
}

PauliSum jw_annihilation(int m, int n_qubits) {
  auto [u0, u1] = jw_majorana_pair(m, n_qubits);
  PauliSum out(n_qubits);
  out.add(u0).add(u1);
  return out *= 0.5;
}

PauliSum jw_creation(int m, int n_qubits) {
  auto [u0, u1] = jw_majorana_pair(m, n_qubits);
  u1.set_coefficient(-u1.coefficient());
  PauliSum out(n_qubits);
  out.add(u0).add(u1);
  return out *= 0.5;
}

PauliSum jw_transform(const FermionTerm& term, int n_qubits) {
  PauliSum out(PauliTerm(n_qubits, term.coefficient));
  for (const auto& op : term.ops) {
    check_mode(op.mode, n_qubits);
    out = out * (op.creation ? jw_creation(op.mode, n_qubits) : jw_annihilation(op.mode, n_qubits));
    out.prune(1e-15);
    if (out.empty()) break;
  }
  return out;
}

PauliSum jw_transform(std::span<const FermionTerm> terms, int n_qubits) {
  PauliSum out(n_qubits);
  for (const auto& t : terms) out += jw_transform(t, n_qubits);
  return out.prune(1e-15);
}

AuxLadder aux_ladder(int m, int m_prime, int sign, int n_qubits) {
  check_mode(m, n_qubits);
  check_mode(m_prime, n_qubits);
  if (m == m_prime) throw RangeError("auxiliary ladder operators need m != m'");
  if (sign != 1 && sign != -1) throw RangeError("auxiliary ladder sign must be +1 or -1");
  const cplx phase = std::polar(1.0, -std::numbers::pi / 4.0);
  PauliSum ann = jw_annihilation(m, n_qubits) + (double(sign) * phase) * jw_annihilation(m_prime, n_qubits);
  ann *= 0.5;
  ann.prune(1e-15);
  return {ann.adjoint(), ann};
}

}  // namespace qgf
