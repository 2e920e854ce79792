#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qgf/pauli.hpp"
#include "qgf/rng.hpp"

namespace qgf {

/// Dense register of 2^n amplitudes; qubit j is bit j of the basis index.
class StateVector {
 public:
  explicit StateVector(int n_qubits);  // |0...0>
  StateVector(int n_qubits, std::vector<cplx> amplitudes);
  static StateVector basis_state(int n_qubits, std::uint64_t index);

  int n_qubits() const noexcept { return n_; }
  std::size_t dim() const noexcept { return amps_.size(); }

  std::span<cplx> amplitudes() noexcept { return amps_; }
  std::span<const cplx> amplitudes() const noexcept { return amps_; }
  cplx& operator[](std::uint64_t i) noexcept { return amps_[i]; }
  const cplx& operator[](std::uint64_t i) const noexcept { return amps_[i]; }

  double norm_squared() const noexcept;
  /// Scales to unit norm and returns the previous norm.
  double normalize();
  /// <this|other>
  cplx inner(const StateVector& other) const;

  Eigen::Map<const Eigen::VectorXcd> as_eigen() const {
    return {amps_.data(), static_cast<Eigen::Index>(amps_.size())};
  }

  /// |0...0>_ancillae (x) this, with the k ancillae as the top qubits.
  StateVector with_ancillae(int k) const;
  /// Unnormalised register block whose top k qubits read `pattern`.
  StateVector ancilla_branch(int k, std::uint64_t pattern) const;

 private:
  int n_;
  std::vector<cplx> amps_;
};

// --- gates -----------------------------------------------------------------

struct XGate { int qubit; };
struct HGate { int qubit; };
struct RxGate { int qubit; double theta; };  // exp(-i theta X / 2)
struct RzGate { int qubit; double theta; };  // exp(-i theta Z / 2)
struct PhaseGate { int qubit; double phi; };  // diag(1, e^{i phi})
struct CnotGate { int control; int target; };

struct Control {
  int qubit;
  int value;  // 0 = open control, 1 = closed control
};

/// Applies a unit-modulus Pauli string when every control reads its value.
struct ControlledPauli {
  std::vector<Control> controls;
  PauliTerm op;
};

/// exp(-i theta P / 2) for a Hermitian Pauli string P (coefficient +-1).
struct PauliRotation {
  PauliTerm op;
  double theta;
};

using Gate = std::variant<XGate, HGate, RxGate, RzGate, PhaseGate, CnotGate, ControlledPauli, PauliRotation>;

class Circuit {
 public:
  explicit Circuit(int n_qubits) : n_(n_qubits) {}

  int n_qubits() const noexcept { return n_; }
  const std::vector<Gate>& gates() const noexcept { return gates_; }

  /// Validates qubit indices and unitarity before appending.
  Circuit& add(Gate gate);
  Circuit& append(const Circuit& other);

 private:
  int n_;
  std::vector<Gate> gates_;
};

void apply(StateVector& state, const Gate& gate);
void apply(StateVector& state, const Circuit& circuit);

/// Column-by-column dense matrix of a circuit (n <= kMaxDenseQubits).
Eigen::MatrixXcd circuit_matrix(const Circuit& circuit);

/**
 * Ancilla-assisted preparation of a_m|psi> and a_m^dagger|psi>.
 * The ancilla is qubit n_register; outcome 0 carries a_m|psi>, 1 carries a_m^dagger|psi>.
 */
Circuit build_diag_circuit(int m, int n_register);

/**
 * Two-ancilla preparation of the auxiliary states for the pair (m, m').
 * q0 = qubit n_register, q1 = qubit n_register + 1. Outcome (q1 q0):
 *   00 -> e^{i pi/4} a^+_{m'm}|psi>,  01 -> a^{+dagger}_{mm'}|psi>,
 *   10 -> -e^{i pi/4} a^-_{m'm}|psi>, 11 -> a^{-dagger}_{mm'}|psi>.
 */
Circuit build_offdiag_circuit(int m, int m_prime, int n_register);

/// Basis-change / CNOT-ladder / Rz decomposition of exp(-i theta P / 2).
Circuit compile_pauli_rotation(const PauliTerm& op, double theta);

// --- measurement -----------------------------------------------------------

struct MeasurementRecord {
  std::vector<int> outcome;  // one bit per measured qubit, in request order
  double probability = 0.0;
  StateVector post;
};

/// Probability of every outcome pattern; bit j of the pattern is qubits[j].
std::vector<double> outcome_probabilities(const StateVector& state, std::span<const int> qubits);

/// Born-rule projective measurement with collapse and renormalisation.
MeasurementRecord measure(const StateVector& state, std::span<const int> qubits, StreamRng& rng);

/// <psi|op|psi> for Hermitian op.
double expectation(const StateVector& state, const PauliSum& op);

/**
 * A Pauli sum compiled into a sparse row-major matrix over the full 2^n
 * space, for repeated application inside optimisation loops.
 */
class CompiledOperator {
 public:
  explicit CompiledOperator(const PauliSum& op);

  int n_qubits() const noexcept { return n_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  void apply(std::span<const cplx> in, std::span<cplx> out) const;
  /// Re <psi|op|psi>; op must be Hermitian.
  double expectation(const StateVector& state) const;

 private:
  int n_;
  std::vector<std::size_t> row_start_;
  std::vector<std::uint64_t> cols_;
  std::vector<cplx> values_;
};

}  // namespace qgf
