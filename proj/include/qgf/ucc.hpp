#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qgf/pauli.hpp"
#include "qgf/statevector.hpp"

namespace qgf {

/// Lowest n_elec spin orbitals occupied: X_{n_elec-1} ... X_0 |0...0>.
StateVector prepare_reference(int n_qubits, int n_elec);

/**
 * U(theta) = prod_k exp(-i theta_k P_k / 2) acting on the reference, with
 * generators[0] applied first.
 */
struct Ansatz {
  std::string tag;
  int n_qubits = 0;
  int n_elec = 0;
  std::vector<PauliTerm> generators;

  int n_params() const noexcept { return static_cast<int>(generators.size()); }
};

/// lih_u1, lih_u2 (12 qubits, 4 electrons); h2o_u1, h2o_u2 (14 qubits, 10 electrons).
Ansatz builtin_ansatz(std::string_view tag);

/// Parameter-free ansatz: the reference state itself.
Ansatz reference_ansatz(int n_qubits, int n_elec);

StateVector ansatz_state(const Ansatz& ansatz, std::span<const double> theta);

double energy(const Ansatz& ansatz, std::span<const double> theta, const PauliSum& h);
double energy(const Ansatz& ansatz, std::span<const double> theta, const CompiledOperator& h);

struct VqeConfig {
  double ftol = 1e-8;          // Hartree
  int max_evaluations = 2000;
  int max_iterations = -1;     // < 0: unlimited; 0: evaluate theta0 only
  double initial_step = 0.1;   // radians
  /// Called after every simplex iteration with (iteration, best theta, best energy).
  std::function<void(int, std::span<const double>, double)> trace;
};

struct VqeResult {
  std::vector<double> theta;
  double energy = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  double leak = 0.0;  // weight outside the n_elec sector
};

/// Nelder-Mead minimisation of energy(theta), restarted until a restart no longer improves by ftol.
VqeResult optimize(const Ansatz& ansatz, const PauliSum& h, std::vector<double> theta0, const VqeConfig& config = {});

/// Squared norm outside the fixed-popcount sector.
double sector_leak(const StateVector& state, int n_elec);

}  // namespace qgf
