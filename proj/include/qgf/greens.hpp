#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qgf/eigensolver.hpp"
#include "qgf/integrals.hpp"
#include "qgf/rng.hpp"
#include "qgf/statevector.hpp"

namespace qgf {

/// The N-electron state whose GF is built, with its energy <H>.
struct GroundState {
  StateVector state{0};
  double energy = 0.0;
  int n_electrons = 0;
  double discarded = 0.0;  // weight removed by the projection onto the sector
};

/// Projects psi onto the n_elec sector, renormalises, and evaluates <H>.
GroundState make_ground_state(const StateVector& psi, const PauliSum& h, int n_elec);

/// Lowest eigenstate of an N-electron spectrum.
GroundState ground_state_of(const SectorSpectrum& spectrum);

struct PoleResidue {
  double omega = 0.0;     // pole position (Hartree)
  Eigen::MatrixXcd b;     // residue over spin orbitals
};

/**
 * Electron and hole residues per pole group. Electron poles sit at
 * E^{N+1} - E_gs, hole poles at E_gs - E^{N-1}.
 */
struct TransitionData {
  int n_modes = 0;
  double e_gs = 0.0;
  std::vector<PoleResidue> electron;
  std::vector<PoleResidue> hole;
  bool sampled = false;
  long nmeas = 0;
  std::uint64_t seed = 0;

  Eigen::MatrixXcd residue_sum() const;
};

TransitionData exact_transitions(const GroundState& gs, const SectorSpectrum& plus, const SectorSpectrum& minus);

/// |<lambda| a^{+-dagger}_{mm'} |gs>|^2 (electron) and |<lambda| a^{+-}_{mm'} |gs>|^2 (hole), per pole group.
struct AuxWeights {
  std::vector<double> electron_plus, electron_minus;  // indexed by N+1 group
  std::vector<double> hole_plus, hole_minus;          // indexed by N-1 group
};

AuxWeights exact_aux_weights(const GroundState& gs, const SectorSpectrum& plus, const SectorSpectrum& minus, int m,
                             int m_prime);

/// B_{mm'} = e^{-i pi/4}(D+_{mm'} - D-_{mm'}) + e^{i pi/4}(D+_{m'm} - D-_{m'm}).
cplx recover_offdiag(double d_plus_mm, double d_minus_mm, double d_plus_pm, double d_minus_pm);

// --- sampling ----------------------------------------------------------------

/// One (ancilla pattern, pole group) cell of a circuit's outcome distribution.
struct OutcomeBin {
  int pattern = 0;
  int group = 0;
  bool electron = false;
  double probability = 0.0;
};

struct Histogram {
  std::vector<OutcomeBin> bins;
  std::vector<long> counts;  // aligned with bins
  long shots = 0;
};

/**
 * Joint outcome distribution of a preparation circuit followed by ideal
 * QPE on the collapsed register, for circuit C_m (m_prime < 0) or C_{mm'}.
 */
std::vector<OutcomeBin> circuit_distribution(const GroundState& gs, const SectorSpectrum& plus,
                                             const SectorSpectrum& minus, int m, int m_prime = -1);

/// N_meas shots drawn from a precomputed distribution.
Histogram sample_histogram(const std::vector<OutcomeBin>& dist, long nmeas, StreamRng& rng);

/// Shot-by-shot path: run the circuit, measure the ancillae, then sample QPE.
Histogram sample_shots(const GroundState& gs, const SectorSpectrum& plus, const SectorSpectrum& minus, int m,
                       int m_prime, long nmeas, StreamRng& rng);

/// Substream label for the circuit of (m, m'); m_prime < 0 for the diagonal circuit.
std::uint64_t component_id(int m, int m_prime = -1);

/// Precomputed distributions for every circuit of one GF construction.
class SamplingPlan {
 public:
  SamplingPlan(const GroundState& gs, const SectorSpectrum& plus, const SectorSpectrum& minus);

  int n_modes() const noexcept { return n_modes_; }
  const std::vector<OutcomeBin>& diag(int m) const { return diag_.at(m); }
  /// Circuit C_{mm'} for m != m'.
  const std::vector<OutcomeBin>& offdiag(int m, int m_prime) const;

  /// One sampled GF: every circuit run nmeas times on its own substream of `rng`.
  TransitionData sample(long nmeas, const StreamRng& rng, std::uint64_t seed_label = 0) const;

 private:
  int n_modes_;
  double e_gs_;
  std::vector<double> omega_e_, omega_h_;
  std::vector<std::vector<OutcomeBin>> diag_;
  std::vector<std::vector<OutcomeBin>> offdiag_;  // index m * n + m'
};

// --- Lehmann GF and derived quantities --------------------------------------

class LehmannGF {
 public:
  explicit LehmannGF(TransitionData data);

  int n_modes() const noexcept { return data_.n_modes; }
  const TransitionData& data() const noexcept { return data_; }

  /// Full spin-orbital matrix G(z).
  Eigen::MatrixXcd operator()(cplx z) const;
  /// Spatial-orbital block of spin s (0 up, 1 down).
  Eigen::MatrixXcd spin_block(cplx z, int s) const;

  /// Midpoint between the highest hole pole and the lowest electron pole carrying weight.
  double chemical_potential() const;
  double highest_hole_pole() const;
  double lowest_electron_pole() const;
  double lowest_hole_pole() const;

 private:
  TransitionData data_;
};

/// Poles at the HF orbital energies with unit residues, aufbau occupation.
LehmannGF hf_greens_function(const OrbitalEnergies& eps);

/// A(omega) = -(1/pi) Im Tr G(omega + i delta), all in Hartree units.
std::vector<double> spectral_function(const LehmannGF& g, std::span<const double> omega, double delta);

/// Sigma_c(z) = G_HF(z)^{-1} - G(z)^{-1} per spin block.
std::array<Eigen::MatrixXcd, 2> self_energy(const LehmannGF& g, const OrbitalEnergies& eps, cplx z);

/// gamma_s(p, q) = <a^dagger_{q s} a_{p s}> from the hole residues.
std::array<Eigen::MatrixXcd, 2> density_matrix(const LehmannGF& g);

struct GmReport {
  double e_hf = 0.0;
  double delta_e1 = 0.0;
  double delta_e2 = 0.0;       // contour quadrature
  double delta_e2_residue = 0.0;  // analytic residue sum
  double e_gm = 0.0;
  double mu = 0.0;
  int contour_nodes = 0;  // Gauss-Legendre nodes per edge at convergence
  std::array<Eigen::MatrixXcd, 2> gamma;
};

struct ContourOptions {
  double margin = 0.5;       // Hartree, left of the lowest hole pole
  double half_height = 0.5;  // Hartree
  int initial_nodes = 64;
  int max_nodes = 8192;
  double tol = 1e-8;
};

GmReport gm_energy(const LehmannGF& g, const MolecularIntegrals& ints, const OrbitalEnergies& eps,
                   const ContourOptions& options = {});

}  // namespace qgf
