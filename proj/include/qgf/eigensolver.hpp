#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qgf/pauli.hpp"
#include "qgf/rng.hpp"
#include "qgf/statevector.hpp"

namespace qgf {

/// Eigenvalues closer than this (Hartree) form one pole / one QPE outcome.
inline constexpr double kDegeneracyTol = 1e-9;

/// Bitstrings of n_qubits with exactly n_electrons set, ascending.
std::vector<std::uint64_t> sector_basis(int n_qubits, int n_electrons);

struct PoleGroup {
  double energy = 0.0;  // energy of the lowest member
  int first = 0;        // index range [first, first + size) into the spectrum
  int size = 0;
};

/// Overlap of a register state with a sector, plus what fell outside it.
struct SectorProjection {
  Eigen::VectorXcd coeffs;  // amplitudes on the sector basis
  double leak = 0.0;        // squared norm outside the sector
};

class SectorSpectrum {
 public:
  SectorSpectrum() = default;
  SectorSpectrum(int n_qubits, int n_electrons, std::vector<std::uint64_t> basis, Eigen::VectorXd energies,
                 Eigen::MatrixXcd vectors);

  int n_qubits() const noexcept { return n_qubits_; }
  int n_electrons() const noexcept { return n_electrons_; }
  int dim() const noexcept { return static_cast<int>(basis_.size()); }

  const std::vector<std::uint64_t>& basis() const noexcept { return basis_; }
  const Eigen::VectorXd& energies() const noexcept { return energies_; }
  /// Eigenvectors as columns over the sector basis.
  const Eigen::MatrixXcd& vectors() const noexcept { return vectors_; }
  const std::vector<PoleGroup>& groups() const noexcept { return groups_; }

  /// Eigenstate lambda embedded in the full register.
  StateVector state(int lambda) const;

  SectorProjection project(const StateVector& state) const;
  StateVector embed(const Eigen::VectorXcd& coeffs) const;

  /// <lambda|psi> for every eigenstate, given sector coefficients.
  Eigen::VectorXcd overlaps(const Eigen::VectorXcd& coeffs) const;
  /// Summed |<lambda|psi>|^2 per pole group.
  std::vector<double> group_weights(const Eigen::VectorXcd& coeffs) const;

  /// Position of a basis index in the sector, or -1.
  int index_of(std::uint64_t bits) const;

 private:
  int n_qubits_ = 0;
  int n_electrons_ = 0;
  std::vector<std::uint64_t> basis_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXcd vectors_;
  std::vector<PoleGroup> groups_;
};

struct EigensolverOptions {
  int max_dim = 5000;
  std::filesystem::path cache_dir;  // empty disables the spectrum cache
};

/**
 * Dense diagonalization of H within the n_electrons sector. The sector block
 * is split into its connected components first; with number and S_z
 * conservation these are the spin sub-blocks.
 */
SectorSpectrum diagonalize_sector(const PauliSum& h, int n_electrons, const EigensolverOptions& options = {});

/**
 * Idealized phase estimation: distribution over the pole groups of a
 * register state. Throws SectorLeakError when more than 1e-8 of the weight
 * lies outside the sector.
 */
std::vector<double> qpe_distribution(const StateVector& reg, const SectorSpectrum& spectrum);

struct QpeOutcome {
  int group = 0;
  double energy = 0.0;
};

QpeOutcome ideal_qpe_sample(const StateVector& reg, const SectorSpectrum& spectrum, StreamRng& rng);

// --- cache -------------------------------------------------------------------

/// FNV-1a over the canonical term list of H.
std::uint64_t hamiltonian_hash(const PauliSum& h);

void save_spectrum(const std::filesystem::path& path, const SectorSpectrum& spectrum, std::uint64_t hash);
/// Empty when the file is missing, malformed, or keyed by another hash.
std::optional<SectorSpectrum> load_spectrum(const std::filesystem::path& path, std::uint64_t hash);

}  // namespace qgf
