#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qgf/pauli.hpp"

namespace qgf {

/**
 * One- and two-electron integrals over spatial molecular orbitals, in Hartree.
 *
 * Two-electron integrals are chemists' notation (pq|rs) with the 8-fold
 * permutational symmetry of real orbitals; they are stored densely.
 */
class MolecularIntegrals {
 public:
  MolecularIntegrals() = default;
  MolecularIntegrals(int n_orb, int n_elec);

  int n_orb() const noexcept { return n_orb_; }
  int n_elec() const noexcept { return n_elec_; }
  int ms2() const noexcept { return ms2_; }
  double e_nucl() const noexcept { return e_nucl_; }
  const Eigen::MatrixXd& h() const noexcept { return h_; }

  void set_ms2(int ms2) noexcept { ms2_ = ms2; }
  void set_e_nucl(double e) noexcept { e_nucl_ = e; }
  /// Sets h(p,q) and h(q,p).
  void set_h(int p, int q, double v);

  double eri(int p, int q, int r, int s) const {
    return eri_[((static_cast<std::size_t>(p) * n_orb_ + q) * n_orb_ + r) * n_orb_ + s];
  }
  /// Sets all eight permutations of (pq|rs).
  void set_eri(int p, int q, int r, int s, double v);

  /// Throws RangeError unless h and eri carry their symmetries to tol.
  void validate(double tol = 1e-10) const;

 private:
  int n_orb_ = 0;
  int n_elec_ = 0;
  int ms2_ = 0;
  double e_nucl_ = 0.0;
  Eigen::MatrixXd h_;
  std::vector<double> eri_;
};

/// HF orbital energies eps_p = h_pp + sum_{q occ} [2(pp|qq) - (pq|qp)].
struct OrbitalEnergies {
  Eigen::VectorXd eps;
  int n_occ = 0;  // doubly occupied orbitals
};

MolecularIntegrals parse_fcidump(std::istream& in);
MolecularIntegrals read_fcidump(const std::filesystem::path& path);
void write_fcidump(std::ostream& out, const MolecularIntegrals& ints, double threshold = 0.0);

OrbitalEnergies hf_orbital_energies(const MolecularIntegrals& ints);

/// E_nucl + sum_{p occ} (h_pp + eps_p).
double hf_total_energy(const MolecularIntegrals& ints, const OrbitalEnergies& eps);

/// Second-quantized Hamiltonian on 2*n_orb qubits (spin-orbital m = 2p + s), JW-mapped.
PauliSum build_qubit_hamiltonian(const MolecularIntegrals& ints);

using ModelParams = std::map<std::string, double>;

/**
 * Built-in model systems:
 *   single_level   params eps (default -1), nelec (default 2)
 *   hubbard_dimer  params t (default 1), U (default 2); half filling,
 *                  expressed in the bonding/antibonding orbital basis.
 */
MolecularIntegrals builtin_model(std::string_view name, const ModelParams& params = {});

/**
 * Resolves a system source: either "builtin:<name>[,key=value...]" or an
 * FCIDUMP path.
 */
MolecularIntegrals load_system(std::string_view source);

}  // namespace qgf
