#include "qgf/greens.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/legendre.hpp>
#include <boost/random/discrete_distribution.hpp>

#include "qgf/errors.hpp"
#include "qgf/jordan_wigner.hpp"

namespace qgf {

namespace {

const cplx kEighth = std::polar(1.0, std::numbers::pi / 4.0);  // e^{i pi/4}

bool has_minus(int n_electrons) { return n_electrons > 0; }
bool has_plus(int n_electrons, int n_qubits) { return n_electrons < n_qubits; }

void check_sectors(const GroundState& gs, const SectorSpectrum& plus, const SectorSpectrum& minus) {
  const int n = gs.state.n_qubits();
  if (has_plus(gs.n_electrons, n) && (plus.n_qubits() != n || plus.n_electrons() != gs.n_electrons + 1)) {
    throw DimensionError("electron-addition spectrum is not the (N+1)-electron sector of this register");
  }
  if (has_minus(gs.n_electrons) && (minus.n_qubits() != n || minus.n_electrons() != gs.n_electrons - 1)) {
    throw DimensionError("electron-removal spectrum is not the (N-1)-electron sector of this register");
  }
}

// Sector coefficients of a_m^dagger |gs> (creation) or a_m |gs> over `target`'s basis.
Eigen::VectorXcd ladder_image(const StateVector& gs, const SectorSpectrum& target, int m, bool creation) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(target.dim());
  const std::uint64_t bit = std::uint64_t{1} << m;
  for (int i = 0; i < target.dim(); ++i) {
    const std::uint64_t b = target.basis()[i];
    std::uint64_t src = 0;
    std::uint64_t out = 0;
    double sign = 1.0;
    if (creation) {
      if (!(b & bit)) continue;
      src = b ^ bit;
      create_basis(m, src, out, sign);
    } else {
      if (b & bit) continue;
      src = b | bit;
      annihilate_basis(m, src, out, sign);
    }
    v[i] = sign * gs[src];
  }
  return v;
}

// Rows: eigenstates of `target`; column m: <lambda| op_m |gs>.
Eigen::MatrixXcd overlap_table(const GroundState& gs, const SectorSpectrum& target, bool creation) {
  const int n = gs.state.n_qubits();
  Eigen::MatrixXcd images(target.dim(), n);
  for (int m = 0; m < n; ++m) images.col(m) = ladder_image(gs.state, target, m, creation);
  return target.vectors().adjoint() * images;
}

double pole_weight(const Eigen::MatrixXcd& b) { return b.diagonal().cwiseAbs().sum(); }

constexpr double kWeightFloor = 1e-12;

}  // namespace

GroundState make_ground_state(const StateVector& psi, const PauliSum& h, int n_elec) {
  if (h.n_qubits() != psi.n_qubits()) throw DimensionError("Hamiltonian and state registers differ");
  StateVector s = psi;
  const double total = s.norm_squared();
  auto a = s.amplitudes();
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    if (std::popcount(i) != n_elec) a[i] = 0.0;
  }
  const double kept = s.norm_squared();
  if (kept <= 1e-300) throw SectorLeakError("state has no weight in the requested sector");
  s.normalize();
  GroundState gs{std::move(s), 0.0, n_elec, std::max(0.0, 1.0 - kept / total)};
  gs.energy = expectation(gs.state, h);
  return gs;
}

GroundState ground_state_of(const SectorSpectrum& spectrum) {
  if (spectrum.dim() == 0) throw RangeError("empty spectrum");
  if (spectrum.groups().front().size != 1) {
    throw RangeError("degenerate ground state is not supported");
  }
  return GroundState{spectrum.state(0), spectrum.energies()[0], spectrum.n_electrons(), 0.0};
}

Eigen::MatrixXcd TransitionData::residue_sum() const {
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n_modes, n_modes);
  for (const auto& p : electron) s += p.b;
  for (const auto& p : hole) s += p.b;
  return s;
}

TransitionData exact_transitions(const GroundState& gs, const SectorSpectrum& plus, const SectorSpectrum& minus) {
  check_sectors(gs, plus, minus);
  const int n = gs.state.n_qubits();
  TransitionData t;
  t.n_modes = n;
  t.e_gs = gs.energy;
  if (has_plus(gs.n_electrons, n)) {
    const Eigen::MatrixXcd c = overlap_table(gs, plus, true);  // c(lambda, m) = <lambda|a_m^dagger|gs>
    for (const auto& g : plus.groups()) {
      const auto rows = c.middleRows(g.first, g.size);
      t.electron.push_back({g.energy - gs.energy, rows.adjoint() * rows});
    }
  }
  if (has_minus(gs.n_electrons)) {
    const Eigen::MatrixXcd hm = overlap_table(gs, minus, false);  // h(lambda, m) = <lambda|a_m|gs>
    for (const auto& g : minus.groups()) {
      const auto rows = hm.middleRows(g.first, g.size);
      t.hole.push_back({gs.energy - g.energy, rows.transpose() * rows.conjugate()});
    }
  }
  return t;
}

AuxWeights exact_aux_weights(const GroundState& gs, const SectorSpectrum& plus, const SectorSpectrum& minus, int m,
                             int m_prime) {
  check_sectors(gs, plus, minus);
  const int n = gs.state.n_qubits();
  if (m == m_prime || m < 0 || m_prime < 0 || m >= n || m_prime >= n) throw RangeError("invalid mode pair");
  AuxWeights w;
  if (has_plus(gs.n_electrons, n)) {
    const Eigen::VectorXcd cm = plus.overlaps(ladder_image(gs.state, plus, m, true));
    const Eigen::VectorXcd cp = plus.overlaps(ladder_image(gs.state, plus, m_prime, true));
    for (const auto& g : plus.groups()) {
      double wp = 0.0;
      double wm = 0.0;
      for (int k = g.first; k < g.first + g.size; ++k) {
        wp += std::norm((cm[k] + kEighth * cp[k]) / 2.0);
        wm += std::norm((cm[k] - kEighth * cp[k]) / 2.0);
      }
      w.electron_plus.push_back(wp);
      w.electron_minus.push_back(wm);
    }
  }
  if (has_minus(gs.n_electrons)) {
    const Eigen::VectorXcd hm = minus.overlaps(ladder_image(gs.state, minus, m, false));
    const Eigen::VectorXcd hp = minus.overlaps(ladder_image(gs.state, minus, m_prime, false));
    for (const auto& g : minus.groups()) {
      double wp = 0.0;
      double wm = 0.0;
      for (int k = g.first; k < g.first + g.size; ++k) {
        wp += std::norm((hm[k] + std::conj(kEighth) * hp[k]) / 2.0);
        wm += std::norm((hm[k] - std::conj(kEighth) * hp[k]) / 2.0);
      }
      w.hole_plus.push_back(wp);
      w.hole_minus.push_back(wm);
    }
  }
  return w;
}

cplx recover_offdiag(double d_plus_mm, double d_minus_mm, double d_plus_pm, double d_minus_pm) {
  return std::conj(kEighth) * (d_plus_mm - d_minus_mm) + kEighth * (d_plus_pm - d_minus_pm);
}

// --- sampling ----------------------------------------------------------------

std::uint64_t component_id(int m, int m_prime) {
  return m_prime < 0 ? static_cast<std::uint64_t>(m) : 1000 + static_cast<std::uint64_t>(m) * 64 + m_prime;
}

namespace {

Circuit circuit_for(int m, int m_prime, int n) {
  return m_prime < 0 ? build_diag_circuit(m, n) : build_offdiag_circuit(m, m_prime, n);
}

// Bit 0 of a pattern is the first ancilla: 0 routes to N-1, 1 to N+1.
bool is_electron(int pattern) { return pattern & 1; }

}  // namespace

std::vector<OutcomeBin> circuit_distribution(const GroundState& gs, const SectorSpectrum& plus,
                                             const SectorSpectrum& minus, int m, int m_prime) {
  check_sectors(gs, plus, minus);
  const int n = gs.state.n_qubits();
  const int k = m_prime < 0 ? 1 : 2;
  StateVector s = gs.state.with_ancillae(k);
  apply(s, circuit_for(m, m_prime, n));

  std::vector<OutcomeBin> bins;
  for (int pattern = 0; pattern < (1 << k); ++pattern) {
    const bool e = is_electron(pattern);
    if (e ? !has_plus(gs.n_electrons, n) : !has_minus(gs.n_electrons)) continue;
    const SectorSpectrum& spec = e ? plus : minus;
    const StateVector branch = s.ancilla_branch(k, static_cast<std::uint64_t>(pattern));
    const double p = branch.norm_squared();
    std::vector<double> w(spec.groups().size(), 0.0);
    if (p > 1e-14) w = qpe_distribution(branch, spec);
    for (std::size_t g = 0; g < w.size(); ++g) bins.push_back({pattern, static_cast<int>(g), e, p * w[g]});
  }
  return bins;
}

Histogram sample_histogram(const std::vector<OutcomeBin>& dist, long nmeas, StreamRng& rng) {
  if (nmeas < 1) throw RangeError("N_meas must be at least 1");
  Histogram h{dist, std::vector<long>(dist.size(), 0), nmeas};
  std::vector<double> p(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) p[i] = dist[i].probability;
  boost::random::discrete_distribution<std::size_t, double> pick(p.begin(), p.end());
  for (long s = 0; s < nmeas; ++s) ++h.counts[pick(rng)];
  return h;
}

Histogram sample_shots(const GroundState& gs, const SectorSpectrum& plus, const SectorSpectrum& minus, int m,
                       int m_prime, long nmeas, StreamRng& rng) {
  check_sectors(gs, plus, minus);
  if (nmeas < 1) throw RangeError("N_meas must be at least 1");
  const int n = gs.state.n_qubits();
  const int k = m_prime < 0 ? 1 : 2;
  StateVector s = gs.state.with_ancillae(k);
  apply(s, circuit_for(m, m_prime, n));

  Histogram h;
  h.shots = nmeas;
  for (int pattern = 0; pattern < (1 << k); ++pattern) {
    const bool e = is_electron(pattern);
    if (e ? !has_plus(gs.n_electrons, n) : !has_minus(gs.n_electrons)) continue;
    const auto& spec = e ? plus : minus;
    for (std::size_t g = 0; g < spec.groups().size(); ++g) h.bins.push_back({pattern, static_cast<int>(g), e, 0.0});
  }
  h.counts.assign(h.bins.size(), 0);

  std::vector<int> ancillae;
  for (int j = 0; j < k; ++j) ancillae.push_back(n + j);
  for (long shot = 0; shot < nmeas; ++shot) {
    const MeasurementRecord rec = measure(s, ancillae, rng);
    int pattern = 0;
    for (int j = 0; j < k; ++j) pattern |= rec.outcome[j] << j;
    const StateVector reg = rec.post.ancilla_branch(k, static_cast<std::uint64_t>(pattern));
    const QpeOutcome q = ideal_qpe_sample(reg, is_electron(pattern) ? plus : minus, rng);
    const auto it = std::find_if(h.bins.begin(), h.bins.end(),
                                 [&](const OutcomeBin& b) { return b.pattern == pattern && b.group == q.group; });
    ++h.counts[static_cast<std::size_t>(it - h.bins.begin())];
  }
  return h;
}

SamplingPlan::SamplingPlan(const GroundState& gs, const SectorSpectrum& plus, const SectorSpectrum& minus)
    : n_modes_(gs.state.n_qubits()), e_gs_(gs.energy) {
  check_sectors(gs, plus, minus);
  if (has_plus(gs.n_electrons, n_modes_))
    for (const auto& g : plus.groups()) omega_e_.push_back(g.energy - gs.energy);
  if (has_minus(gs.n_electrons))
    for (const auto& g : minus.groups()) omega_h_.push_back(gs.energy - g.energy);
  for (int m = 0; m < n_modes_; ++m) diag_.push_back(circuit_distribution(gs, plus, minus, m));
  offdiag_.resize(static_cast<std::size_t>(n_modes_) * n_modes_);
  for (int m = 0; m < n_modes_; ++m)
    for (int mp = 0; mp < n_modes_; ++mp)
      if (m != mp) offdiag_[m * n_modes_ + mp] = circuit_distribution(gs, plus, minus, m, mp);
}

const std::vector<OutcomeBin>& SamplingPlan::offdiag(int m, int m_prime) const {
  if (m == m_prime || m < 0 || m_prime < 0 || m >= n_modes_ || m_prime >= n_modes_) {
    throw RangeError("invalid mode pair");
  }
  return offdiag_[m * n_modes_ + m_prime];
}

TransitionData SamplingPlan::sample(long nmeas, const StreamRng& rng, std::uint64_t seed_label) const {
  const int n = n_modes_;
  TransitionData t;
  t.n_modes = n;
  t.e_gs = e_gs_;
  t.sampled = true;
  t.nmeas = nmeas;
  t.seed = seed_label;
  for (double w : omega_e_) t.electron.push_back({w, Eigen::MatrixXcd::Zero(n, n)});
  for (double w : omega_h_) t.hole.push_back({w, Eigen::MatrixXcd::Zero(n, n)});
  const double inv = 1.0 / static_cast<double>(nmeas);
  auto residue = [&](bool electron, int group) -> Eigen::MatrixXcd& {
    return electron ? t.electron[group].b : t.hole[group].b;
  };

  for (int m = 0; m < n; ++m) {
    StreamRng sub = rng.substream(component_id(m));
    const Histogram h = sample_histogram(diag_[m], nmeas, sub);
    for (std::size_t i = 0; i < h.bins.size(); ++i) residue(h.bins[i].electron, h.bins[i].group)(m, m) += h.counts[i] * inv;
  }

  // d[kind][group] for one ordered pair; kind: 0 e+, 1 e-, 2 h+, 3 h-
  const std::size_t ne = omega_e_.size();
  const std::size_t nh = omega_h_.size();
  struct Aux {
    std::vector<double> ep, em, hp, hm;
  };
  auto tally = [&](int a, int b, Aux& ab, Aux& ba) {
    StreamRng sub = rng.substream(component_id(a, b));
    const Histogram h = sample_histogram(offdiag_[a * n + b], nmeas, sub);
    for (std::size_t i = 0; i < h.bins.size(); ++i) {
      const double f = h.counts[i] * inv;
      const int g = h.bins[i].group;
      switch (h.bins[i].pattern) {
        case 1: ab.ep[g] += f; break;  // a^{+dagger}_{ab}
        case 3: ab.em[g] += f; break;  // a^{-dagger}_{ab}
        case 0: ba.hp[g] += f; break;  // a^{+}_{ba}
        case 2: ba.hm[g] += f; break;  // a^{-}_{ba}
        default: break;
      }
    }
  };

  for (int m = 0; m < n; ++m) {
    for (int mp = 0; mp < m; ++mp) {
      Aux fwd{std::vector<double>(ne), std::vector<double>(ne), std::vector<double>(nh), std::vector<double>(nh)};
      Aux bwd = fwd;
      tally(m, mp, fwd, bwd);
      tally(mp, m, bwd, fwd);
      for (std::size_t g = 0; g < ne; ++g) {
        const cplx b = recover_offdiag(fwd.ep[g], fwd.em[g], bwd.ep[g], bwd.em[g]);
        t.electron[g].b(m, mp) = b;
        t.electron[g].b(mp, m) = std::conj(b);
      }
      for (std::size_t g = 0; g < nh; ++g) {
        const cplx b = recover_offdiag(fwd.hp[g], fwd.hm[g], bwd.hp[g], bwd.hm[g]);
        t.hole[g].b(m, mp) = b;
        t.hole[g].b(mp, m) = std::conj(b);
      }
    }
  }
  return t;
}

// --- LehmannGF ---------------------------------------------------------------

LehmannGF::LehmannGF(TransitionData data) : data_(std::move(data)) {
  for (const auto* list : {&data_.electron, &data_.hole}) {
    for (const auto& p : *list) {
      if (p.b.rows() != data_.n_modes || p.b.cols() != data_.n_modes) {
        throw DimensionError("residue matrix does not match the mode count");
      }
    }
  }
}

Eigen::MatrixXcd LehmannGF::operator()(cplx z) const {
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n_modes(), n_modes());
  for (const auto& p : data_.electron) g += p.b / (z - p.omega);
  for (const auto& p : data_.hole) g += p.b / (z - p.omega);
  return g;
}

Eigen::MatrixXcd LehmannGF::spin_block(cplx z, int s) const {
  if (s != 0 && s != 1) throw RangeError("spin index must be 0 or 1");
  const int n_orb = n_modes() / 2;
  const Eigen::MatrixXcd full = (*this)(z);
  Eigen::MatrixXcd b(n_orb, n_orb);
  for (int p = 0; p < n_orb; ++p)
    for (int q = 0; q < n_orb; ++q) b(p, q) = full(spin_orbital(p, s), spin_orbital(q, s));
  return b;
}

double LehmannGF::highest_hole_pole() const {
  double w = -std::numeric_limits<double>::infinity();
  for (const auto& p : data_.hole)
    if (pole_weight(p.b) > kWeightFloor) w = std::max(w, p.omega);
  return w;
}

double LehmannGF::lowest_hole_pole() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& p : data_.hole)
    if (pole_weight(p.b) > kWeightFloor) w = std::min(w, p.omega);
  return w;
}

double LehmannGF::lowest_electron_pole() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& p : data_.electron)
    if (pole_weight(p.b) > kWeightFloor) w = std::min(w, p.omega);
  return w;
}

double LehmannGF::chemical_potential() const {
  const double hi = highest_hole_pole();
  const double lo = lowest_electron_pole();
  if (std::isfinite(hi) && std::isfinite(lo)) return 0.5 * (hi + lo);
  // Filled or empty shell: only one side carries poles.
  if (std::isfinite(hi)) return hi + 0.5;
  if (std::isfinite(lo)) return lo - 0.5;
  return 0.0;
}

LehmannGF hf_greens_function(const OrbitalEnergies& eps) {
  const int n_orb = static_cast<int>(eps.eps.size());
  TransitionData t;
  t.n_modes = 2 * n_orb;
  for (int p = 0; p < n_orb; ++p) {
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(t.n_modes, t.n_modes);
    b(spin_orbital(p, 0), spin_orbital(p, 0)) = 1.0;
    b(spin_orbital(p, 1), spin_orbital(p, 1)) = 1.0;
    (p < eps.n_occ ? t.hole : t.electron).push_back({eps.eps[p], b});
  }
  return LehmannGF(std::move(t));
}

std::vector<double> spectral_function(const LehmannGF& g, std::span<const double> omega, double delta) {
  if (!(delta > 0.0)) throw RangeError("broadening delta must be positive");
  std::vector<std::pair<double, cplx>> poles;
  for (const auto* list : {&g.data().electron, &g.data().hole})
    for (const auto& p : *list) poles.emplace_back(p.omega, p.b.trace());
  std::vector<double> a(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const cplx z{omega[i], delta};
    cplx tr{};
    for (const auto& [w, t] : poles) tr += t / (z - w);
    a[i] = -tr.imag() / std::numbers::pi;
  }
  return a;
}

std::array<Eigen::MatrixXcd, 2> self_energy(const LehmannGF& g, const OrbitalEnergies& eps, cplx z) {
  const int n_orb = g.n_modes() / 2;
  if (eps.eps.size() != n_orb) throw DimensionError("orbital energies do not match the GF");
  for (const auto* list : {&g.data().electron, &g.data().hole}) {
    for (const auto& p : *list) {
      if (pole_weight(p.b) > kWeightFloor && std::abs(z - p.omega) < 1e-10) {
        throw PoleProximityError("z coincides with a pole of G at " + std::to_string(p.omega) +
                                 " Ha; shift the frequency grid");
      }
    }
  }
  std::array<Eigen::MatrixXcd, 2> out;
  for (int s = 0; s < 2; ++s) {
    const Eigen::MatrixXcd gs = g.spin_block(z, s);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(gs);
    if (!(lu.rcond() > 1e-13)) {
      throw PoleProximityError("G(z) is numerically singular at z = (" + std::to_string(z.real()) + ", " +
                               std::to_string(z.imag()) + "); shift the frequency grid");
    }
    Eigen::MatrixXcd ghf_inv = Eigen::MatrixXcd::Zero(n_orb, n_orb);
    for (int p = 0; p < n_orb; ++p) ghf_inv(p, p) = z - eps.eps[p];
    out[s] = ghf_inv - lu.inverse();
  }
  return out;
}

std::array<Eigen::MatrixXcd, 2> density_matrix(const LehmannGF& g) {
  const int n_orb = g.n_modes() / 2;
  std::array<Eigen::MatrixXcd, 2> gamma{Eigen::MatrixXcd::Zero(n_orb, n_orb), Eigen::MatrixXcd::Zero(n_orb, n_orb)};
  for (const auto& pole : g.data().hole)
    for (int s = 0; s < 2; ++s)
      for (int p = 0; p < n_orb; ++p)
        for (int q = 0; q < n_orb; ++q) gamma[s](p, q) += pole.b(spin_orbital(p, s), spin_orbital(q, s));
  return gamma;
}

// --- Galitskii-Migdal --------------------------------------------------------

namespace {

struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

GaussRule gauss_legendre(int n) {
  GaussRule r;
  const auto zeros = boost::math::legendre_p_zeros<double>(n);  // non-negative half
  for (double x0 : zeros) {
    const double d = boost::math::legendre_p_prime<double>(n, x0);
    const double w = 2.0 / ((1.0 - x0 * x0) * d * d);
    r.x.push_back(x0);
    r.w.push_back(w);
    if (x0 != 0.0) {
      r.x.push_back(-x0);
      r.w.push_back(w);
    }
  }
  return r;
}

}  // namespace

GmReport gm_energy(const LehmannGF& g, const MolecularIntegrals& ints, const OrbitalEnergies& eps,
                   const ContourOptions& options) {
  const int n_orb = ints.n_orb();
  if (g.n_modes() != 2 * n_orb) throw DimensionError("GF and integrals describe different orbital counts");
  if (eps.eps.size() != n_orb) throw DimensionError("orbital energies do not match the integrals");

  GmReport r;
  r.e_hf = hf_total_energy(ints, eps);
  r.gamma = density_matrix(g);
  const Eigen::MatrixXd heps = ints.h() + Eigen::MatrixXd(eps.eps.asDiagonal());
  for (int s = 0; s < 2; ++s) {
    Eigen::MatrixXcd dg = r.gamma[s];
    for (int p = 0; p < eps.n_occ; ++p) dg(p, p) -= 1.0;
    r.delta_e1 += 0.5 * (heps.cast<cplx>() * dg).trace().real();
  }

  // Tr[Sigma_c G] = Tr[G_HF^{-1} G] - n_orb per spin, so only the poles of G contribute.
  std::vector<double> eps_mode(2 * n_orb);
  for (int m = 0; m < 2 * n_orb; ++m) eps_mode[m] = eps.eps[m / 2];
  struct Pole {
    double omega;
    Eigen::VectorXcd diag;
  };
  std::vector<Pole> poles;
  for (const auto* list : {&g.data().electron, &g.data().hole})
    for (const auto& p : *list)
      if (pole_weight(p.b) > 0.0) poles.push_back({p.omega, p.b.diagonal()});

  for (const auto& p : g.data().hole) {
    for (int m = 0; m < 2 * n_orb; ++m) r.delta_e2_residue += 0.5 * ((p.omega - eps_mode[m]) * p.b(m, m)).real();
  }

  r.mu = g.chemical_potential();
  const double lo = g.lowest_hole_pole();
  if (!std::isfinite(lo)) {
    r.e_gm = r.e_hf + r.delta_e1;
    return r;
  }
  if (g.lowest_electron_pole() <= g.highest_hole_pole()) {
    throw ContourError("electron and hole poles overlap; no gap for the contour to cross");
  }
  const double a = lo - options.margin;
  const double b = r.mu;
  for (const auto& p : poles) {
    if (std::abs(p.omega - a) < 1e-6 || std::abs(p.omega - b) < 1e-6) {
      throw ContourError("contour passes within 1e-6 Ha of the pole at " + std::to_string(p.omega) +
                         " Ha; widen the margin");
    }
  }

  auto integrand = [&](cplx z) {
    cplx f = -static_cast<double>(2 * n_orb);
    for (const auto& p : poles) {
      const cplx inv = 1.0 / (z - p.omega);
      for (int m = 0; m < 2 * n_orb; ++m) f += (z - eps_mode[m]) * p.diag[m] * inv;
    }
    return f;
  };
  const double hh = options.half_height;
  const std::array<cplx, 5> corners{cplx{a, -hh}, cplx{b, -hh}, cplx{b, hh}, cplx{a, hh}, cplx{a, -hh}};
  auto integrate = [&](int nodes) {
    const GaussRule rule = gauss_legendre(nodes);
    cplx acc{};
    for (int e = 0; e < 4; ++e) {
      const cplx mid = 0.5 * (corners[e] + corners[e + 1]);
      const cplx half = 0.5 * (corners[e + 1] - corners[e]);
      for (std::size_t k = 0; k < rule.x.size(); ++k) acc += rule.w[k] * integrand(mid + rule.x[k] * half) * half;
    }
    return 0.5 * (acc / cplx{0.0, 2.0 * std::numbers::pi}).real();
  };

  int nodes = options.initial_nodes;
  double prev = integrate(nodes);
  while (true) {
    if (2 * nodes > options.max_nodes) throw ContourError("contour quadrature did not converge");
    nodes *= 2;
    const double cur = integrate(nodes);
    const bool done = std::abs(cur - prev) < options.tol;
    prev = cur;
    if (done) break;
  }
  r.delta_e2 = prev;
  r.contour_nodes = nodes;
  if (std::abs(r.delta_e2 - r.delta_e2_residue) > 1e-7) {
    throw ContourError("contour and residue evaluations of Delta E2 disagree by " +
                       std::to_string(std::abs(r.delta_e2 - r.delta_e2_residue)) + " Ha");
  }
  r.e_gm = r.e_hf + r.delta_e1 + r.delta_e2;
  return r;
}

}  // namespace qgf
