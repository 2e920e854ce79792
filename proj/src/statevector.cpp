#include "qgf/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "qgf/errors.hpp"
#include "qgf/jordan_wigner.hpp"

namespace qgf {

namespace {

constexpr cplx kI{0.0, 1.0};

void check_qubit(int q, int n) {
  if (q < 0 || q >= n) {
    throw RangeError("qubit " + std::to_string(q) + " outside [0, " + std::to_string(n) + ")");
  }
}

std::uint64_t bit(int q) { return std::uint64_t{1} << q; }

// Visits every index with the given qubit cleared.
template <typename F>
void for_each_pair(std::size_t dim, int q, F&& f) {
  const std::uint64_t stride = bit(q);
  for (std::uint64_t base = 0; base < dim; base += 2 * stride)
    for (std::uint64_t i = base; i < base + stride; ++i) f(i, i | stride);
}

void apply_single(StateVector& s, int q, const cplx m00, const cplx m01, const cplx m10, const cplx m11) {
  auto a = s.amplitudes();
  for_each_pair(s.dim(), q, [&](std::uint64_t i0, std::uint64_t i1) {
    const cplx v0 = a[i0];
    const cplx v1 = a[i1];
    a[i0] = m00 * v0 + m01 * v1;
    a[i1] = m10 * v0 + m11 * v1;
  });
}

bool is_unit_real(cplx c) { return std::abs(c.imag()) < 1e-12 && std::abs(std::abs(c.real()) - 1.0) < 1e-12; }

void apply_controlled_pauli(StateVector& s, const ControlledPauli& g) {
  std::uint64_t cmask = 0;
  std::uint64_t cvalue = 0;
  for (const auto& c : g.controls) {
    cmask |= bit(c.qubit);
    if (c.value) cvalue |= bit(c.qubit);
  }
  auto a = s.amplitudes();
  const std::uint64_t x = g.op.x_mask();
  if (x == 0) {
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
      if ((i & cmask) != cvalue) continue;
      a[i] *= g.op.apply_to_basis(i).second;
    }
    return;
  }
  const std::uint64_t low = x & (~x + 1);
  for (std::uint64_t i = 0; i < s.dim(); ++i) {
    if ((i & cmask) != cvalue || (i & low)) continue;
    const std::uint64_t j = i ^ x;
    const cplx fi = g.op.apply_to_basis(i).second;  // P|i> = fi |j>
    const cplx fj = g.op.apply_to_basis(j).second;  // P|j> = fj |i>
    const cplx vi = a[i];
    a[i] = fj * a[j];
    a[j] = fi * vi;
  }
}

void apply_rotation(StateVector& s, const PauliRotation& g) {
  const double c = std::cos(g.theta / 2.0);
  const double sn = std::sin(g.theta / 2.0);
  auto a = s.amplitudes();
  const std::uint64_t x = g.op.x_mask();
  if (x == 0) {
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
      const cplx f = g.op.apply_to_basis(i).second;
      a[i] *= c - kI * sn * f;
    }
    return;
  }
  const std::uint64_t low = x & (~x + 1);
  for (std::uint64_t i = 0; i < s.dim(); ++i) {
    if (i & low) continue;
    const std::uint64_t j = i ^ x;
    const cplx fi = g.op.apply_to_basis(i).second;
    const cplx fj = g.op.apply_to_basis(j).second;
    const cplx vi = a[i];
    const cplx vj = a[j];
    a[i] = c * vi - kI * sn * fj * vj;
    a[j] = c * vj - kI * sn * fi * vi;
  }
}

}  // namespace

// --- StateVector -------------------------------------------------------------

StateVector::StateVector(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 0 || n_qubits > 30) throw ResourceError("statevector limited to 30 qubits");
  amps_.assign(std::size_t{1} << n_qubits, cplx{});
  amps_[0] = 1.0;
}

StateVector::StateVector(int n_qubits, std::vector<cplx> amplitudes) : n_(n_qubits), amps_(std::move(amplitudes)) {
  if (n_qubits < 0 || n_qubits > 30) throw ResourceError("statevector limited to 30 qubits");
  if (amps_.size() != (std::size_t{1} << n_qubits)) {
    throw DimensionError("amplitude count does not match 2^" + std::to_string(n_qubits));
  }
}

StateVector StateVector::basis_state(int n_qubits, std::uint64_t index) {
  StateVector s(n_qubits);
  if (index >= s.dim()) throw RangeError("basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

double StateVector::norm_squared() const noexcept {
  double acc = 0.0;
  for (const auto& a : amps_) acc += std::norm(a);
  return acc;
}

double StateVector::normalize() {
  const double nrm = std::sqrt(norm_squared());
  if (nrm == 0.0) throw RangeError("cannot normalise the zero vector");
  for (auto& a : amps_) a /= nrm;
  return nrm;
}

cplx StateVector::inner(const StateVector& other) const {
  if (other.n_ != n_) throw DimensionError("inner product of registers of different size");
  cplx acc{};
  for (std::size_t i = 0; i < amps_.size(); ++i) acc += std::conj(amps_[i]) * other.amps_[i];
  return acc;
}

StateVector StateVector::with_ancillae(int k) const {
  StateVector out(n_ + k);
  std::fill(out.amps_.begin(), out.amps_.end(), cplx{});
  std::copy(amps_.begin(), amps_.end(), out.amps_.begin());
  return out;
}

StateVector StateVector::ancilla_branch(int k, std::uint64_t pattern) const {
  if (k < 0 || k > n_) throw RangeError("ancilla count out of range");
  if (pattern >= (std::uint64_t{1} << k)) throw RangeError("ancilla pattern out of range");
  const int reg = n_ - k;
  const std::size_t block = std::size_t{1} << reg;
  std::vector<cplx> amps(amps_.begin() + static_cast<std::ptrdiff_t>(pattern * block),
                         amps_.begin() + static_cast<std::ptrdiff_t>((pattern + 1) * block));
  return StateVector(reg, std::move(amps));
}

// --- Circuit -----------------------------------------------------------------

Circuit& Circuit::add(Gate gate) {
  std::visit(
      [this](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, CnotGate>) {
          check_qubit(g.control, n_);
          check_qubit(g.target, n_);
          if (g.control == g.target) throw RangeError("CNOT control equals target");
        } else if constexpr (std::is_same_v<T, ControlledPauli>) {
          if (g.op.n_qubits() > n_) throw DimensionError("controlled Pauli wider than the circuit");
          if (std::abs(std::abs(g.op.coefficient()) - 1.0) > 1e-12) {
            throw RangeError("controlled Pauli must have a unit-modulus coefficient");
          }
          for (const auto& c : g.controls) {
            check_qubit(c.qubit, n_);
            if (c.value != 0 && c.value != 1) throw RangeError("control value must be 0 or 1");
            if (g.op.support() & bit(c.qubit)) throw RangeError("control qubit overlaps the target string");
          }
        } else if constexpr (std::is_same_v<T, PauliRotation>) {
          if (g.op.n_qubits() > n_) throw DimensionError("Pauli rotation wider than the circuit");
          if (!is_unit_real(g.op.coefficient())) {
            throw RangeError("Pauli rotation needs a Hermitian unit string (coefficient +-1)");
          }
        } else {
          check_qubit(g.qubit, n_);
        }
      },
      gate);
  gates_.push_back(std::move(gate));
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.n_ > n_) throw DimensionError("appended circuit is wider");
  for (const auto& g : other.gates_) add(g);
  return *this;
}

void apply(StateVector& state, const Gate& gate) {
  const double r = std::numbers::sqrt2 / 2.0;
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, XGate>) {
          check_qubit(g.qubit, state.n_qubits());
          apply_single(state, g.qubit, 0.0, 1.0, 1.0, 0.0);
        } else if constexpr (std::is_same_v<T, HGate>) {
          check_qubit(g.qubit, state.n_qubits());
          apply_single(state, g.qubit, r, r, r, -r);
        } else if constexpr (std::is_same_v<T, RxGate>) {
          check_qubit(g.qubit, state.n_qubits());
          const double c = std::cos(g.theta / 2.0);
          const double s = std::sin(g.theta / 2.0);
          apply_single(state, g.qubit, c, -kI * s, -kI * s, c);
        } else if constexpr (std::is_same_v<T, RzGate>) {
          check_qubit(g.qubit, state.n_qubits());
          apply_single(state, g.qubit, std::polar(1.0, -g.theta / 2.0), 0.0, 0.0, std::polar(1.0, g.theta / 2.0));
        } else if constexpr (std::is_same_v<T, PhaseGate>) {
          check_qubit(g.qubit, state.n_qubits());
          apply_single(state, g.qubit, 1.0, 0.0, 0.0, std::polar(1.0, g.phi));
        } else if constexpr (std::is_same_v<T, CnotGate>) {
          check_qubit(g.control, state.n_qubits());
          check_qubit(g.target, state.n_qubits());
          auto a = state.amplitudes();
          const std::uint64_t cb = bit(g.control);
          const std::uint64_t tb = bit(g.target);
          for (std::uint64_t i = 0; i < state.dim(); ++i) {
            if ((i & cb) && !(i & tb)) std::swap(a[i], a[i | tb]);
          }
        } else if constexpr (std::is_same_v<T, ControlledPauli>) {
          if (g.op.n_qubits() > state.n_qubits()) throw DimensionError("controlled Pauli wider than the state");
          for (const auto& c : g.controls) check_qubit(c.qubit, state.n_qubits());
          apply_controlled_pauli(state, g);
        } else if constexpr (std::is_same_v<T, PauliRotation>) {
          if (g.op.n_qubits() > state.n_qubits()) throw DimensionError("Pauli rotation wider than the state");
          apply_rotation(state, g);
        }
      },
      gate);
}

void apply(StateVector& state, const Circuit& circuit) {
  if (circuit.n_qubits() != state.n_qubits()) {
    throw DimensionError("circuit on " + std::to_string(circuit.n_qubits()) + " qubits applied to a " +
                         std::to_string(state.n_qubits()) + "-qubit state");
  }
  for (const auto& g : circuit.gates()) apply(state, g);
}

Eigen::MatrixXcd circuit_matrix(const Circuit& circuit) {
  if (circuit.n_qubits() > kMaxDenseQubits) throw ResourceError("dense circuit matrix too large");
  const std::size_t dim = std::size_t{1} << circuit.n_qubits();
  Eigen::MatrixXcd m(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    StateVector s = StateVector::basis_state(circuit.n_qubits(), col);
    apply(s, circuit);
    m.col(static_cast<Eigen::Index>(col)) = s.as_eigen();
  }
  return m;
}

Circuit build_diag_circuit(int m, int n_register) {
  auto [u0, u1] = jw_majorana_pair(m, n_register);
  const int anc = n_register;
  Circuit c(n_register + 1);
  c.add(HGate{anc});
  c.add(ControlledPauli{{{anc, 0}}, u0});
  c.add(ControlledPauli{{{anc, 1}}, u1});
  c.add(HGate{anc});
  return c;
}

Circuit build_offdiag_circuit(int m, int m_prime, int n_register) {
  if (m == m_prime) throw RangeError("off-diagonal circuit needs m != m'");
  auto [u0m, u1m] = jw_majorana_pair(m, n_register);
  auto [u0p, u1p] = jw_majorana_pair(m_prime, n_register);
  const int q0 = n_register;
  const int q1 = n_register + 1;
  Circuit c(n_register + 2);
  c.add(HGate{q0}).add(HGate{q1});
  c.add(ControlledPauli{{{q0, 0}, {q1, 0}}, u0m});
  c.add(ControlledPauli{{{q0, 1}, {q1, 0}}, u1m});
  c.add(PhaseGate{q1, std::numbers::pi / 4.0});
  c.add(ControlledPauli{{{q0, 0}, {q1, 1}}, u0p});
  c.add(ControlledPauli{{{q0, 1}, {q1, 1}}, u1p});
  c.add(HGate{q0}).add(HGate{q1});
  return c;
}

Circuit compile_pauli_rotation(const PauliTerm& op, double theta) {
  if (!is_unit_real(op.coefficient())) throw RangeError("Pauli rotation needs coefficient +-1");
  if (op.support() == 0) throw RangeError("identity rotation is a global phase");
  const double angle = op.coefficient().real() > 0 ? theta : -theta;
  std::vector<int> qubits;
  for (int q = 0; q < op.n_qubits(); ++q) {
    if (op.letter(q) != Pauli::I) qubits.push_back(q);
  }
  const double half_pi = std::numbers::pi / 2.0;
  Circuit c(op.n_qubits());
  for (int q : qubits) {
    if (op.letter(q) == Pauli::X) c.add(HGate{q});
    if (op.letter(q) == Pauli::Y) c.add(RxGate{q, half_pi});
  }
  for (std::size_t k = 0; k + 1 < qubits.size(); ++k) c.add(CnotGate{qubits[k], qubits[k + 1]});
  c.add(RzGate{qubits.back(), angle});
  for (std::size_t k = qubits.size() - 1; k > 0; --k) c.add(CnotGate{qubits[k - 1], qubits[k]});
  for (int q : qubits) {
    if (op.letter(q) == Pauli::X) c.add(HGate{q});
    if (op.letter(q) == Pauli::Y) c.add(RxGate{q, -half_pi});
  }
  return c;
}

// --- measurement -------------------------------------------------------------

namespace {

std::uint64_t pattern_of(std::uint64_t index, std::span<const int> qubits) {
  std::uint64_t p = 0;
  for (std::size_t j = 0; j < qubits.size(); ++j) {
    if (index & bit(qubits[j])) p |= std::uint64_t{1} << j;
  }
  return p;
}

}  // namespace

std::vector<double> outcome_probabilities(const StateVector& state, std::span<const int> qubits) {
  for (int q : qubits) check_qubit(q, state.n_qubits());
  std::vector<double> probs(std::size_t{1} << qubits.size(), 0.0);
  const auto a = state.amplitudes();
  for (std::uint64_t i = 0; i < state.dim(); ++i) probs[pattern_of(i, qubits)] += std::norm(a[i]);
  return probs;
}

MeasurementRecord measure(const StateVector& state, std::span<const int> qubits, StreamRng& rng) {
  const auto probs = outcome_probabilities(state, qubits);
  double total = 0.0;
  for (double p : probs) total += p;
  const double u = rng.uniform() * total;
  std::uint64_t chosen = 0;
  double acc = 0.0;
  for (std::uint64_t p = 0; p < probs.size(); ++p) {
    if (probs[p] <= 0.0) continue;
    chosen = p;
    acc += probs[p];
    if (u < acc) break;
  }
  MeasurementRecord rec{{}, probs[chosen] / total, state};
  auto a = rec.post.amplitudes();
  for (std::uint64_t i = 0; i < state.dim(); ++i) {
    if (pattern_of(i, qubits) != chosen) a[i] = 0.0;
  }
  rec.post.normalize();
  for (std::size_t j = 0; j < qubits.size(); ++j) rec.outcome.push_back(static_cast<int>((chosen >> j) & 1U));
  return rec;
}

double expectation(const StateVector& state, const PauliSum& op) {
  if (op.n_qubits() != state.n_qubits()) throw DimensionError("operator and state sizes differ");
  if (!op.is_hermitian(1e-12)) throw RangeError("expectation requires a Hermitian operator");
  const auto a = state.amplitudes();
  cplx acc{};
  for (const auto& term : op.terms()) {
    cplx t{};
    for (std::uint64_t i = 0; i < state.dim(); ++i) {
      if (a[i] == 0.0) continue;
      const auto [j, f] = term.apply_to_basis(i);
      t += std::conj(a[j]) * f * a[i];
    }
    acc += t;
  }
  const double scale = std::max(1.0, std::abs(acc));
  if (std::abs(acc.imag()) > 1e-10 * scale) throw Error("expectation has a non-negligible imaginary part");
  return acc.real();
}

// --- CompiledOperator --------------------------------------------------------

CompiledOperator::CompiledOperator(const PauliSum& op) : n_(op.n_qubits()) {
  if (n_ > 30) throw ResourceError("compiled operator limited to 30 qubits");
  struct Diagonal {
    std::uint64_t z;
    cplx c;  // includes the i^{#Y} phase
  };
  std::map<std::uint64_t, std::vector<Diagonal>> groups;
  for (const auto& t : op.terms()) {
    // P|j> = c i^{#Y} (-1)^{|j & z|} |j ^ x>
    groups[t.x_mask()].push_back({t.z_mask(), t.apply_to_basis(0).second});
  }
  const std::size_t dim = std::size_t{1} << n_;
  row_start_.reserve(dim + 1);
  row_start_.push_back(0);
  for (std::uint64_t row = 0; row < dim; ++row) {
    for (const auto& [x, diag] : groups) {
      const std::uint64_t col = row ^ x;
      cplx v{};
      for (const auto& d : diag) v += (__builtin_popcountll(col & d.z) & 1) ? -d.c : d.c;
      if (std::abs(v) < 1e-15) continue;
      cols_.push_back(col);
      values_.push_back(v);
    }
    row_start_.push_back(values_.size());
  }
}

void CompiledOperator::apply(std::span<const cplx> in, std::span<cplx> out) const {
  const std::size_t dim = std::size_t{1} << n_;
  if (in.size() != dim || out.size() != dim) throw DimensionError("compiled operator size mismatch");
  for (std::size_t row = 0; row < dim; ++row) {
    cplx acc{};
    for (std::size_t k = row_start_[row]; k < row_start_[row + 1]; ++k) acc += values_[k] * in[cols_[k]];
    out[row] = acc;
  }
}

double CompiledOperator::expectation(const StateVector& state) const {
  if (state.n_qubits() != n_) throw DimensionError("compiled operator and state sizes differ");
  const auto a = state.amplitudes();
  cplx acc{};
  for (std::size_t row = 0; row < a.size(); ++row) {
    if (a[row] == 0.0) continue;
    cplx r{};
    for (std::size_t k = row_start_[row]; k < row_start_[row + 1]; ++k) r += values_[k] * a[cols_[k]];
    acc += std::conj(a[row]) * r;
  }
  return acc.real();
}

}  // namespace qgf
