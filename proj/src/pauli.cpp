#include "qgf/pauli.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <sstream>

#include "qgf/errors.hpp"

namespace qgf {

namespace {

struct LetterProduct {
  Pauli letter;
  int i_power;  // product phase is i^{i_power}
};

// Row: left factor, column: right factor; order I, X, Y, Z.
constexpr std::array<std::array<LetterProduct, 4>, 4> kProductTable{{
    {{{Pauli::I, 0}, {Pauli::X, 0}, {Pauli::Y, 0}, {Pauli::Z, 0}}},
    {{{Pauli::X, 0}, {Pauli::I, 0}, {Pauli::Z, 1}, {Pauli::Y, 3}}},
    {{{Pauli::Y, 0}, {Pauli::Z, 3}, {Pauli::I, 0}, {Pauli::X, 1}}},
    {{{Pauli::Z, 0}, {Pauli::Y, 1}, {Pauli::X, 3}, {Pauli::I, 0}}},
}};

constexpr std::array<cplx, 4> kIPowers{cplx{1, 0}, cplx{0, 1}, cplx{-1, 0}, cplx{0, -1}};

void check_qubit_count(int n) {
  if (n < 0 || n > kMaxQubits) {
    throw DimensionError("qubit count " + std::to_string(n) + " outside [0, " +
                         std::to_string(kMaxQubits) + "]");
  }
}

}  // namespace

PauliTerm::PauliTerm(int n_qubits, cplx coefficient) : n_(n_qubits), coeff_(coefficient) {
  check_qubit_count(n_qubits);
}

PauliTerm::PauliTerm(cplx coefficient, std::span<const Pauli> letters)
    : n_(static_cast<int>(letters.size())), coeff_(coefficient) {
  check_qubit_count(n_);
  for (int q = 0; q < n_; ++q) set(q, letters[q]);
}

PauliTerm PauliTerm::parse(int n_qubits, std::string_view text, cplx coefficient) {
  PauliTerm term(n_qubits, coefficient);
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
      continue;
    }
    Pauli p;
    switch (text[pos]) {
      case 'I': p = Pauli::I; break;
      case 'X': p = Pauli::X; break;
      case 'Y': p = Pauli::Y; break;
      case 'Z': p = Pauli::Z; break;
      default:
        throw ParseError("unexpected Pauli letter '" + std::string(1, text[pos]) + "'", 0);
    }
    ++pos;
    int qubit = -1;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), qubit);
    if (ec != std::errc{}) throw ParseError("missing qubit index in '" + std::string(text) + "'", 0);
    pos = static_cast<std::size_t>(ptr - text.data());
    if (term.letter(qubit) != Pauli::I) {
      throw ParseError("qubit " + std::to_string(qubit) + " repeated in Pauli string", 0);
    }
    term.set(qubit, p);
  }
  return term;
}

Pauli PauliTerm::letter(int qubit) const {
  if (qubit < 0 || qubit >= n_) throw RangeError("qubit " + std::to_string(qubit) + " out of range");
  const bool x = (x_ >> qubit) & 1U;
  const bool z = (z_ >> qubit) & 1U;
  if (x && z) return Pauli::Y;
  if (x) return Pauli::X;
  if (z) return Pauli::Z;
  return Pauli::I;
}

PauliTerm& PauliTerm::set(int qubit, Pauli p) {
  if (qubit < 0 || qubit >= n_) throw RangeError("qubit " + std::to_string(qubit) + " out of range");
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  x_ &= ~bit;
  z_ &= ~bit;
  if (p == Pauli::X || p == Pauli::Y) x_ |= bit;
  if (p == Pauli::Z || p == Pauli::Y) z_ |= bit;
  refresh_phase();
  return *this;
}

int PauliTerm::weight() const noexcept { return __builtin_popcountll(x_ | z_); }

void PauliTerm::refresh_phase() noexcept { y_phase_ = kIPowers[__builtin_popcountll(x_ & z_) & 3]; }

std::string PauliTerm::str() const {
  std::ostringstream os;
  os << "(" << coeff_.real() << (coeff_.imag() < 0 ? "-" : "+") << std::abs(coeff_.imag()) << "i)";
  bool any = false;
  for (int q = n_ - 1; q >= 0; --q) {
    const Pauli p = letter(q);
    if (p == Pauli::I) continue;
    os << ' ' << "IXYZ"[static_cast<int>(p)] << q;
    any = true;
  }
  if (!any) os << " I";
  return os.str();
}

PauliTerm multiply(const PauliTerm& a, const PauliTerm& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw DimensionError("cannot multiply Pauli strings on " + std::to_string(a.n_qubits()) +
                         " and " + std::to_string(b.n_qubits()) + " qubits");
  }
  PauliTerm out(a.n_qubits(), a.coefficient() * b.coefficient());
  int i_power = 0;
  const std::uint64_t touched = a.support() | b.support();
  for (int q = 0; q < a.n_qubits(); ++q) {
    if (!((touched >> q) & 1U)) continue;
    const auto& entry = kProductTable[static_cast<int>(a.letter(q))][static_cast<int>(b.letter(q))];
    i_power += entry.i_power;
    out.set(q, entry.letter);
  }
  out.set_coefficient(out.coefficient() * kIPowers[i_power & 3]);
  return out;
}

// ---------------------------------------------------------------------------

PauliSum::PauliSum(const PauliTerm& term) : n_(term.n_qubits()) { add(term); }

void PauliSum::check(const PauliTerm& t) const {
  if (t.n_qubits() != n_) {
    throw DimensionError("Pauli term on " + std::to_string(t.n_qubits()) +
                         " qubits added to a sum on " + std::to_string(n_));
  }
}

PauliSum& PauliSum::add(const PauliTerm& term) {
  check(term);
  terms_[{term.x_mask(), term.z_mask()}] += term.coefficient();
  return *this;
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  if (other.n_ != n_) throw DimensionError("Pauli sums on different qubit counts");
  for (const auto& [key, c] : other.terms_) terms_[key] += c;
  return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& other) {
  if (other.n_ != n_) throw DimensionError("Pauli sums on different qubit counts");
  for (const auto& [key, c] : other.terms_) terms_[key] -= c;
  return *this;
}

PauliSum& PauliSum::operator*=(cplx scale) {
  for (auto& [key, c] : terms_) c *= scale;
  return *this;
}

std::vector<PauliTerm> PauliSum::terms() const {
  std::vector<PauliTerm> out;
  out.reserve(terms_.size());
  for (const auto& [key, c] : terms_) {
    PauliTerm t(n_, c);
    for (int q = 0; q < n_; ++q) {
      const bool x = (key.first >> q) & 1U;
      const bool z = (key.second >> q) & 1U;
      if (x || z) t.set(q, x && z ? Pauli::Y : (x ? Pauli::X : Pauli::Z));
    }
    out.push_back(t);
  }
  return out;
}

cplx PauliSum::identity_coefficient() const {
  auto it = terms_.find({0, 0});
  return it == terms_.end() ? cplx{} : it->second;
}

PauliSum PauliSum::adjoint() const {
  // Every Pauli string is Hermitian, so only the coefficients conjugate.
  PauliSum out(*this);
  for (auto& [key, c] : out.terms_) c = std::conj(c);
  return out;
}

bool PauliSum::is_hermitian(double tol) const { return max_imag_coefficient() <= tol; }

double PauliSum::max_imag_coefficient() const {
  double worst = 0.0;
  for (const auto& [key, c] : terms_) worst = std::max(worst, std::abs(c.imag()));
  return worst;
}

PauliSum& PauliSum::prune(double tol) {
  std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
  return *this;
}

PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
PauliSum operator*(cplx s, PauliSum a) { return a *= s; }

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
  if (a.n_qubits() != b.n_qubits()) throw DimensionError("Pauli sums on different qubit counts");
  PauliSum out(a.n_qubits());
  const auto lhs = a.terms();
  const auto rhs = b.terms();
  for (const auto& l : lhs) {
    for (const auto& r : rhs) out.add(multiply(l, r));
  }
  return out;
}

Eigen::MatrixXcd dense_matrix(const PauliTerm& term) {
  if (term.n_qubits() > kMaxDenseQubits) {
    throw ResourceError("dense matrix requested on " + std::to_string(term.n_qubits()) + " qubits");
  }
  const std::uint64_t dim = std::uint64_t{1} << term.n_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::uint64_t b = 0; b < dim; ++b) {
    const auto [target, factor] = term.apply_to_basis(b);
    m(target, b) += factor;
  }
  return m;
}

Eigen::MatrixXcd dense_matrix(const PauliSum& sum) {
  if (sum.n_qubits() > kMaxDenseQubits) {
    throw ResourceError("dense matrix requested on " + std::to_string(sum.n_qubits()) + " qubits");
  }
  const std::uint64_t dim = std::uint64_t{1} << sum.n_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& term : sum.terms()) {
    for (std::uint64_t b = 0; b < dim; ++b) {
      const auto [target, factor] = term.apply_to_basis(b);
      m(target, b) += factor;
    }
  }
  return m;
}

}  // namespace qgf
