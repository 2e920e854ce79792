#include "qgf/ucc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "qgf/errors.hpp"

namespace qgf {

StateVector prepare_reference(int n_qubits, int n_elec) {
  if (n_elec < 0 || n_elec > n_qubits) throw RangeError("electron count exceeds the register");
  const std::uint64_t occupied = n_elec == 0 ? 0 : (std::uint64_t{1} << n_elec) - 1;
  return StateVector::basis_state(n_qubits, occupied);
}

namespace {

Ansatz make(std::string_view tag, int n, int ne, std::initializer_list<const char*> strings) {
  Ansatz a{std::string(tag), n, ne, {}};
  for (const char* s : strings) a.generators.push_back(PauliTerm::parse(n, s));
  return a;
}

}  // namespace

Ansatz builtin_ansatz(std::string_view tag) {
  if (tag == "lih_u1") return make(tag, 12, 4, {"Y5 X4 X3 X2", "Y11 X10 X3 X2"});
  if (tag == "lih_u2") return make(tag, 12, 4, {"Y7 X6 X3 X2", "Y9 X8 X3 X2"});
  if (tag == "h2o_u2") {
    return make(tag, 14, 10, {"Y11 X10 X7 X6", "Y13 X12 X7 X6", "Y11 X10 X9 X8", "Y13 X12 X9 X8"});
  }
  if (tag == "h2o_u1") {
    return make(tag, 14, 10,
                {"Y11 X10 X7 X6", "Y13 X12 X7 X6", "Y11 X10 X9 X8", "Y13 X12 X9 X8", "Y11 X10 X5 X4",
                 "Y13 X12 X5 X4"});
  }
  throw RangeError("unknown ansatz '" + std::string(tag) + "' (expected lih_u1, lih_u2, h2o_u1, h2o_u2)");
}

Ansatz reference_ansatz(int n_qubits, int n_elec) {
  if (n_elec < 0 || n_elec > n_qubits) throw RangeError("electron count exceeds the register");
  return Ansatz{"none", n_qubits, n_elec, {}};
}

StateVector ansatz_state(const Ansatz& ansatz, std::span<const double> theta) {
  if (static_cast<int>(theta.size()) != ansatz.n_params()) {
    throw DimensionError("ansatz '" + ansatz.tag + "' takes " + std::to_string(ansatz.n_params()) +
                         " parameters, got " + std::to_string(theta.size()));
  }
  StateVector s = prepare_reference(ansatz.n_qubits, ansatz.n_elec);
  for (std::size_t k = 0; k < theta.size(); ++k) apply(s, PauliRotation{ansatz.generators[k], theta[k]});
  return s;
}

double energy(const Ansatz& ansatz, std::span<const double> theta, const PauliSum& h) {
  return expectation(ansatz_state(ansatz, theta), h);
}

double energy(const Ansatz& ansatz, std::span<const double> theta, const CompiledOperator& h) {
  return h.expectation(ansatz_state(ansatz, theta));
}

double sector_leak(const StateVector& state, int n_elec) {
  double out = 0.0;
  const auto a = state.amplitudes();
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    if (std::popcount(i) != n_elec) out += std::norm(a[i]);
  }
  return out;
}

// --- Nelder-Mead -------------------------------------------------------------

namespace {

struct Budget {
  int evaluations = 0;
  int limit = 0;
  bool exhausted() const { return evaluations >= limit; }
};

struct Simplex {
  std::vector<std::vector<double>> x;
  std::vector<double> f;

  void sort() {
    std::vector<std::size_t> idx(f.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return f[a] < f[b]; });
    std::vector<std::vector<double>> xs;
    std::vector<double> fs;
    for (auto i : idx) {
      xs.push_back(x[i]);
      fs.push_back(f[i]);
    }
    x = std::move(xs);
    f = std::move(fs);
  }
};

template <typename F>
bool nelder_mead(F&& fn, std::vector<double>& best, double& fbest, const VqeConfig& cfg, Budget& budget,
                 int& iterations) {
  const std::size_t n = best.size();
  Simplex s;
  s.x.push_back(best);
  s.f.push_back(fbest);
  for (std::size_t i = 0; i < n && !budget.exhausted(); ++i) {
    auto v = best;
    v[i] += cfg.initial_step;
    s.x.push_back(v);
    s.f.push_back(fn(v));
  }
  if (s.x.size() != n + 1) return false;

  auto blend = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = a[k] + t * (b[k] - a[k]);
    return r;
  };

  bool converged = false;
  while (true) {
    s.sort();
    if (s.f[n] - s.f[0] < cfg.ftol) {
      converged = true;
      break;
    }
    if (budget.exhausted()) break;
    if (cfg.max_iterations >= 0 && iterations >= cfg.max_iterations) break;
    ++iterations;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) centroid[k] += s.x[i][k] / static_cast<double>(n);

    const auto xr = blend(centroid, s.x[n], -1.0);
    const double fr = fn(xr);
    if (fr < s.f[0]) {
      const auto xe = blend(centroid, s.x[n], -2.0);
      const double fe = fn(xe);
      if (fe < fr) {
        s.x[n] = xe;
        s.f[n] = fe;
      } else {
        s.x[n] = xr;
        s.f[n] = fr;
      }
    } else if (fr < s.f[n - 1]) {
      s.x[n] = xr;
      s.f[n] = fr;
    } else {
      const bool outside = fr < s.f[n];
      const auto xc = outside ? blend(centroid, xr, 0.5) : blend(centroid, s.x[n], 0.5);
      const double fc = fn(xc);
      if (fc < std::min(fr, s.f[n])) {
        s.x[n] = xc;
        s.f[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          s.x[i] = blend(s.x[0], s.x[i], 0.5);
          s.f[i] = fn(s.x[i]);
        }
      }
    }
    if (cfg.trace) {
      const auto it = std::min_element(s.f.begin(), s.f.end());
      cfg.trace(iterations, s.x[static_cast<std::size_t>(it - s.f.begin())], *it);
    }
  }
  s.sort();
  best = s.x[0];
  fbest = s.f[0];
  return converged;
}

}  // namespace

VqeResult optimize(const Ansatz& ansatz, const PauliSum& h, std::vector<double> theta0, const VqeConfig& config) {
  if (static_cast<int>(theta0.size()) != ansatz.n_params()) {
    throw DimensionError("initial parameters do not match the ansatz");
  }
  for (double t : theta0) {
    if (!std::isfinite(t)) throw RangeError("initial parameters must be finite");
  }
  if (h.n_qubits() != ansatz.n_qubits) throw DimensionError("Hamiltonian and ansatz registers differ");

  const CompiledOperator op(h);
  Budget budget{0, std::max(1, config.max_evaluations)};
  auto fn = [&](const std::vector<double>& th) {
    ++budget.evaluations;
    return energy(ansatz, th, op);
  };

  VqeResult r;
  r.theta = std::move(theta0);
  r.energy = fn(r.theta);
  if (ansatz.n_params() == 0 || config.max_iterations == 0) {
    r.converged = true;
  } else {
    while (true) {
      const double before = r.energy;
      const bool ok = nelder_mead(fn, r.theta, r.energy, config, budget, r.iterations);
      if (!ok) break;
      if (before - r.energy < config.ftol) {
        r.converged = true;
        break;
      }
    }
  }
  r.evaluations = budget.evaluations;
  r.leak = sector_leak(ansatz_state(ansatz, r.theta), ansatz.n_elec);
  return r;
}

}  // namespace qgf
