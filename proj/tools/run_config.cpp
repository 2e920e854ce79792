#include "run_config.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "qgf/eigensolver.hpp"
#include "qgf/errors.hpp"
#include "qgf/gf_io.hpp"
#include "qgf/greens.hpp"
#include "qgf/integrals.hpp"
#include "qgf/ucc.hpp"
#include "qgf/units.hpp"

namespace gfq {

using nlohmann::json;
using namespace qgf;

void RunConfig::validate() const {
  if (system.empty()) throw std::invalid_argument("--system is required");
  if (mode != "exact" && mode != "sampled") throw std::invalid_argument("--mode must be exact or sampled");
  if (ground != "auto" && ground != "fci" && ground != "ansatz") {
    throw std::invalid_argument("--ground must be auto, fci or ansatz");
  }
  if (nmeas.empty()) throw std::invalid_argument("--nmeas needs at least one value");
  for (long n : nmeas)
    if (n < 1) throw std::invalid_argument("N_meas must be at least 1");
  if (reps < 1) throw std::invalid_argument("--reps must be at least 1");
  if (!(delta_au > 0.0)) throw std::invalid_argument("--delta-au must be positive");
  if (!(omega_step_ev > 0.0) || !(omega_max_ev > omega_min_ev)) {
    throw std::invalid_argument("frequency window needs omega-min < omega-max and a positive step");
  }
  if (threads < 1) throw std::invalid_argument("--threads must be at least 1");
}

namespace {

struct Problem {
  MolecularIntegrals ints;
  OrbitalEnergies eps;
  PauliSum h{0};
  Ansatz ansatz;
  int n_qubits = 0;
  int n_elec = 0;
};

Problem load(const RunConfig& cfg) {
  Problem p;
  p.ints = load_system(cfg.system);
  p.ints.validate();
  p.eps = hf_orbital_energies(p.ints);
  p.h = build_qubit_hamiltonian(p.ints);
  p.n_qubits = 2 * p.ints.n_orb();
  p.n_elec = p.ints.n_elec();
  p.ansatz = cfg.ansatz == "none" ? reference_ansatz(p.n_qubits, p.n_elec) : builtin_ansatz(cfg.ansatz);
  if (p.ansatz.n_qubits != p.n_qubits || p.ansatz.n_elec != p.n_elec) {
    throw DimensionError("ansatz '" + cfg.ansatz + "' is built for " + std::to_string(p.ansatz.n_qubits) +
                         " qubits and " + std::to_string(p.ansatz.n_elec) + " electrons, the system has " +
                         std::to_string(p.n_qubits) + " and " + std::to_string(p.n_elec));
  }
  return p;
}

json energy_json(double ha) { return {{"Ha", ha}, {"eV", ha_to_ev(ha)}}; }

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json config_json(const RunConfig& cfg) {
  return {{"system", cfg.system},       {"ansatz", cfg.ansatz},         {"mode", cfg.mode},
          {"ground", cfg.ground},       {"nmeas", cfg.nmeas},           {"reps", cfg.reps},
          {"seed", cfg.seed},           {"delta_au", cfg.delta_au},     {"omega_min_eV", cfg.omega_min_ev},
          {"omega_max_eV", cfg.omega_max_ev}, {"omega_step_eV", cfg.omega_step_ev}};
}

VqeResult run_vqe(const Problem& p, const RunConfig& cfg, std::ostream* trace) {
  VqeConfig vc;
  vc.max_iterations = cfg.max_iter;
  if (trace) {
    *trace << "iteration";
    for (int k = 0; k < p.ansatz.n_params(); ++k) *trace << ",theta_" << k + 1;
    *trace << ",energy_Ha\n";
    vc.trace = [trace](int it, std::span<const double> th, double e) {
      *trace << it;
      for (double t : th) *trace << ',' << fmt(t);
      *trace << ',' << fmt(e) << '\n';
    };
  }
  return optimize(p.ansatz, p.h, std::vector<double>(p.ansatz.n_params(), 0.0), vc);
}

struct Spectra {
  SectorSpectrum n;
  SectorSpectrum plus;
  SectorSpectrum minus;
};

Spectra spectra(const Problem& p, const RunConfig& cfg) {
  EigensolverOptions opt;
  opt.cache_dir = cfg.cache_dir;
  Spectra s;
  s.n = diagonalize_sector(p.h, p.n_elec, opt);
  if (p.n_elec < p.n_qubits) s.plus = diagonalize_sector(p.h, p.n_elec + 1, opt);
  if (p.n_elec > 0) s.minus = diagonalize_sector(p.h, p.n_elec - 1, opt);
  return s;
}

struct Ground {
  GroundState gs;
  std::string kind;
  json info;
  bool converged = true;
};

Ground choose_ground(const Problem& p, const RunConfig& cfg, const Spectra& s) {
  const bool use_ansatz = cfg.ground == "ansatz" || (cfg.ground == "auto" && cfg.ansatz != "none");
  Ground g;
  if (!use_ansatz) {
    g.gs = ground_state_of(s.n);
    g.kind = "fci";
    g.info = {{"kind", "fci"}, {"energy", energy_json(g.gs.energy)}};
    return g;
  }
  const VqeResult r = run_vqe(p, cfg, nullptr);
  g.gs = make_ground_state(ansatz_state(p.ansatz, r.theta), p.h, p.n_elec);
  g.kind = "ansatz";
  g.converged = r.converged;
  g.info = {{"kind", "ansatz"},
            {"ansatz", p.ansatz.tag},
            {"theta", r.theta},
            {"vqe_energy", energy_json(r.energy)},
            {"energy", energy_json(g.gs.energy)},
            {"discarded_weight", g.gs.discarded},
            {"converged", r.converged}};
  return g;
}

// Runs body(i) for i in [0, n) on up to `threads` workers; rethrows the first failure.
template <typename F>
void parallel_for(int n, int threads, F&& body) {
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex lock;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> g(lock);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  const int k = std::max(1, std::min(threads, n));
  std::vector<std::thread> pool;
  for (int t = 1; t < k; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> omega_grid_ev(const RunConfig& cfg) {
  const auto steps = static_cast<long>(std::floor((cfg.omega_max_ev - cfg.omega_min_ev) / cfg.omega_step_ev + 1e-9));
  std::vector<double> w;
  for (long i = 0; i <= steps; ++i) w.push_back(cfg.omega_min_ev + static_cast<double>(i) * cfg.omega_step_ev);
  return w;
}

void write_spectrum(const std::filesystem::path& dir, const std::string& stem, const LehmannGF& g,
                    const Problem& p, const RunConfig& cfg) {
  const auto w_ev = omega_grid_ev(cfg);
  std::vector<double> w_ha(w_ev.size());
  std::transform(w_ev.begin(), w_ev.end(), w_ha.begin(), ev_to_ha);
  auto a = spectral_function(g, w_ha, cfg.delta_au);
  for (auto& x : a) x = x / kHartreeToEv;
  {
    std::ofstream out(dir / ("spectrum_" + stem + ".csv"));
    write_spectrum_csv(out, w_ev, a);
  }
  std::vector<cplx> tr(w_ev.size());
  for (std::size_t i = 0; i < w_ha.size(); ++i) {
    const auto sigma = self_energy(g, p.eps, cplx{w_ha[i], cfg.delta_au});
    tr[i] = (sigma[0].trace() + sigma[1].trace()) * kHartreeToEv;
  }
  std::ofstream out(dir / ("self_energy_" + stem + ".csv"));
  write_self_energy_csv(out, w_ev, tr);
}

json gm_json(const GmReport& r) {
  json j = to_json(r);
  j.erase("gamma");
  return j;
}

}  // namespace

int cmd_vqe(const RunConfig& cfg) {
  cfg.validate();
  const Problem p = load(cfg);
  std::filesystem::create_directories(cfg.out);
  std::ofstream trace(cfg.out / "vqe_trace.csv");
  const VqeResult r = run_vqe(p, cfg, &trace);
  const double e_hf = hf_total_energy(p.ints, p.eps);
  json j = {{"config", config_json(cfg)},
            {"theta", r.theta},
            {"energy", energy_json(r.energy)},
            {"E_RHF", energy_json(e_hf)},
            {"iterations", r.iterations},
            {"evaluations", r.evaluations},
            {"converged", r.converged},
            {"sector_leak", r.leak}};
  write_json(cfg.out / "vqe.json", j);
  std::printf("%s %s: E = %.6f Ha = %.4f eV (%s, %d evaluations)\n", cfg.system.c_str(), cfg.ansatz.c_str(),
              r.energy, ha_to_ev(r.energy), r.converged ? "converged" : "NOT converged", r.evaluations);
  return r.converged ? kOk : kUnconverged;
}

int cmd_spectrum(const RunConfig& cfg) {
  cfg.validate();
  const Problem p = load(cfg);
  const Spectra s = spectra(p, cfg);
  const Ground g = choose_ground(p, cfg, s);
  std::filesystem::create_directories(cfg.out);

  const TransitionData exact = exact_transitions(g.gs, s.plus, s.minus);
  const LehmannGF gx(exact);
  json meta = {{"config", config_json(cfg)},
               {"ground", g.info},
               {"mu", energy_json(gx.chemical_potential())},
               {"omega_axis", "absolute energy; mu lies in the gap and is listed separately"},
               {"degeneracy_tol_Ha", kDegeneracyTol},
               {"gm_exact", gm_json(gm_energy(gx, p.ints, p.eps))}};

  if (cfg.mode == "exact") {
    write_spectrum(cfg.out, "exact", gx, p, cfg);
    write_json(cfg.out / "transitions_exact.json", to_json(exact));
  } else {
    const SamplingPlan plan(g.gs, s.plus, s.minus);
    const StreamRng root(cfg.seed);
    json runs = json::array();
    for (long nm : cfg.nmeas) {
      for (int rep = 0; rep < cfg.reps; ++rep) {
        const TransitionData t = plan.sample(nm, root.substream(static_cast<std::uint64_t>(rep)), cfg.seed);
        const std::string stem = "n" + std::to_string(nm) + "_rep" + std::to_string(rep);
        const LehmannGF gs(t);
        write_spectrum(cfg.out, stem, gs, p, cfg);
        runs.push_back({{"nmeas", nm}, {"repetition", rep}, {"gm", gm_json(gm_energy(gs, p.ints, p.eps))}});
      }
    }
    meta["sampled_runs"] = runs;
  }
  write_json(cfg.out / "spectrum_meta.json", meta);
  std::printf("spectra written to %s\n", cfg.out.string().c_str());
  return g.converged ? kOk : kUnconverged;
}

int cmd_gm_study(const RunConfig& cfg) {
  cfg.validate();
  const Problem p = load(cfg);
  const Spectra s = spectra(p, cfg);
  const Ground g = choose_ground(p, cfg, s);
  std::filesystem::create_directories(cfg.out);

  const GmReport ref = gm_energy(LehmannGF(exact_transitions(g.gs, s.plus, s.minus)), p.ints, p.eps);
  const bool sampled = cfg.mode == "sampled";
  std::optional<SamplingPlan> plan;
  if (sampled) plan.emplace(g.gs, s.plus, s.minus);

  const int n_n = static_cast<int>(cfg.nmeas.size());
  std::vector<GmReport> results(static_cast<std::size_t>(n_n) * cfg.reps);
  const StreamRng root(cfg.seed);
  parallel_for(n_n * cfg.reps, cfg.threads, [&](int task) {
    const int k = task / cfg.reps;
    const int rep = task % cfg.reps;
    if (!sampled) {
      results[task] = ref;
      return;
    }
    const TransitionData t = plan->sample(cfg.nmeas[k], root.substream(static_cast<std::uint64_t>(rep)), cfg.seed);
    results[task] = gm_energy(LehmannGF(t), p.ints, p.eps);
  });

  std::ofstream scatter(cfg.out / "gm_scatter.csv");
  scatter << "nmeas,repetition,dE1_eV,dE2_eV,dE12_eV\n";
  std::ofstream summary(cfg.out / "gm_summary.csv");
  summary << "nmeas,mean_dE12_eV,stddev_dE12_eV,range_dE12_eV\n";
  json per_n = json::array();
  for (int k = 0; k < n_n; ++k) {
    std::vector<double> v;
    for (int rep = 0; rep < cfg.reps; ++rep) {
      const GmReport& r = results[static_cast<std::size_t>(k) * cfg.reps + rep];
      const double e12 = ha_to_ev(r.delta_e1 + r.delta_e2);
      v.push_back(e12);
      scatter << cfg.nmeas[k] << ',' << rep << ',' << fmt(ha_to_ev(r.delta_e1)) << ',' << fmt(ha_to_ev(r.delta_e2))
              << ',' << fmt(e12) << '\n';
    }
    double mean = 0.0;
    for (double x : v) mean += x / static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    summary << cfg.nmeas[k] << ',' << fmt(mean) << ',' << fmt(sd) << ',' << fmt(*hi - *lo) << '\n';
    per_n.push_back({{"nmeas", cfg.nmeas[k]}, {"mean_dE12_eV", mean}, {"stddev_dE12_eV", sd}, {"range_dE12_eV", *hi - *lo}});
  }
  write_json(cfg.out / "gm_reference.json",
             {{"config", config_json(cfg)}, {"ground", g.info}, {"reference", gm_json(ref)}, {"summary", per_n}});
  std::printf("reference dE1 = %.4f eV, dE2 = %.4f eV; %d simulations written to %s\n", ha_to_ev(ref.delta_e1),
              ha_to_ev(ref.delta_e2), n_n * cfg.reps, cfg.out.string().c_str());
  return g.converged ? kOk : kUnconverged;
}

int guarded(int (*cmd)(const RunConfig&), const RunConfig& cfg) {
  try {
    return cmd(cfg);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParseFailure;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return kResourceFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace gfq
