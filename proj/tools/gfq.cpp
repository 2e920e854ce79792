// gfq: Green's-function-by-sampling experiments from the command line.
//
//   gfq vqe       --system data/lih_sto3g.fcidump --ansatz lih_u1
//   gfq spectrum  --system ... --ansatz lih_u1 --mode sampled --nmeas 10,32000 --seed 7
//   gfq gm-study  --system ... --ansatz lih_u1 --mode sampled --nmeas 1000,2000 --reps 100
//
// Options may also come from a key = value file given by --config; flags win.

#include <thread>

#include <CLI11.hpp>

#include "run_config.hpp"

int main(int argc, char** argv) {
  gfq::RunConfig cfg;
  cfg.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  CLI::App app{"Green's functions from probabilistic state preparation and sampling"};
  app.set_config("--config", "", "key = value file with default options");
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--system", cfg.system, "FCIDUMP path or builtin:<name>[,key=value...]")->required();
    sub->add_option("--ansatz", cfg.ansatz, "lih_u1, lih_u2, h2o_u1, h2o_u2 or none")->capture_default_str();
    sub->add_option("--max-iter", cfg.max_iter, "simplex iteration cap (0 evaluates theta = 0 only)");
    sub->add_option("--out", cfg.out, "output directory")->capture_default_str();
    sub->add_option("--cache-dir", cfg.cache_dir, "directory for cached sector spectra");
  };
  auto add_gf = [&](CLI::App* sub) {
    sub->add_option("--mode", cfg.mode, "exact or sampled")->check(CLI::IsMember({"exact", "sampled"}))
        ->capture_default_str();
    sub->add_option("--ground", cfg.ground, "auto, fci or ansatz")->check(CLI::IsMember({"auto", "fci", "ansatz"}))
        ->capture_default_str();
    sub->add_option("--nmeas", cfg.nmeas, "measurements per GF component (list)")->delimiter(',');
    sub->add_option("--reps", cfg.reps, "independent simulations per N_meas")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "root seed")->capture_default_str();
    sub->add_option("--delta-au", cfg.delta_au, "broadening in Hartree")->capture_default_str();
    sub->add_option("--omega-min-ev", cfg.omega_min_ev)->capture_default_str();
    sub->add_option("--omega-max-ev", cfg.omega_max_ev)->capture_default_str();
    sub->add_option("--omega-step-ev", cfg.omega_step_ev)->capture_default_str();
    sub->add_option("--threads", cfg.threads, "worker threads for repetitions");
  };

  auto* vqe = app.add_subcommand("vqe", "optimise an ansatz and report its energy");
  add_common(vqe);
  auto* spectrum = app.add_subcommand("spectrum", "spectral function and self-energy CSVs");
  add_common(spectrum);
  add_gf(spectrum);
  auto* gm = app.add_subcommand("gm-study", "Galitskii-Migdal correlation energies over repetitions");
  add_common(gm);
  add_gf(gm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? gfq::kOk : gfq::kParseFailure;
  }

  if (vqe->parsed()) return gfq::guarded(gfq::cmd_vqe, cfg);
  if (spectrum->parsed()) return gfq::guarded(gfq::cmd_spectrum, cfg);
  return gfq::guarded(gfq::cmd_gm_study, cfg);
}
