#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace gfq {

struct RunConfig {
  std::string system;            // FCIDUMP path or builtin:<name>[,k=v...]
  std::string ansatz = "none";   // lih_u1, lih_u2, h2o_u1, h2o_u2, none
  std::string mode = "exact";    // exact | sampled
  std::string ground = "auto";   // auto | fci | ansatz
  std::vector<long> nmeas{1000};
  int reps = 1;
  unsigned long long seed = 1;
  double delta_au = 0.02;
  double omega_min_ev = -35.0;
  double omega_max_ev = 35.0;
  double omega_step_ev = 0.01;
  std::filesystem::path out = "out";
  std::filesystem::path cache_dir;
  int threads = 1;
  int max_iter = -1;

  /// Throws std::invalid_argument on inconsistent values.
  void validate() const;
};

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kParseFailure = 2,
  kUnconverged = 3,
  kResourceFailure = 4,
};

int cmd_vqe(const RunConfig& cfg);
int cmd_spectrum(const RunConfig& cfg);
int cmd_gm_study(const RunConfig& cfg);

/// Runs a command and maps library exceptions to exit codes, reporting to stderr.
int guarded(int (*cmd)(const RunConfig&), const RunConfig& cfg);

}  // namespace gfq
