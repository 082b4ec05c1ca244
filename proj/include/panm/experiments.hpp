#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "panm/estimator.hpp"
#include "panm/localize.hpp"

namespace panm {

enum class EstimatorKind { Panm, Plm };

const char* to_string(EstimatorKind k);
EstimatorKind estimator_from_string(const std::string& name);

struct TrialConfig {
  int P = 64;
  int N = 512;
  double Ts = 5e-6;
  int s = 5;
  int r = 5;
  double snr_db = 10.0;
  double lambda = 0.1;
  std::uint64_t seed = 1;
  EstimatorKind estimator = EstimatorKind::Panm;
  double impulse_scale = 10.0;
  std::optional<double> epsilon;  ///< default: sigma*sqrt(P), floor 1e-6
  double tol = 1e-6;
  int max_iter = 50000;
  int grid_size = 0;              ///< PLM grid G; 0 means 4P
  int localize_grid = 1 << 16;

  PilotGrid grid() const { return PilotGrid(N, P, Ts); }
  double sigma() const { return sigma_from_snr_db(snr_db); }
  double effective_epsilon() const;
  int effective_grid_size() const { return grid_size > 0 ? grid_size : 4 * P; }
};

struct TrialOutcome {
  EstimateResult estimate;
  bool succeeded = false;
  double wall_seconds = 0.0;
  SolveStatus solver_status = SolveStatus::MaxIter;
  std::string failure_reason;            ///< empty when the pipeline ran clean
  Measurement measurement;
  std::optional<DualSolution> dual;      ///< populated for the PANM estimator
};

struct PhaseGrid {
  std::vector<int> s_values;
  std::vector<int> r_values;
  int trials = 0;
  Eigen::MatrixXi successes;  ///< indexed [s_idx, r_idx]
};

struct SweepPoint {
  EstimatorKind estimator;
  double snr_db;
  double mean_mse;
  double stderr_mse;
  int trials;
};

/// Paper success rule: ||h - hhat||_2 <= threshold (inclusive).
bool success(const CVector& h_true, const CVector& h_hat, double threshold = 1e-2);

/// One seeded experiment: channel and noise synthesis, estimation,
/// localization, gain recovery, scoring. Deterministic in cfg.seed. Solver
/// failures surface as unsuccessful trials with a reason tag.
TrialOutcome run_trial(const TrialConfig& cfg);

/// Success counts over a (s, r) grid; each cell runs `trials` independent
/// seeded experiments. Cells are evaluated in a parallel map but reduced in
/// deterministic order.
PhaseGrid run_phase_transition(const TrialConfig& base, const std::vector<int>& s_values,
                               const std::vector<int>& r_values, int trials,
                               std::uint64_t master_seed);

/// Mean and standard error of ||h - hhat||_2 per (estimator, SNR).
std::vector<SweepPoint> run_mse_sweep(const TrialConfig& base,
                                      const std::vector<double>& snr_list, int trials,
                                      const std::vector<EstimatorKind>& estimators,
                                      std::uint64_t master_seed);

/// Stable per-trial seed derivation from a master seed and cell coordinates.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                          std::uint64_t t);

/// Index-parallel map with results in input order. Thread count comes from
/// PANM_THREADS when set, hardware concurrency otherwise.
void parallel_for(int count, const std::function<void(int)>& fn);
int worker_count();

}  // namespace panm
