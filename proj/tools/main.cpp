#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "panm/estimator.hpp"
#include "panm/experiments.hpp"
#include "panm/io.hpp"
#include "panm/localize.hpp"
#include "panm/scenario.hpp"
#include "panm/svg.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

std::string join_args(int argc, char** argv) {
  std::ostringstream os;
  for (int i = 1; i < argc; ++i) os << (i > 1 ? " " : "") << argv[i];
  return os.str();
}

panm::TrialConfig config_from_scenario(const panm::Scenario& sc) {
  panm::TrialConfig cfg;
  cfg.P = sc.P;
  cfg.N = sc.N;
  cfg.Ts = sc.Ts;
  cfg.s = sc.s;
  cfg.r = sc.r;
  cfg.snr_db = sc.snr_db;
  cfg.lambda = sc.lambda;
  cfg.seed = sc.seed;
  cfg.estimator = panm::estimator_from_string(sc.estimator);
  cfg.impulse_scale = sc.impulse_scale;
  cfg.epsilon = sc.epsilon;
  cfg.tol = sc.tol;
  cfg.max_iter = sc.max_iter;
  cfg.grid_size = sc.grid_size;
  return cfg;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 const std::string& meta) {
  panm::Scenario sc;
  try {
    sc = panm::load_scenario(scenario_path);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInput;
  }
  const panm::TrialConfig cfg = config_from_scenario(sc);
  const panm::PilotGrid grid = cfg.grid();
  panm::Rng rng(cfg.seed);
  const panm::Channel ch = panm::gen_channel(cfg.s, grid, rng);
  panm::NoiseSpec noise{cfg.sigma(), cfg.r, cfg.impulse_scale};
  const panm::Measurement m = panm::synth_measurements(ch, noise, grid, rng);

  namespace fs = std::filesystem;
  panm::atomic_write_file((fs::path(out_dir) / "scenario.txt").string(),
                          panm::scenario_to_text(sc));
  panm::atomic_write_file((fs::path(out_dir) / "measurement.csv").string(),
                          panm::measurement_csv(grid, m.y));
  std::cout << "simulate: wrote measurement.csv (P=" << grid.P << ", s=" << cfg.s
            << ", r=" << cfg.r << ") to " << out_dir << "\n";
  (void)meta;
  return kExitOk;
}

int cmd_estimate(const std::string& scenario_path, const std::string& out_dir, int grid_n,
                 const std::string& meta) {
  panm::Scenario sc;
  try {
    sc = panm::load_scenario(scenario_path);
    if (sc.estimator != "panm")
      throw std::invalid_argument(
          "estimate drives the dual-SDP pipeline; use `sweep --estimator plm` for the baseline");
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInput;
  }

  const panm::TrialConfig cfg = config_from_scenario(sc);
  const panm::PilotGrid grid = cfg.grid();
  panm::Rng rng(cfg.seed);
  const panm::Channel ch = panm::gen_channel(cfg.s, grid, rng);
  panm::NoiseSpec noise{cfg.sigma(), cfg.r, cfg.impulse_scale};
  const panm::Measurement m = panm::synth_measurements(ch, noise, grid, rng);

  panm::PanmParams params;
  params.lambda = cfg.lambda;
  params.epsilon = cfg.effective_epsilon();
  params.solver.tol = cfg.tol;
  params.solver.max_iter = cfg.max_iter;

  panm::DualSolution dual;
  panm::EstimateResult est;
  try {
    dual = panm::solve_panm(m, grid, params);
    if (dual.info.status != panm::SolveStatus::Converged) {
      std::cerr << "error: solver did not converge (" << panm::to_string(dual.info.status)
                << " after " << dual.info.iterations << " iterations)\n";
      return kExitSolver;
    }
    est = panm::estimate_from_dual(m, dual.q, params.lambda, grid, grid_n);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitSolver;
  }

  const panm::CVector samples = panm::dual_poly(dual.q, grid, grid_n);
  std::vector<double> mags(samples.size());
  for (int i = 0; i < samples.size(); ++i) mags[i] = std::abs(samples(i));
  const std::vector<double> truth = m.truth ? m.truth->channel.freqs(grid)
                                            : std::vector<double>{};

  namespace fs = std::filesystem;
  panm::atomic_write_file((fs::path(out_dir) / "measurement.csv").string(),
                          panm::measurement_csv(grid, m.y));
  panm::atomic_write_file((fs::path(out_dir) / "dual.csv").string(),
                          panm::dual_csv(grid, dual.q));
  panm::atomic_write_file((fs::path(out_dir) / "estimate.csv").string(),
                          panm::estimate_csv(est));
  panm::atomic_write_file((fs::path(out_dir) / "impulses.csv").string(),
                          panm::impulse_csv(est));
  panm::atomic_write_file((fs::path(out_dir) / "dual_poly.svg").string(),
                          panm::svg_dual_polynomial(mags, truth, est.fhat, meta));
  panm::atomic_write_file((fs::path(out_dir) / "dual_magnitude.svg").string(),
                          panm::svg_dual_magnitude(grid, dual.q, params.lambda, est.omegahat,
                                                   meta));

  std::cout << "estimate: " << est.fhat.size() << " taps, " << est.omegahat.size()
            << " impulses";
  if (est.mse) std::cout << ", mse " << *est.mse;
  std::cout << " (" << dual.info.iterations << " iterations)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse multipath channel estimation from pilot measurements under "
               "Gaussian and impulsive noise"};
  app.require_subcommand(1);
  const std::string meta = join_args(argc, argv);

  // simulate / estimate
  std::string scenario_path, out_dir = ".";
  int grid_n = 1 << 16;
  auto* sim = app.add_subcommand("simulate", "synthesize a measurement from a scenario file");
  sim->add_option("--scenario", scenario_path, "scenario file")->required();
  sim->add_option("--out", out_dir, "output directory");
  auto* est = app.add_subcommand("estimate", "run the dual-SDP estimator on a scenario");
  est->add_option("--scenario", scenario_path, "scenario file")->required();
  est->add_option("--out", out_dir, "output directory");
  est->add_option("--grid-n", grid_n, "dual polynomial evaluation grid");

  // phase
  int P = 64, N = 0, trials = 20, smin = 1, smax = 10, rmin = 0, rmax = 10;
  double Ts = 5e-6, snr = 30.0, lambda = 0.1, impulse_scale = 10.0, tol = 1e-6;
  int max_iter = 50000;
  std::uint64_t seed = 1;
  auto* phase = app.add_subcommand("phase", "success-rate grid over (s, r)");
  phase->add_option("--P", P, "pilot count");
  phase->add_option("--N", N, "subcarrier count (default 8P)");
  phase->add_option("--Ts", Ts, "sampling interval [s]");
  phase->add_option("--smin", smin);
  phase->add_option("--smax", smax);
  phase->add_option("--rmin", rmin);
  phase->add_option("--rmax", rmax);
  phase->add_option("--trials", trials, "trials per cell");
  phase->add_option("--snr", snr, "SNR [dB]");
  phase->add_option("--lambda", lambda);
  phase->add_option("--seed", seed, "master seed");
  phase->add_option("--impulse-scale", impulse_scale);
  phase->add_option("--tol", tol);
  phase->add_option("--max-iter", max_iter);
  phase->add_option("--out", out_dir, "output directory");

  // sweep
  int s_taps = 6, r_imp = 6, grid_size = 0;
  std::vector<double> snr_list{10.0, 20.0, 30.0};
  std::string estimator = "both";
  auto* sweep = app.add_subcommand("sweep", "mean MSE against SNR per estimator");
  sweep->add_option("--P", P, "pilot count");
  sweep->add_option("--N", N, "subcarrier count (default 8P)");
  sweep->add_option("--Ts", Ts, "sampling interval [s]");
  sweep->add_option("--s", s_taps, "tap count");
  sweep->add_option("--r", r_imp, "impulse count");
  sweep->add_option("--snr", snr_list, "SNR list [dB]");
  sweep->add_option("--trials", trials, "trials per point");
  sweep->add_option("--lambda", lambda);
  sweep->add_option("--seed", seed, "master seed");
  sweep->add_option("--estimator", estimator, "panm, plm, or both");
  sweep->add_option("--grid-size", grid_size, "PLM grid size (default 4P)");
  sweep->add_option("--impulse-scale", impulse_scale);
  sweep->add_option("--tol", tol);
  sweep->add_option("--max-iter", max_iter);
  sweep->add_option("--out", out_dir, "output directory");

  // plot
  std::string dual_path, phase_path, sweep_path, svg_out = "plot.svg";
  double plot_lambda = 0.1;
  auto* plot = app.add_subcommand("plot", "re-render SVG figures from CSV output");
  plot->add_option("--dual", dual_path, "dual.csv to render");
  plot->add_option("--phase", phase_path, "phase.csv to render");
  plot->add_option("--sweep", sweep_path, "sweep.csv to render");
  plot->add_option("--lambda", plot_lambda, "lambda level for the dual stem plot");
  plot->add_option("--out", svg_out, "output SVG path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (sim->parsed()) return cmd_simulate(scenario_path, out_dir, meta);
    if (est->parsed()) return cmd_estimate(scenario_path, out_dir, grid_n, meta);

    if (phase->parsed()) {
      panm::TrialConfig base;
      base.P = P;
      base.N = N > 0 ? N : 8 * P;
      base.Ts = Ts;
      base.snr_db = snr;
      base.lambda = lambda;
      base.impulse_scale = impulse_scale;
      base.tol = tol;
      base.max_iter = max_iter;
      std::vector<int> svals, rvals;
      for (int v = smin; v <= smax; ++v) svals.push_back(v);
      for (int v = rmin; v <= rmax; ++v) rvals.push_back(v);
      const panm::PhaseGrid result =
          panm::run_phase_transition(base, svals, rvals, trials, seed);
      for (size_t si = 0; si < svals.size(); ++si)
        for (size_t ri = 0; ri < rvals.size(); ++ri)
          std::cout << "phase s=" << svals[si] << " r=" << rvals[ri] << " rate="
                    << (trials > 0 ? static_cast<double>(result.successes(si, ri)) / trials
                                   : 0.0)
                    << "\n";
      namespace fs = std::filesystem;
      panm::atomic_write_file((fs::path(out_dir) / "phase.csv").string(),
                              panm::phase_csv(result));
      panm::atomic_write_file((fs::path(out_dir) / "phase.svg").string(),
                              panm::svg_phase_heatmap(result, meta));
      return kExitOk;
    }

    if (sweep->parsed()) {
      panm::TrialConfig base;
      base.P = P;
      base.N = N > 0 ? N : 8 * P;
      base.Ts = Ts;
      base.s = s_taps;
      base.r = r_imp;
      base.lambda = lambda;
      base.impulse_scale = impulse_scale;
      base.tol = tol;
      base.max_iter = max_iter;
      base.grid_size = grid_size;
      std::vector<panm::EstimatorKind> kinds;
      if (estimator == "both")
        kinds = {panm::EstimatorKind::Panm, panm::EstimatorKind::Plm};
      else
        kinds = {panm::estimator_from_string(estimator)};
      const auto points = panm::run_mse_sweep(base, snr_list, trials, kinds, seed);
      for (const auto& p : points)
        std::cout << "sweep " << panm::to_string(p.estimator) << " snr=" << p.snr_db
                  << " mean_mse=" << p.mean_mse << " stderr=" << p.stderr_mse << "\n";
      namespace fs = std::filesystem;
      panm::atomic_write_file((fs::path(out_dir) / "sweep.csv").string(),
                              panm::sweep_csv(points));
      panm::atomic_write_file((fs::path(out_dir) / "sweep.svg").string(),
                              panm::svg_mse_sweep(points, meta));
      return kExitOk;
    }

    if (plot->parsed()) {
      if (!dual_path.empty()) {
        const panm::DualCsv dual = panm::read_dual_csv(dual_path);
        const int p_count = static_cast<int>(dual.k.size());
        panm::PilotGrid grid(p_count, p_count, 1.0);
        grid.J = dual.k;
        panm::atomic_write_file(svg_out,
                                panm::svg_dual_magnitude(grid, dual.q, plot_lambda, {}, meta));
      } else if (!phase_path.empty()) {
        panm::atomic_write_file(
            svg_out, panm::svg_phase_heatmap(panm::read_phase_csv(phase_path), meta));
      } else if (!sweep_path.empty()) {
        panm::atomic_write_file(svg_out,
                                panm::svg_mse_sweep(panm::read_sweep_csv(sweep_path), meta));
      } else {
        std::cerr << "error: plot requires one of --dual, --phase, --sweep\n";
        return kExitInput;
      }
      std::cout << "plot: wrote " << svg_out << "\n";
      return kExitOk;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
