#include "panm/localize.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace panm {

namespace {
// FFTW plan creation is not thread safe; execution is.
std::mutex fftw_plan_mutex;
}  // namespace

CVector dual_poly(const CVector& q, const PilotGrid& grid, int grid_n) {
  const int P = grid.P;
  if (q.size() != P) throw std::invalid_argument("dual_poly: q length must equal P");
  if (grid_n < P) throw std::invalid_argument("dual_poly: grid_n must be >= P");

  CVector out(grid_n);
  std::vector<Complex> buf(grid_n, Complex{0.0, 0.0});
  for (int i = 0; i < P; ++i) {
    const int k = ((grid.J[i] % grid_n) + grid_n) % grid_n;
    buf[k] += q(i);
  }

  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    plan = fftw_plan_dft_1d(grid_n, reinterpret_cast<fftw_complex*>(buf.data()),
                            reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("dual_poly: FFTW plan creation failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fftw_destroy_plan(plan);
  }
  return out;  // unnormalized backward transform: sum_k buf[k] e^{+j 2 pi i k / n}
}

std::vector<double> find_frequencies(const CVector& q_samples, const PilotGrid& grid,
                                     double peak_threshold) {
  const int n = static_cast<int>(q_samples.size());
  if (n < 3) return {};

  std::vector<double> mag(n);
  for (int i = 0; i < n; ++i) mag[i] = std::abs(q_samples(i));

  struct Peak {
    double f;
    double value;
  };
  std::vector<Peak> peaks;
  for (int i = 0; i < n; ++i) {
    const int prev = (i + n - 1) % n;
    const int next = (i + 1) % n;
    if (mag[i] <= peak_threshold) continue;
    if (!(mag[i] >= mag[prev] && mag[i] > mag[next])) continue;
    // quadratic vertex of |Q|^2 through the three neighboring samples
    const double gm = mag[prev] * mag[prev];
    const double g0 = mag[i] * mag[i];
    const double gp = mag[next] * mag[next];
    const double den = gm - 2.0 * g0 + gp;
    double delta = 0.0;
    if (den < 0.0) delta = 0.5 * (gm - gp) / den;
    delta = std::clamp(delta, -0.5, 0.5);
    double f = (i + delta) / n;
    f -= std::floor(f);
    peaks.push_back({f, g0});
  }

  // merge near-duplicates closer than 0.5/P, keeping the larger
  const double merge_radius = 0.5 / grid.P;
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    return a.value > b.value;
  });
  std::vector<Peak> kept;
  for (const Peak& p : peaks) {
    bool close = false;
    for (const Peak& k : kept)
      if (wrap_distance(p.f, k.f) < merge_radius) {
        close = true;
        break;
      }
    if (!close) kept.push_back(p);
  }

  std::vector<double> out;
  out.reserve(kept.size());
  for (const Peak& p : kept) out.push_back(p.f);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> find_impulses(const CVector& q, const PilotGrid& grid, double lambda,
                               double ratio_threshold) {
  if (!(lambda > 0.0)) throw std::invalid_argument("find_impulses: lambda must be > 0");
  if (q.size() != grid.P) throw std::invalid_argument("find_impulses: q length must equal P");
  std::vector<int> omega;
  for (int i = 0; i < grid.P; ++i)
    if (std::abs(q(i)) >= ratio_threshold * lambda) omega.push_back(grid.J[i]);
  return omega;
}

GainFit recover_gains(const Measurement& m, const std::vector<double>& fhat,
                      const std::vector<int>& omegahat, const PilotGrid& grid) {
  const int P = grid.P;
  const int s = static_cast<int>(fhat.size());
  const int r = static_cast<int>(omegahat.size());
  if (m.y.size() != P) throw std::invalid_argument("recover_gains: y length must equal P");
  if (s + r > P)
    throw std::invalid_argument("recover_gains: more unknowns than measurements");

  GainFit fit;
  fit.alpha = CVector::Zero(s);
  fit.beta = CVector::Zero(r);
  fit.hhat = CVector::Zero(P);
  if (s + r == 0) return fit;

  CMatrix M(P, s + r);
  for (int k = 0; k < s; ++k) M.col(k) = atom(fhat[k], 0.0, grid);
  for (int k = 0; k < r; ++k) {
    const int pos = grid.position_of(omegahat[k]);
    if (pos < 0) throw std::invalid_argument("recover_gains: impulse index outside J");
    M.col(s + k).setZero();
    M(pos, s + k) = 1.0;
  }

  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(M);
  const CVector sol = cod.solve(m.y);
  fit.alpha = sol.head(s);
  fit.beta = sol.tail(r);
  fit.hhat = M.leftCols(s) * fit.alpha;
  return fit;
}

std::vector<double> delays_from_freqs(const std::vector<double>& fhat, const PilotGrid& grid) {
  std::vector<double> taus;
  taus.reserve(fhat.size());
  for (double f : fhat) {
    if (!(f >= 0.0 && f < 1.0))
      throw std::invalid_argument("delays_from_freqs: f must lie in [0,1)");
    taus.push_back(f * grid.P * grid.Ts);
  }
  return taus;
}

EstimateResult estimate_from_dual(const Measurement& m, const CVector& q, double lambda,
                                  const PilotGrid& grid, int grid_n, double peak_threshold,
                                  double impulse_threshold) {
  EstimateResult est;
  const CVector samples = dual_poly(q, grid, grid_n);
  est.fhat = find_frequencies(samples, grid, peak_threshold);
  est.omegahat = find_impulses(q, grid, lambda, impulse_threshold);
  GainFit fit = recover_gains(m, est.fhat, est.omegahat, grid);
  est.alphahat = std::move(fit.alpha);
  est.betahat = std::move(fit.beta);
  est.hhat = std::move(fit.hhat);
  est.tauhat = delays_from_freqs(est.fhat, grid);
  if (m.truth) est.mse = (m.truth->clean - est.hhat).norm();
  return est;
}

}  // namespace panm
