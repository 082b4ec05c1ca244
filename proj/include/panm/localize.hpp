#pragma once

#include "panm/model.hpp"

namespace panm {

/// Recovered channel parameters plus impulse estimates.
struct EstimateResult {
  std::vector<double> fhat;     ///< normalized frequencies, in [0,1)
  std::vector<double> tauhat;   ///< delays [s], tau = f * P * Ts
  CVector alphahat;             ///< tap gains, aligned with fhat
  std::vector<int> omegahat;    ///< impulse indices, values l in J
  CVector betahat;              ///< impulse values, aligned with omegahat
  CVector hhat;                 ///< reconstructed channel vector, length P
  std::optional<double> mse;    ///< ||h - hhat||_2 when truth is available
};

struct GainFit {
  CVector alpha;
  CVector beta;
  CVector hhat;
};

/// Samples of the dual polynomial Q(f) = sum_{k in J} q(k) e^{j 2 pi f k}
/// on the uniform grid {i/grid_n}, evaluated by a zero-padded FFT.
/// Throws when grid_n < P.
CVector dual_poly(const CVector& q, const PilotGrid& grid, int grid_n);

/// Local maxima of |Q| above peak_threshold, refined by quadratic
/// interpolation of |Q|^2 over three neighboring samples; maxima closer
/// than 0.5/P (wrap-around) are merged keeping the larger one.
std::vector<double> find_frequencies(const CVector& q_samples, const PilotGrid& grid,
                                     double peak_threshold = 0.99);

/// Impulse support read off the dual vector: { l in J : |q(l)| >= ratio*lambda }.
std::vector<int> find_impulses(const CVector& q, const PilotGrid& grid, double lambda,
                               double ratio_threshold = 0.99);

/// Joint least squares of y on the atoms at fhat and the unit columns at
/// omegahat, via a rank-revealing orthogonal factorization (minimum-norm
/// solution when rank-deficient). Throws when |fhat| + |omegahat| > P.
GainFit recover_gains(const Measurement& m, const std::vector<double>& fhat,
                      const std::vector<int>& omegahat, const PilotGrid& grid);

/// tau_k = f_k * P * Ts.
std::vector<double> delays_from_freqs(const std::vector<double>& fhat, const PilotGrid& grid);

/// Full support-and-gains readout from a dual vector.
EstimateResult estimate_from_dual(const Measurement& m, const CVector& q, double lambda,
                                  const PilotGrid& grid, int grid_n = 1 << 16,
                                  double peak_threshold = 0.99, double impulse_threshold = 0.99);

}  // namespace panm
