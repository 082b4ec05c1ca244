#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace panm {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Pilot measurement domain: P equispaced pilots out of N subcarriers,
/// indexed by the zero-centered set J.
struct PilotGrid {
  int N = 0;                ///< total subcarrier count
  int P = 0;                ///< pilot count; must divide N
  double Ts = 0.0;          ///< sampling interval [s]
  std::vector<int> J;       ///< ordered pilot index set, |J| = P

  PilotGrid() = default;
  PilotGrid(int N, int P, double Ts);

  /// Position of index l within J, or -1 if absent.
  int position_of(int l) const;
};

struct Tap {
  double tau = 0.0;         ///< delay [s]
  Complex alpha{0.0, 0.0};  ///< complex gain
};

/// Sparse multipath channel: taps sorted by increasing delay.
struct Channel {
  std::vector<Tap> taps;

  int size() const { return static_cast<int>(taps.size()); }
  /// Normalized frequencies f_k = tau_k / (P*Ts), each in [0,1).
  std::vector<double> freqs(const PilotGrid& grid) const;
};

struct NoiseSpec {
  double sigma = 0.0;          ///< Gaussian std per complex sample
  int impulse_count = 0;       ///< r
  double impulse_scale = 10.0; ///< RMS of each impulse amplitude

  void validate(const PilotGrid& grid) const;
};

/// Ground-truth bookkeeping stored alongside synthetic measurements.
struct MeasurementTruth {
  Channel channel;
  std::vector<int> impulse_support;  ///< values l in J
  CVector z;                         ///< impulsive noise, length P
  CVector w;                         ///< Gaussian noise, length P
  CVector clean;                     ///< h = sum_k alpha_k a(f_k, 0)
};

struct Measurement {
  CVector y;
  std::optional<MeasurementTruth> truth;
};

using Rng = std::mt19937_64;

/// Draw from CN(0, std^2): circularly symmetric, E|x|^2 = std^2.
Complex complex_gaussian(Rng& rng, double std);

/// sigma such that SNR = 10*log10(1/sigma^2).
double sigma_from_snr_db(double snr_db);

/// Sinusoidal atom a(f,phi)(l) = e^{j phi} e^{-j 2 pi l f}, l in J.
CVector atom(double f, double phi, const PilotGrid& grid);

/// Minimum pairwise wrap-around distance on the unit torus; +inf for < 2 points.
double min_wrap_separation(const std::vector<double>& freqs);

/// Wrap-around distance between two points of [0,1).
double wrap_distance(double a, double b);

/// Random s-tap channel: delays uniform on [Ts,(P-1)Ts), resampled until the
/// wrap-around separation of the normalized frequencies is >= 1.5/P, gains
/// standard complex Gaussian. Throws if s is infeasible or sampling exhausts
/// its attempt budget.
Channel gen_channel(int s, const PilotGrid& grid, Rng& rng);

/// Impulsive noise: r support indices drawn without replacement from J,
/// values CN(0, impulse_scale^2). Returns (support, z) with z length P.
std::pair<std::vector<int>, CVector> gen_impulsive(int r, const PilotGrid& grid,
                                                   const NoiseSpec& spec, Rng& rng);

/// y = sum_k alpha_k a(f_k,0) + w + z. Draws impulses first, then w, so a
/// fixed rng state reproduces the measurement exactly.
Measurement synth_measurements(const Channel& ch, const NoiseSpec& spec,
                               const PilotGrid& grid, Rng& rng);

}  // namespace panm
