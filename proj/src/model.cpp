#include "panm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace panm {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxResampleAttempts = 10000;
}  // namespace

PilotGrid::PilotGrid(int N_, int P_, double Ts_) : N(N_), P(P_), Ts(Ts_) {
  if (P <= 0 || N <= 0) throw std::invalid_argument("PilotGrid: N and P must be positive");
  if (N % P != 0) throw std::invalid_argument("PilotGrid: P must divide N");
  if (!(Ts > 0.0)) throw std::invalid_argument("PilotGrid: Ts must be positive");
  J.resize(P);
  // Odd P: {-m,...,m} with m = (P-1)/2. Even P: {-(P/2-1),...,P/2} so that
  // |J| stays exactly P.
  const int lo = (P % 2 == 1) ? -(P - 1) / 2 : -(P / 2 - 1);
  for (int i = 0; i < P; ++i) J[i] = lo + i;
}

int PilotGrid::position_of(int l) const {
  if (J.empty()) return -1;
  const int pos = l - J.front();
  return (pos >= 0 && pos < P) ? pos : -1;
}

std::vector<double> Channel::freqs(const PilotGrid& grid) const {
  std::vector<double> fs;
  fs.reserve(taps.size());
  const double span = grid.P * grid.Ts;
  for (const Tap& t : taps) {
    if (t.tau < 0.0 || t.tau >= span)
      throw std::invalid_argument("Channel: tau outside [0, P*Ts)");
    fs.push_back(t.tau / span);
  }
  return fs;
}

void NoiseSpec::validate(const PilotGrid& grid) const {
  if (sigma < 0.0) throw std::invalid_argument("NoiseSpec: sigma must be >= 0");
  if (impulse_count < 0 || impulse_count > grid.P)
    throw std::invalid_argument("NoiseSpec: impulse count must lie in [0, P]");
  if (!(impulse_scale > 0.0)) throw std::invalid_argument("NoiseSpec: impulse_scale must be > 0");
}

Complex complex_gaussian(Rng& rng, double std) {
  std::normal_distribution<double> n(0.0, std / std::sqrt(2.0));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

double sigma_from_snr_db(double snr_db) { return std::pow(10.0, -snr_db / 20.0); }

CVector atom(double f, double phi, const PilotGrid& grid) {
  if (!(f >= 0.0 && f < 1.0)) throw std::invalid_argument("atom: f must lie in [0,1)");
  if (!(phi >= 0.0 && phi < kTwoPi)) throw std::invalid_argument("atom: phi must lie in [0,2pi)");
  CVector a(grid.P);
  for (int i = 0; i < grid.P; ++i)
    a(i) = std::polar(1.0, phi - kTwoPi * grid.J[i] * f);
  return a;
}

double wrap_distance(double a, double b) {
  double d = std::abs(a - b);
  d -= std::floor(d);  // reduce to [0,1)
  return std::min(d, 1.0 - d);
}

double min_wrap_separation(const std::vector<double>& freqs) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < freqs.size(); ++i)
    for (size_t j = i + 1; j < freqs.size(); ++j)
      best = std::min(best, wrap_distance(freqs[i], freqs[j]));
  return best;
}

Channel gen_channel(int s, const PilotGrid& grid, Rng& rng) {
  if (s < 0) throw std::invalid_argument("gen_channel: s must be >= 0");
  const double min_sep = 1.5 / grid.P;
  if (s * min_sep >= 1.0)
    throw std::invalid_argument("gen_channel: separation 1.5/P infeasible for this many taps");

  std::uniform_real_distribution<double> delay(grid.Ts, (grid.P - 1) * grid.Ts);
  const double span = grid.P * grid.Ts;

  std::vector<double> taus(s);
  for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
    std::vector<double> fs(s);
    for (int k = 0; k < s; ++k) {
      taus[k] = delay(rng);
      fs[k] = taus[k] / span;
    }
    if (s < 2 || min_wrap_separation(fs) >= min_sep) {
      Channel ch;
      ch.taps.resize(s);
      for (int k = 0; k < s; ++k) {
        ch.taps[k].tau = taus[k];
        ch.taps[k].alpha = complex_gaussian(rng, 1.0);
      }
      std::sort(ch.taps.begin(), ch.taps.end(),
                [](const Tap& a, const Tap& b) { return a.tau < b.tau; });
      return ch;
    }
  }
  throw std::runtime_error("gen_channel: resampling budget exhausted without a separated draw");
}

std::pair<std::vector<int>, CVector> gen_impulsive(int r, const PilotGrid& grid,
                                                   const NoiseSpec& spec, Rng& rng) {
  if (r < 0 || r > grid.P) throw std::invalid_argument("gen_impulsive: r must lie in [0, P]");
  // Fisher-Yates prefix: r distinct positions, order fixed by the draw.
  std::vector<int> positions(grid.P);
  for (int i = 0; i < grid.P; ++i) positions[i] = i;
  for (int i = 0; i < r; ++i) {
    std::uniform_int_distribution<int> pick(i, grid.P - 1);
    std::swap(positions[i], positions[pick(rng)]);
  }
  positions.resize(r);
  std::sort(positions.begin(), positions.end());

  CVector z = CVector::Zero(grid.P);
  std::vector<int> support;
  support.reserve(r);
  for (int pos : positions) {
    support.push_back(grid.J[pos]);
    z(pos) = complex_gaussian(rng, spec.impulse_scale);
  }
  return {std::move(support), std::move(z)};
}

Measurement synth_measurements(const Channel& ch, const NoiseSpec& spec,
                               const PilotGrid& grid, Rng& rng) {
  spec.validate(grid);
  const auto fs = ch.freqs(grid);

  CVector clean = CVector::Zero(grid.P);
  for (int k = 0; k < ch.size(); ++k) clean += ch.taps[k].alpha * atom(fs[k], 0.0, grid);

  auto [support, z] = gen_impulsive(spec.impulse_count, grid, spec, rng);

  CVector w(grid.P);
  for (int i = 0; i < grid.P; ++i) w(i) = complex_gaussian(rng, spec.sigma);

  Measurement m;
  m.y = clean + w + z;
  MeasurementTruth truth;
  truth.channel = ch;
  truth.impulse_support = std::move(support);
  truth.z = std::move(z);
  truth.w = std::move(w);
  truth.clean = std::move(clean);
  m.truth = std::move(truth);
  return m;
}

}  // namespace panm
