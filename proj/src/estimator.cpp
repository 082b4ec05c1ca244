#include "panm/estimator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace panm {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

void PanmParams::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("PanmParams: lambda must be > 0");
  if (epsilon < 0.0) throw std::invalid_argument("PanmParams: epsilon must be >= 0");
}

double trace_residual(const CMatrix& Q0) {
  const int P = static_cast<int>(Q0.rows());
  double worst = 0.0;
  for (int k = 0; k < P; ++k) {
    Complex sum{0.0, 0.0};
    for (int i = 0; i + k < P; ++i) sum += Q0(i, i + k);
    worst = std::max(worst, std::abs(sum - (k == 0 ? 1.0 : 0.0)));
  }
  return worst;
}

// Variable layout of the dual SDP, in order: Re q (P), Im q (P), the
// l2-epigraph scalar, diag Q0 (P), then (Re, Im) pairs of the strict upper
// triangle of Q0 column by column of the pair list (i, j), i < j.
ConicProblem build_dual_sdp(const CVector& y, const PilotGrid& grid, const PanmParams& params) {
  params.validate();
  const int P = grid.P;
  if (P < 3) throw std::invalid_argument("build_dual_sdp: P < 3 is unsupported");
  if (y.size() != P) throw std::invalid_argument("build_dual_sdp: y length must equal P");

  const int n_vars = 2 * P + 1 + P * P;
  const int qr0 = 0, qi0 = P, t_var = 2 * P, d0 = 2 * P + 1, off0 = 2 * P + 1 + P;

  // pair index of the strict upper triangle
  std::vector<int> pair_of(P * P, -1);
  int npairs = 0;
  for (int i = 0; i < P; ++i)
    for (int j = i + 1; j < P; ++j) pair_of[i * P + j] = npairs++;
  auto ur = [&](int i, int j) { return off0 + 2 * pair_of[i * P + j]; };
  auto ui = [&](int i, int j) { return off0 + 2 * pair_of[i * P + j] + 1; };

  const int zero_rows = 2 * P - 1;
  const int nc = P + 1;       // complex block side
  const int side = 2 * nc;    // real embedded side
  const int sd = side * (side + 1) / 2;
  const int psd0 = zero_rows;
  const int soc_mod0 = psd0 + sd;
  const int soc_l2_0 = soc_mod0 + 3 * P;
  const int n_rows = soc_l2_0 + 2 * P + 1;

  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(6 * P * P));
  Vector b = Vector::Zero(n_rows);
  Vector c = Vector::Zero(n_vars);

  // Objective: minimize -<y,q>_R + epsilon*t.
  for (int p = 0; p < P; ++p) {
    c(qr0 + p) = -y(p).real();
    c(qi0 + p) = -y(p).imag();
  }
  c(t_var) = params.epsilon;

  // (i) trace equalities on the diagonals of Q0.
  for (int i = 0; i < P; ++i) trips.emplace_back(0, d0 + i, 1.0);
  b(0) = 1.0;
  for (int k = 1; k < P; ++k) {
    for (int i = 0; i + k < P; ++i) {
      trips.emplace_back(2 * k - 1, ur(i, i + k), 1.0);
      trips.emplace_back(2 * k, ui(i, i + k), 1.0);
    }
  }

  // (ii) [[Q0, q],[q^H, 1]] >= 0 through the real embedding
  // [[X, -Y],[Y, X]]. Each real parameter hits a fixed svec pattern;
  // slack rows read s = svec(embed(H)), so A carries the negated pattern.
  auto put = [&](int i, int j, int var, double coeff) {
    // entry (i,j), i <= j, of the embedded matrix
    trips.emplace_back(psd0 + svec_index(i, j), var, -(i == j ? coeff : coeff * kSqrt2));
  };
  for (int i = 0; i < P; ++i) {
    put(i, i, d0 + i, 1.0);
    put(nc + i, nc + i, d0 + i, 1.0);
  }
  for (int i = 0; i < P; ++i)
    for (int j = i + 1; j < P; ++j) {
      put(i, j, ur(i, j), 1.0);
      put(nc + i, nc + j, ur(i, j), 1.0);
      put(i, nc + j, ui(i, j), -1.0);
      put(j, nc + i, ui(i, j), 1.0);
    }
  for (int p = 0; p < P; ++p) {
    put(p, P, qr0 + p, 1.0);
    put(nc + p, nc + P, qr0 + p, 1.0);
    put(p, nc + P, qi0 + p, -1.0);
    put(P, nc + p, qi0 + p, 1.0);
  }
  b(psd0 + svec_index(P, P)) = 1.0;          // H(P,P) = 1
  b(psd0 + svec_index(nc + P, nc + P)) = 1.0;

  // (iii) |q(k)| <= lambda, one 3-dim second-order cone per entry.
  for (int p = 0; p < P; ++p) {
    const int r = soc_mod0 + 3 * p;
    b(r) = params.lambda;
    trips.emplace_back(r + 1, qr0 + p, -1.0);
    trips.emplace_back(r + 2, qi0 + p, -1.0);
  }

  // (iv) ||q||_2 <= t epigraph.
  trips.emplace_back(soc_l2_0, t_var, -1.0);
  for (int p = 0; p < P; ++p) {
    trips.emplace_back(soc_l2_0 + 1 + p, qr0 + p, -1.0);
    trips.emplace_back(soc_l2_0 + 1 + P + p, qi0 + p, -1.0);
  }

  ConicProblem prob;
  prob.c = std::move(c);
  prob.b = std::move(b);
  prob.A.resize(n_rows, n_vars);
  prob.A.setFromTriplets(trips.begin(), trips.end());
  prob.cones.blocks.push_back({ConeKind::Zero, zero_rows});
  prob.cones.blocks.push_back({ConeKind::Psd, side});
  for (int p = 0; p < P; ++p) prob.cones.blocks.push_back({ConeKind::SecondOrder, 3});
  prob.cones.blocks.push_back({ConeKind::SecondOrder, 2 * P + 1});
  prob.validate();
  return prob;
}

DualSolution solve_panm(const Measurement& m, const PilotGrid& grid, const PanmParams& params) {
  const int P = grid.P;
  ConicProblem prob = build_dual_sdp(m.y, grid, params);
  SolverResult res = solve(prob, params.solver);

  DualSolution sol;
  sol.q.resize(P);
  for (int p = 0; p < P; ++p) sol.q(p) = Complex(res.x(p), res.x(P + p));

  sol.Q0.resize(P, P);
  const int d0 = 2 * P + 1, off0 = 2 * P + 1 + P;
  int pair = 0;
  for (int i = 0; i < P; ++i) sol.Q0(i, i) = res.x(d0 + i);
  for (int i = 0; i < P; ++i)
    for (int j = i + 1; j < P; ++j) {
      const Complex v(res.x(off0 + 2 * pair), res.x(off0 + 2 * pair + 1));
      sol.Q0(i, j) = v;
      sol.Q0(j, i) = std::conj(v);
      ++pair;
    }

  double inner = 0.0;
  for (int p = 0; p < P; ++p)
    inner += sol.q(p).real() * m.y(p).real() + sol.q(p).imag() * m.y(p).imag();
  sol.objective = inner - params.epsilon * sol.q.norm();
  sol.info = std::move(res);
  return sol;
}

double primal_surrogate(const CVector& alphahat, const CVector& zhat, double lambda) {
  double v = 0.0;
  for (int i = 0; i < alphahat.size(); ++i) v += std::abs(alphahat(i));
  for (int i = 0; i < zhat.size(); ++i) v += lambda * std::abs(zhat(i));
  return v;
}

// Variable layout: Re c (G), Im c (G), per-entry moduli of c (G),
// Re z (P), Im z (P), per-entry moduli of z (P).
ConicProblem build_plm(const CVector& y, const PilotGrid& grid, const PanmParams& params, int G) {
  params.validate();
  const int P = grid.P;
  if (G < P) throw std::invalid_argument("build_plm: grid size G must be >= P");
  if (y.size() != P) throw std::invalid_argument("build_plm: y length must equal P");

  const int cr0 = 0, ci0 = G, uc0 = 2 * G;
  const int zr0 = 3 * G, zi0 = 3 * G + P, vz0 = 3 * G + 2 * P;
  const int n_vars = 3 * G + 3 * P;
  const int res0 = 3 * G + 3 * P;  // start of the residual cone rows
  const int n_rows = res0 + 2 * P + 1;

  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(2 * P) * G + 6 * (G + P));
  Vector b = Vector::Zero(n_rows);
  Vector c = Vector::Zero(n_vars);

  for (int g = 0; g < G; ++g) c(uc0 + g) = 1.0;
  for (int i = 0; i < P; ++i) c(vz0 + i) = params.lambda;

  for (int g = 0; g < G; ++g) {
    trips.emplace_back(3 * g, uc0 + g, -1.0);
    trips.emplace_back(3 * g + 1, cr0 + g, -1.0);
    trips.emplace_back(3 * g + 2, ci0 + g, -1.0);
  }
  for (int i = 0; i < P; ++i) {
    const int r = 3 * G + 3 * i;
    trips.emplace_back(r, vz0 + i, -1.0);
    trips.emplace_back(r + 1, zr0 + i, -1.0);
    trips.emplace_back(r + 2, zi0 + i, -1.0);
  }

  // ||y - F c - z||_2 <= epsilon with F(i,g) = exp(-j 2 pi J[i] g / G).
  b(res0) = params.epsilon;
  for (int i = 0; i < P; ++i) {
    const int rr = res0 + 1 + 2 * i;
    const int ri = rr + 1;
    b(rr) = y(i).real();
    b(ri) = y(i).imag();
    for (int g = 0; g < G; ++g) {
      const double ang = -kTwoPi * grid.J[i] * (static_cast<double>(g) / G);
      const double fre = std::cos(ang), fim = std::sin(ang);
      trips.emplace_back(rr, cr0 + g, fre);
      trips.emplace_back(rr, ci0 + g, -fim);
      trips.emplace_back(ri, cr0 + g, fim);
      trips.emplace_back(ri, ci0 + g, fre);
    }
    trips.emplace_back(rr, zr0 + i, 1.0);
    trips.emplace_back(ri, zi0 + i, 1.0);
  }

  ConicProblem prob;
  prob.c = std::move(c);
  prob.b = std::move(b);
  prob.A.resize(n_rows, n_vars);
  prob.A.setFromTriplets(trips.begin(), trips.end());
  for (int g = 0; g < G; ++g) prob.cones.blocks.push_back({ConeKind::SecondOrder, 3});
  for (int i = 0; i < P; ++i) prob.cones.blocks.push_back({ConeKind::SecondOrder, 3});
  prob.cones.blocks.push_back({ConeKind::SecondOrder, 2 * P + 1});
  prob.validate();
  return prob;
}

PlmSolution solve_plm(const Measurement& m, const PilotGrid& grid, const PanmParams& params,
                      int G) {
  const int P = grid.P;
  ConicProblem prob = build_plm(m.y, grid, params, G);
  SolverResult res = solve(prob, params.solver);

  PlmSolution sol;
  sol.coeffs.resize(G);
  for (int g = 0; g < G; ++g) sol.coeffs(g) = Complex(res.x(g), res.x(G + g));
  sol.z.resize(P);
  for (int i = 0; i < P; ++i) sol.z(i) = Complex(res.x(3 * G + i), res.x(3 * G + P + i));
  sol.info = std::move(res);
  return sol;
}

}  // namespace panm
