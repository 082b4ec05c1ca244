#pragma once

#include "panm/conic.hpp"
#include "panm/model.hpp"

namespace panm {

struct PanmParams {
  double lambda = 0.1;    ///< bound on the entrywise modulus of the dual vector
  double epsilon = 0.0;   ///< coefficient of ||q||_2 in the dual objective
  SolverSettings solver;

  void validate() const;
};

/// Dual solution of the penalized program: the certificate vector q, the
/// Gram matrix of the magnitude-bound block, and solver diagnostics.
struct DualSolution {
  CVector q;          ///< length P
  CMatrix Q0;         ///< P x P Hermitian
  double objective;   ///< <y,q>_R - epsilon*||q||_2
  SolverResult info;
};

/// Maximal violation of the trace constraints sum_i Q0[i,i+k] = delta_k.
double trace_residual(const CMatrix& Q0);

/// Builds the dual semidefinite program for measurements y:
///   maximize  <y,q>_R - epsilon*||q||_2
///   s.t.      sum_i Q0[i,i+k] = delta_k, k = 0..P-1
///             [[Q0, q], [q^H, 1]] PSD      (real-embedded)
///             |q(k)| <= lambda for all k
/// in standard conic form (minimization). Requires P >= 3.
ConicProblem build_dual_sdp(const CVector& y, const PilotGrid& grid, const PanmParams& params);

DualSolution solve_panm(const Measurement& m, const PilotGrid& grid, const PanmParams& params);

/// Upper bound on the primal objective of a recovered decomposition:
/// sum_k |alpha_k| + lambda * sum_i |z_i|.
double primal_surrogate(const CVector& alphahat, const CVector& zhat, double lambda);

/// Penalized l1 baseline on a uniform frequency grid of size G:
///   minimize  ||c||_1 + lambda*||z||_1
///   s.t.      ||y - F c - z||_2 <= epsilon
/// with F the P x G matrix of atoms at {g/G}. Complex moduli enter through
/// 3-dimensional second-order cones. Requires G >= P.
ConicProblem build_plm(const CVector& y, const PilotGrid& grid, const PanmParams& params, int G);

struct PlmSolution {
  CVector coeffs;   ///< length G, grid-frequency coefficients
  CVector z;        ///< length P, impulse estimate
  SolverResult info;
};

PlmSolution solve_plm(const Measurement& m, const PilotGrid& grid, const PanmParams& params,
                      int G);

}  // namespace panm
