#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

namespace panm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

enum class ConeKind { Zero, NonNeg, SecondOrder, Psd };

/// One block of the product cone. For Psd, `dim` is the matrix side; the
/// block occupies side*(side+1)/2 slots of the slack vector (svec packing,
/// off-diagonals scaled by sqrt(2) so vector and Frobenius inner products
/// agree).
struct ConeBlock {
  ConeKind kind = ConeKind::Zero;
  int dim = 0;

  int vec_dim() const { return kind == ConeKind::Psd ? dim * (dim + 1) / 2 : dim; }
};

struct ConeSpec {
  std::vector<ConeBlock> blocks;

  int total_dim() const;
  void validate() const;
};

/// Standard form: minimize c.x subject to A x + s = b, s in K.
struct ConicProblem {
  Vector c;
  SparseMatrix A;
  Vector b;
  ConeSpec cones;

  void validate() const;
};

enum class SolveStatus { Converged, MaxIter, InfeasibleSuspected };

const char* to_string(SolveStatus s);

struct SolverResult {
  Vector x;                    ///< primal iterate
  Vector s;                    ///< slack, s in K
  Vector y;                    ///< dual multipliers, y in K*
  double objective = 0.0;      ///< c.x
  double dual_objective = 0.0; ///< -b.y
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  double solve_seconds = 0.0;
  double setup_seconds = 0.0;
  SolveStatus status = SolveStatus::MaxIter;
};

struct SolverSettings {
  double tol = 1e-6;        ///< relative tolerance on residuals and gap
  int max_iter = 50000;
  double relaxation = 1.5;  ///< over-relaxation parameter
  bool scale = true;        ///< Ruiz equilibration + b/c normalization
  int check_interval = 25;  ///< termination test period
};

// Cone projections. Each is idempotent and non-expansive.
Vector project_nonneg(const Vector& v);

/// Projection onto {(t, x) : ||x||_2 <= t}. dim >= 1; dim == 1 degenerates
/// to the nonnegative ray.
Vector project_soc(const Vector& v);

/// Nearest (Frobenius) PSD matrix: symmetrize, then clip negative eigenvalues.
Matrix project_psd(const Matrix& m);

/// Real embedding [[Re H, -Im H], [Im H, Re H]] of a complex Hermitian H;
/// PSD iff H is, with every eigenvalue of H doubled in multiplicity.
/// Throws if H is not Hermitian to tolerance.
Matrix hermitian_embed(const Eigen::MatrixXcd& h, double tol = 1e-10);

/// Packed symmetric storage: upper triangle by columns, off-diagonals
/// scaled by sqrt(2). smat inverts svec.
Vector svec(const Matrix& m);
Matrix smat(const Vector& v);
int svec_index(int i, int j);  ///< slot of entry (i,j), i <= j

/// Projection onto the product cone K (blockwise).
Vector project_cone(const Vector& v, const ConeSpec& cones);
/// Projection onto the dual cone K* (Zero blocks become free).
Vector project_dual_cone(const Vector& v, const ConeSpec& cones);

/// Worst violation of cone membership across blocks (0 when v lies in K).
double cone_infeasibility(const Vector& v, const ConeSpec& cones);

/// First-order operator-splitting solve of the standard-form problem via the
/// homogeneous self-dual embedding: each iteration alternates a linear-system
/// solve against a cached factorization with a projection onto the product
/// cone. Status MaxIter still carries the final iterate and residuals.
/// Throws on dimension mismatch or a non-finite iterate.
SolverResult solve(const ConicProblem& p, const SolverSettings& settings = {});

/// Plain-text triplet serialization (c, A in COO form, b, cone list), for
/// debugging small instances.
std::string problem_to_text(const ConicProblem& p);
ConicProblem problem_from_text(const std::string& text);

}  // namespace panm
