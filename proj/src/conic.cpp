#include "panm/conic.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <lapacke.h>

extern "C" void openblas_set_num_threads(int);

namespace panm {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Full symmetric eigendecomposition, eigenvalues ascending. LAPACK's
// divide-and-conquer path is noticeably faster than Eigen's QR iteration
// at the block sizes the SDP produces; Eigen handles the small cases.
void eig_sym(const Matrix& S, Vector& evals, Matrix& evecs) {
  const int n = static_cast<int>(S.rows());
  if (n >= 16) {
    static std::once_flag blas_threads;
    std::call_once(blas_threads, [] { openblas_set_num_threads(1); });
    evecs = S;
    evals.resize(n);
    const int info =
        LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, evecs.data(), n, evals.data());
    if (info != 0)
      throw std::runtime_error("eig_sym: LAPACK dsyevd failed with info " + std::to_string(info));
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eig_sym: eigensolver did not converge");
    evals = es.eigenvalues();
    evecs = es.eigenvectors();
  }
}

double lowest_eigenvalue(const Matrix& S) {
  Vector evals;
  Matrix evecs;
  eig_sym(0.5 * (S + S.transpose()), evals, evecs);
  return evals(0);
}

}  // namespace

int ConeSpec::total_dim() const {
  int d = 0;
  for (const ConeBlock& b : blocks) d += b.vec_dim();
  return d;
}

void ConeSpec::validate() const {
  for (const ConeBlock& b : blocks)
    if (b.dim < 1) throw std::invalid_argument("ConeSpec: block dimension must be >= 1");
}

void ConicProblem::validate() const {
  cones.validate();
  const int m = static_cast<int>(b.size());
  const int n = static_cast<int>(c.size());
  if (A.rows() != m || A.cols() != n)
    throw std::invalid_argument("ConicProblem: A is " + std::to_string(A.rows()) + "x" +
                                std::to_string(A.cols()) + " but b has " + std::to_string(m) +
                                " rows and c " + std::to_string(n));
  if (cones.total_dim() != m)
    throw std::invalid_argument("ConicProblem: cone dimension " +
                                std::to_string(cones.total_dim()) + " != row count " +
                                std::to_string(m));
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIter: return "MaxIter";
    case SolveStatus::InfeasibleSuspected: return "InfeasibleSuspected";
  }
  return "?";
}

Vector project_nonneg(const Vector& v) { return v.cwiseMax(0.0); }

Vector project_soc(const Vector& v) {
  const int d = static_cast<int>(v.size());
  if (d < 1) throw std::invalid_argument("project_soc: empty vector");
  if (d == 1) return Vector::Constant(1, std::max(v(0), 0.0));
  const double t = v(0);
  const double xnorm = v.tail(d - 1).norm();
  if (xnorm <= t) return v;
  if (xnorm <= -t) return Vector::Zero(d);
  Vector out(d);
  const double theta = 0.5 * (t + xnorm);
  out(0) = theta;
  out.tail(d - 1) = (theta / xnorm) * v.tail(d - 1);
  return out;
}

Matrix project_psd(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("project_psd: matrix must be square");
  const Matrix S = 0.5 * (m + m.transpose());
  Vector evals;
  Matrix evecs;
  eig_sym(S, evals, evecs);
  const int n = static_cast<int>(S.rows());
  int npos = 0;
  for (int i = 0; i < n; ++i)
    if (evals(i) > 0.0) ++npos;
  if (npos == n) return S;
  if (npos == 0) return Matrix::Zero(n, n);
  // Rebuild from the smaller eigenvalue group.
  if (npos <= n - npos) {
    Matrix W = evecs.rightCols(npos);
    for (int i = 0; i < npos; ++i) W.col(i) *= std::sqrt(evals(n - npos + i));
    return W * W.transpose();
  }
  Matrix W = evecs.leftCols(n - npos);
  for (int i = 0; i < n - npos; ++i) W.col(i) *= std::sqrt(-evals(i));
  return S + W * W.transpose();
}

Matrix hermitian_embed(const Eigen::MatrixXcd& h, double tol) {
  if (h.rows() != h.cols()) throw std::invalid_argument("hermitian_embed: matrix must be square");
  const int n = static_cast<int>(h.rows());
  const double scale = 1.0 + h.cwiseAbs().maxCoeff();
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
    throw std::invalid_argument("hermitian_embed: input is not Hermitian");
  Matrix e(2 * n, 2 * n);
  const Matrix re = h.real();
  const Matrix im = h.imag();
  e.topLeftCorner(n, n) = re;
  e.bottomRightCorner(n, n) = re;
  e.topRightCorner(n, n) = -im;
  e.bottomLeftCorner(n, n) = im;
  return e;
}

int svec_index(int i, int j) { return j * (j + 1) / 2 + i; }

Vector svec(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) throw std::invalid_argument("svec: matrix must be square");
  Vector v(n * (n + 1) / 2);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) v(svec_index(i, j)) = (i == j) ? m(i, i) : kSqrt2 * m(i, j);
  return v;
}

Matrix smat(const Vector& v) {
  const int d = static_cast<int>(v.size());
  const int n = static_cast<int>((std::sqrt(8.0 * d + 1.0) - 1.0) / 2.0 + 0.5);
  if (n * (n + 1) / 2 != d) throw std::invalid_argument("smat: length is not triangular");
  Matrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      const double x = v(svec_index(i, j));
      if (i == j)
        m(i, i) = x;
      else
        m(i, j) = m(j, i) = x / kSqrt2;
    }
  return m;
}

namespace {

void project_block(Eigen::Ref<Vector> seg, const ConeBlock& blk, bool dual) {
  switch (blk.kind) {
    case ConeKind::Zero:
      if (!dual) seg.setZero();  // dual of {0} is everything
      break;
    case ConeKind::NonNeg:
      seg = seg.cwiseMax(0.0);
      break;
    case ConeKind::SecondOrder:
      seg = project_soc(seg);
      break;
    case ConeKind::Psd:
      seg = svec(project_psd(smat(seg)));
      break;
  }
}

Vector project_product(const Vector& v, const ConeSpec& cones, bool dual) {
  if (v.size() != cones.total_dim())
    throw std::invalid_argument("cone projection: dimension mismatch");
  Vector out = v;
  int off = 0;
  for (const ConeBlock& blk : cones.blocks) {
    project_block(out.segment(off, blk.vec_dim()), blk, dual);
    off += blk.vec_dim();
  }
  return out;
}

}  // namespace

Vector project_cone(const Vector& v, const ConeSpec& cones) {
  return project_product(v, cones, false);
}

Vector project_dual_cone(const Vector& v, const ConeSpec& cones) {
  return project_product(v, cones, true);
}

double cone_infeasibility(const Vector& v, const ConeSpec& cones) {
  if (v.size() != cones.total_dim())
    throw std::invalid_argument("cone_infeasibility: dimension mismatch");
  double worst = 0.0;
  int off = 0;
  for (const ConeBlock& blk : cones.blocks) {
    const auto seg = v.segment(off, blk.vec_dim());
    switch (blk.kind) {
      case ConeKind::Zero:
        worst = std::max(worst, seg.cwiseAbs().maxCoeff());
        break;
      case ConeKind::NonNeg:
        worst = std::max(worst, -std::min(0.0, seg.minCoeff()));
        break;
      case ConeKind::SecondOrder: {
        const double t = seg(0);
        const double xn = blk.dim > 1 ? seg.tail(blk.dim - 1).norm() : 0.0;
        worst = std::max(worst, std::max(0.0, xn - t));
        break;
      }
      case ConeKind::Psd:
        worst = std::max(worst, std::max(0.0, -lowest_eigenvalue(smat(seg))));
        break;
    }
    off += blk.vec_dim();
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Operator-splitting solver on the homogeneous self-dual embedding.
//
// With u = (x, y, tau) and v = (0, s, kappa), each iteration solves
// (I + Q) u~ = u + v against a cached factorization, projects onto
// R^n x K* x R+, and updates the splitting variable. The linear solve
// reduces to one system with I + A^T A, whose factorization is computed
// once: A never changes between iterations.
// ---------------------------------------------------------------------------

namespace {

struct BlockRange {
  ConeBlock block;
  int offset;
  int vec_dim;
};

std::vector<BlockRange> block_ranges(const ConeSpec& cones) {
  std::vector<BlockRange> rs;
  int off = 0;
  for (const ConeBlock& b : cones.blocks) {
    rs.push_back({b, off, b.vec_dim()});
    off += b.vec_dim();
  }
  return rs;
}

// Ruiz equilibration. Rows belonging to one second-order or PSD block share
// a single scale so that diagonal scaling preserves cone membership.
struct Equilibration {
  Vector row;  // D
  Vector col;  // E
  double rho_b = 1.0;
  double rho_c = 1.0;
};

Equilibration equilibrate(SparseMatrix& A, const ConeSpec& cones, int sweeps) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  Equilibration eq;
  eq.row = Vector::Ones(m);
  eq.col = Vector::Ones(n);
  const auto ranges = block_ranges(cones);

  Vector rnorm(m), cnorm(n);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    rnorm.setZero();
    cnorm.setZero();
    for (int k = 0; k < A.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
        const double a = std::abs(it.value());
        rnorm(it.row()) = std::max(rnorm(it.row()), a);
        cnorm(it.col()) = std::max(cnorm(it.col()), a);
      }
    for (const BlockRange& r : ranges) {
      if (r.block.kind == ConeKind::SecondOrder || r.block.kind == ConeKind::Psd) {
        const double blockmax = rnorm.segment(r.offset, r.vec_dim).maxCoeff();
        rnorm.segment(r.offset, r.vec_dim).setConstant(blockmax);
      }
    }
    auto scale_of = [](double x) {
      if (x < 1e-8 || !std::isfinite(x)) return 1.0;
      return 1.0 / std::sqrt(std::min(x, 1e8));
    };
    Vector dr = rnorm.unaryExpr(scale_of);
    Vector dc = cnorm.unaryExpr(scale_of);
    for (int k = 0; k < A.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(A, k); it; ++it)
        it.valueRef() *= dr(it.row()) * dc(it.col());
    eq.row = eq.row.cwiseProduct(dr);
    eq.col = eq.col.cwiseProduct(dc);
  }
  return eq;
}

}  // namespace

SolverResult solve(const ConicProblem& p, const SolverSettings& settings) {
  p.validate();
  const auto t_setup0 = std::chrono::steady_clock::now();

  const int n = static_cast<int>(p.c.size());
  const int m = static_cast<int>(p.b.size());
  const double alpha = settings.relaxation;
  const int check_every = std::max(1, settings.check_interval);

  // Scaled copy of the data; the original problem is kept for stopping tests.
  // b and c share one normalization factor: independent factors speed up
  // well-conditioned instances but put an amplified floor under the unscaled
  // duality gap on near-degenerate ones.
  SparseMatrix Ah = p.A;
  Equilibration eq;
  if (settings.scale) {
    eq = equilibrate(Ah, p.cones, 10);
  } else {
    eq.row = Vector::Ones(m);
    eq.col = Vector::Ones(n);
  }
  Vector bh = eq.row.cwiseProduct(p.b);
  Vector ch = eq.col.cwiseProduct(p.c);
  if (settings.scale) {
    // Only ever scale down: inflating a near-zero b or c distorts the
    // tau/kappa balance of the embedding.
    const double rho = 1.0 / std::sqrt(std::max(bh.norm(), 1.0) * std::max(ch.norm(), 1.0));
    eq.rho_b = eq.rho_c = rho;
    bh *= rho;
    ch *= rho;
  }

  const SparseMatrix Aht = Ah.transpose();

  // Factor I + A^T A once.
  SparseMatrix ident(n, n);
  ident.setIdentity();
  SparseMatrix kkt = ident + (Aht * Ah).pruned();
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  ldlt.compute(kkt);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("conic solve: factorization of I + A'A failed");

  auto solve_m = [&](const Vector& wx, const Vector& wy, Vector& px, Vector& py) {
    px = ldlt.solve(wx - Aht * wy);
    py.noalias() = wy + Ah * px;
  };

  Vector gx, gy;
  solve_m(ch, bh, gx, gy);
  const double denom = 1.0 + ch.dot(gx) + bh.dot(gy);

  const int total = n + m + 1;
  Vector u = Vector::Zero(total);
  Vector v = Vector::Zero(total);
  u(total - 1) = 1.0;  // tau
  v(total - 1) = 1.0;  // kappa

  Vector w(total), t(total), ut(total), px(n), py(m), xcand(n), ycand(m), scand(m);
  SolverResult res;
  res.x = Vector::Zero(n);
  res.s = Vector::Zero(m);
  res.y = Vector::Zero(m);

  const double bnorm = p.b.norm();
  const double cnorm = p.c.norm();
  const auto ranges = block_ranges(p.cones);
  const auto t_setup1 = std::chrono::steady_clock::now();
  res.setup_seconds = std::chrono::duration<double>(t_setup1 - t_setup0).count();

  auto extract = [&](double tau) {
    const double tc = std::max(tau, 1e-16);
    xcand = eq.col.cwiseProduct(u.head(n)) / (tc * eq.rho_b);
    ycand = eq.row.cwiseProduct(u.segment(n, m)) / (tc * eq.rho_c);
    scand = v.segment(n, m).cwiseQuotient(eq.row) / (tc * eq.rho_b);
  };

  auto residuals = [&](SolverResult& out) {
    out.primal_residual = (p.A * xcand + scand - p.b).norm() / (1.0 + bnorm);
    out.dual_residual = (p.A.transpose() * ycand + p.c).norm() / (1.0 + cnorm);
    out.objective = p.c.dot(xcand);
    out.dual_objective = -p.b.dot(ycand);
    out.relative_gap = std::abs(out.objective - out.dual_objective) /
                       (1.0 + std::abs(out.objective) + std::abs(out.dual_objective));
  };

  int iter = 0;
  bool converged = false;
  bool infeasible = false;
  for (iter = 1; iter <= settings.max_iter; ++iter) {
    // Linear step: (I + Q) ut = u + v.
    w = u + v;
    solve_m(w.head(n), w.segment(n, m), px, py);
    const double tau_t = (w(total - 1) + ch.dot(px) + bh.dot(py)) / denom;
    ut.head(n) = px - tau_t * gx;
    ut.segment(n, m) = py - tau_t * gy;
    ut(total - 1) = tau_t;

    // Over-relaxed projection step onto R^n x K* x R+.
    t = alpha * ut + (1.0 - alpha) * u;
    u = t - v;
    for (const BlockRange& r : ranges)
      project_block(u.segment(n + r.offset, r.vec_dim), r.block, /*dual=*/true);
    u(total - 1) = std::max(u(total - 1), 0.0);
    v += u - t;

    if (iter % check_every == 0 || iter == settings.max_iter) {
      if (!u.allFinite() || !v.allFinite())
        throw std::runtime_error("conic solve: non-finite iterate at iteration " +
                                 std::to_string(iter));
      const double tau = u(total - 1);
      if (tau > 1e-11 * std::max(1.0, u.cwiseAbs().maxCoeff())) {
        extract(tau);
        residuals(res);
        if (res.primal_residual <= settings.tol && res.dual_residual <= settings.tol &&
            res.relative_gap <= settings.tol) {
          converged = true;
          break;
        }
      } else if (iter >= std::max(1000, settings.max_iter / 10)) {
        infeasible = true;
        break;
      }
    }
  }

  const double tau = u(total - 1);
  extract(tau);
  residuals(res);
  res.x = xcand;
  res.y = ycand;
  res.s = scand;
  res.iterations = std::min(iter, settings.max_iter);
  if (converged)
    res.status = SolveStatus::Converged;
  else if (infeasible || tau <= 1e-11 * std::max(1.0, u.cwiseAbs().maxCoeff()))
    res.status = SolveStatus::InfeasibleSuspected;
  else
    res.status = SolveStatus::MaxIter;
  res.solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_setup1).count();
  return res;
}

// ---------------------------------------------------------------------------
// Text serialization
// ---------------------------------------------------------------------------

std::string problem_to_text(const ConicProblem& p) {
  std::ostringstream os;
  os.precision(17);
  os << "conic 1\n";
  os << "n " << p.c.size() << " m " << p.b.size() << "\n";
  os << "c";
  for (int i = 0; i < p.c.size(); ++i) os << " " << p.c(i);
  os << "\nb";
  for (int i = 0; i < p.b.size(); ++i) os << " " << p.b(i);
  os << "\nA " << p.A.nonZeros() << "\n";
  for (int k = 0; k < p.A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(p.A, k); it; ++it)
      os << it.row() << " " << it.col() << " " << it.value() << "\n";
  os << "cones " << p.cones.blocks.size() << "\n";
  for (const ConeBlock& b : p.cones.blocks) {
    switch (b.kind) {
      case ConeKind::Zero: os << "zero "; break;
      case ConeKind::NonNeg: os << "nonneg "; break;
      case ConeKind::SecondOrder: os << "soc "; break;
      case ConeKind::Psd: os << "psd "; break;
    }
    os << b.dim << "\n";
  }
  return os.str();
}

ConicProblem problem_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string tag;
  int version = 0;
  is >> tag >> version;
  if (tag != "conic" || version != 1)
    throw std::invalid_argument("problem_from_text: bad header");
  int n = 0, m = 0;
  is >> tag >> n >> tag >> m;
  ConicProblem p;
  p.c.resize(n);
  p.b.resize(m);
  is >> tag;
  for (int i = 0; i < n; ++i) is >> p.c(i);
  is >> tag;
  for (int i = 0; i < m; ++i) is >> p.b(i);
  long nnz = 0;
  is >> tag >> nnz;
  std::vector<Triplet> trips;
  trips.reserve(nnz);
  for (long k = 0; k < nnz; ++k) {
    int i, j;
    double val;
    is >> i >> j >> val;
    trips.emplace_back(i, j, val);
  }
  p.A.resize(m, n);
  p.A.setFromTriplets(trips.begin(), trips.end());
  size_t ncones = 0;
  is >> tag >> ncones;
  for (size_t k = 0; k < ncones; ++k) {
    std::string kind;
    int dim;
    is >> kind >> dim;
    ConeKind ck;
    if (kind == "zero") ck = ConeKind::Zero;
    else if (kind == "nonneg") ck = ConeKind::NonNeg;
    else if (kind == "soc") ck = ConeKind::SecondOrder;
    else if (kind == "psd") ck = ConeKind::Psd;
    else throw std::invalid_argument("problem_from_text: unknown cone '" + kind + "'");
    p.cones.blocks.push_back({ck, dim});
  }
  if (!is) throw std::invalid_argument("problem_from_text: truncated input");
  p.validate();
  return p;
}

}  // namespace panm
