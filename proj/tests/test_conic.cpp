#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "panm/conic.hpp"

using namespace panm;
using Complex = std::complex<double>;

namespace {

Vector vec(std::initializer_list<double> vals) {
  Vector v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v(i++) = x;
  return v;
}

ConicProblem lp_min_x_geq_1() {
  // minimize x subject to x >= 1
  ConicProblem p;
  p.c = vec({1.0});
  p.b = vec({-1.0});
  std::vector<Triplet> t{{0, 0, -1.0}};
  p.A.resize(1, 1);
  p.A.setFromTriplets(t.begin(), t.end());
  p.cones.blocks.push_back({ConeKind::NonNeg, 1});
  return p;
}

ConicProblem sdp_trace_2x2() {
  // minimize tr(X) s.t. X psd, X11 = 1; variables (X11, X12, X22)
  ConicProblem p;
  p.c = vec({1.0, 0.0, 1.0});
  p.b = Vector::Zero(4);
  p.b(0) = 1.0;
  std::vector<Triplet> t;
  t.emplace_back(0, 0, 1.0);  // zero cone: X11 = 1
  t.emplace_back(1, 0, -1.0);
  t.emplace_back(2, 1, -std::sqrt(2.0));
  t.emplace_back(3, 2, -1.0);
  p.A.resize(4, 3);
  p.A.setFromTriplets(t.begin(), t.end());
  p.cones.blocks.push_back({ConeKind::Zero, 1});
  p.cones.blocks.push_back({ConeKind::Psd, 2});
  return p;
}

// five variables, three cone blocks; bounded in every recession direction
ConicProblem small_socp() {
  ConicProblem p;
  p.c = vec({1.0, -2.0, 0.5, 1.0, -1.5});
  std::vector<Triplet> t;
  p.b = Vector::Zero(8);
  // block 1: (1 + x0, x1, x2) in SOC3
  p.b(0) = 1.0;
  t.emplace_back(0, 0, -1.0);
  t.emplace_back(1, 1, -1.0);
  t.emplace_back(2, 2, -1.0);
  // block 2: (x3 + 1, x4 + 1) nonneg
  p.b(3) = 1.0;
  p.b(4) = 1.0;
  t.emplace_back(3, 3, -1.0);
  t.emplace_back(4, 4, -1.0);
  // block 3: (2, x0 + x3, x1 - x4) in SOC3
  p.b(5) = 2.0;
  t.emplace_back(6, 0, -1.0);
  t.emplace_back(6, 3, -1.0);
  t.emplace_back(7, 1, -1.0);
  t.emplace_back(7, 4, 1.0);
  p.A.resize(8, 5);
  p.A.setFromTriplets(t.begin(), t.end());
  p.cones.blocks.push_back({ConeKind::SecondOrder, 3});
  p.cones.blocks.push_back({ConeKind::NonNeg, 2});
  p.cones.blocks.push_back({ConeKind::SecondOrder, 3});
  return p;
}

void check_converged_invariants(const ConicProblem& p, const SolverResult& res, double tol) {
  REQUIRE(res.status == SolveStatus::Converged);
  CHECK((p.A * res.x + res.s - p.b).norm() <= tol * (1.0 + p.b.norm()));
  CHECK(cone_infeasibility(res.s, p.cones) <= 10 * tol);
  // weak duality
  CHECK(res.dual_objective <= res.objective + tol * (1.0 + std::abs(res.objective)));
}

}  // namespace

TEST_CASE("project_nonneg") {
  CHECK(project_nonneg(vec({1.0, -2.0, 0.0})) == vec({1.0, 0.0, 0.0}));
  const Vector v = vec({0.5, 3.0, 0.0});
  CHECK(project_nonneg(v) == v);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 2.0);
  Vector r(40);
  for (int i = 0; i < r.size(); ++i) r(i) = g(rng);
  const Vector pr = project_nonneg(r);
  for (int i = 0; i < r.size(); ++i) CHECK(pr(i) == std::max(r(i), 0.0));
}

TEST_CASE("project_soc basic and grid oracle") {
  const Vector inside = vec({2.0, 1.0, 1.0});
  CHECK((project_soc(inside) - inside).norm() == 0.0);
  CHECK(project_soc(vec({-3.0, 1.0, 0.0})).norm() == 0.0);

  const Vector v = vec({0.0, 2.0, 0.0});
  const Vector pv = project_soc(v);
  CHECK(pv(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pv(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pv(2) == doctest::Approx(0.0).epsilon(1e-12));

  // nearest feasible point on a fine grid agrees
  double best = 1e300;
  Vector best_u(3);
  const int n = 121;
  for (int it = 0; it < n; ++it)
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        Vector u(3);
        u(0) = 3.0 * it / (n - 1);
        u(1) = -3.0 + 6.0 * ix / (n - 1);
        u(2) = -3.0 + 6.0 * iy / (n - 1);
        if (u.tail(2).norm() > u(0)) continue;
        const double d = (u - v).norm();
        if (d < best) {
          best = d;
          best_u = u;
        }
      }
  CHECK((best_u - pv).norm() < 0.08);  // grid resolution

  // one-dimensional cone degenerates to the ray
  CHECK(project_soc(vec({-2.0}))(0) == 0.0);
  CHECK(project_soc(vec({2.0}))(0) == 2.0);
}

TEST_CASE("project_psd examples and jacobi oracle") {
  Matrix d(2, 2);
  d << 1.0, 0.0, 0.0, -1.0;
  Matrix pd = project_psd(d);
  CHECK(pd(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(pd(1, 1)) < 1e-12);
  CHECK(std::abs(pd(0, 1)) < 1e-12);

  // PSD input unchanged
  Matrix b = Matrix::Random(4, 4);
  Matrix psd = b * b.transpose();
  CHECK((project_psd(psd) - psd).norm() < 1e-12 * (1.0 + psd.norm()));

  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 20; ++rep) {
    Matrix m(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) = g(rng);
    m = 0.5 * (m + m.transpose()).eval();
    const Matrix got = project_psd(m);
    const Matrix want = oracle::jacobi_psd_projection(m);
    CHECK((got - want).norm() < 1e-10);
  }
}

TEST_CASE("hermitian_embed") {
  using CMat = Eigen::MatrixXcd;
  const CMat i2 = CMat::Identity(2, 2);
  CHECK((hermitian_embed(i2) - Matrix::Identity(4, 4)).norm() == 0.0);

  CMat h(2, 2);
  h << Complex(0, 0), Complex(0, 1), Complex(0, -1), Complex(0, 0);
  const Matrix e = hermitian_embed(h);
  Eigen::VectorXd evals;
  Matrix evecs;
  oracle::jacobi_eig(e, evals, evecs);
  CHECK(evals(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(evals(1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(evals(2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(evals(3) == doctest::Approx(1.0).epsilon(1e-12));

  // embedding maps Hermitian PSD to PSD: fixed point of the projection
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  CMat a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = Complex(g(rng), g(rng));
  const CMat hp = a * a.adjoint();
  const Matrix ep = hermitian_embed(hp);
  CHECK((project_psd(ep) - ep).norm() < 1e-10 * (1.0 + ep.norm()));

  // linearity
  CMat h2 = 0.5 * (a + a.adjoint()).eval();
  const Matrix lhs = hermitian_embed(hp + Complex(2.0) * h2);
  const Matrix rhs = hermitian_embed(hp) + 2.0 * hermitian_embed(h2);
  CHECK((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));

  CMat bad(2, 2);
  bad << Complex(1, 0), Complex(1, 0), Complex(0, 0), Complex(1, 0);
  CHECK_THROWS_AS(hermitian_embed(bad), std::invalid_argument);
}

TEST_CASE("svec smat round trip preserves inner products") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 10; ++rep) {
    Matrix m(5, 5), n(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        m(i, j) = g(rng);
        n(i, j) = g(rng);
      }
    m = 0.5 * (m + m.transpose()).eval();
    n = 0.5 * (n + n.transpose()).eval();
    CHECK((smat(svec(m)) - m).norm() < 1e-14 * (1.0 + m.norm()));
    const double frob = (m.transpose() * n).trace();
    CHECK(svec(m).dot(svec(n)) == doctest::Approx(frob).epsilon(1e-12));
  }
}

TEST_CASE("projections are idempotent and non-expansive") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 3.0);
  auto rand_vec = [&](int d) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = g(rng);
    return v;
  };
  for (int rep = 0; rep < 1000; ++rep) {
    const Vector u = rand_vec(6);
    const Vector v = rand_vec(6);

    const Vector pu_n = project_nonneg(u);
    CHECK((project_nonneg(pu_n) - pu_n).norm() <= 1e-12);
    CHECK((pu_n - project_nonneg(v)).norm() <= (u - v).norm() + 1e-12);

    const Vector pu_s = project_soc(u);
    CHECK((project_soc(pu_s) - pu_s).norm() <= 1e-12);
    CHECK((pu_s - project_soc(v)).norm() <= (u - v).norm() + 1e-12);
  }
  for (int rep = 0; rep < 100; ++rep) {
    const Vector u = rand_vec(10);  // svec of 4x4
    const Vector v = rand_vec(10);
    const Matrix pu = project_psd(smat(u));
    CHECK((project_psd(pu) - pu).norm() <= 1e-12 * (1.0 + pu.norm()));
    CHECK((svec(pu) - svec(project_psd(smat(v)))).norm() <= (u - v).norm() + 1e-12);
  }
}

TEST_CASE("solve LP") {
  const ConicProblem p = lp_min_x_geq_1();
  SolverSettings st;
  const SolverResult res = solve(p, st);
  check_converged_invariants(p, res, st.tol);
  CHECK(res.x(0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(res.objective == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("solve SDP trace") {
  const ConicProblem p = sdp_trace_2x2();
  SolverSettings st;
  const SolverResult res = solve(p, st);
  check_converged_invariants(p, res, st.tol);
  CHECK(res.objective == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(res.x(0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(std::abs(res.x(1)) < 1e-4);
  CHECK(std::abs(res.x(2)) < 1e-4);
}

TEST_CASE("solve SOCP against zooming grid search") {
  const ConicProblem p = small_socp();
  SolverSettings st;
  const SolverResult res = solve(p, st);
  check_converged_invariants(p, res, st.tol);

  auto objective = [&](const Vector& x) { return p.c.dot(x); };
  auto feasible = [&](const Vector& x) {
    if (std::hypot(x(1), x(2)) > 1.0 + x(0)) return false;
    if (x(3) < -1.0 || x(4) < -1.0) return false;
    if (std::hypot(x(0) + x(3), x(1) - x(4)) > 2.0) return false;
    return true;
  };
  const double oracle_opt = oracle::grid_search_min(
      objective, feasible, Vector::Constant(5, -6.0), Vector::Constant(5, 8.0), 11, 14);
  CHECK(std::abs(res.objective - oracle_opt) <= 1e-3 * (1.0 + std::abs(oracle_opt)));
}

TEST_CASE("solve is deterministic") {
  const ConicProblem p = small_socp();
  const SolverResult a = solve(p);
  const SolverResult b = solve(p);
  CHECK(a.iterations == b.iterations);
  CHECK((a.x - b.x).norm() == 0.0);
}

TEST_CASE("dimension mismatch raises") {
  ConicProblem p = lp_min_x_geq_1();
  p.b = Vector::Zero(2);
  CHECK_THROWS_AS(solve(p), std::invalid_argument);

  ConicProblem q = lp_min_x_geq_1();
  q.cones.blocks[0].dim = 0;
  CHECK_THROWS_AS(solve(q), std::invalid_argument);
}

TEST_CASE("text serialization round trip") {
  const ConicProblem p = small_socp();
  const std::string text = problem_to_text(p);
  const ConicProblem q = problem_from_text(text);
  CHECK((q.c - p.c).norm() == 0.0);
  CHECK((q.b - p.b).norm() == 0.0);
  CHECK(q.cones.blocks.size() == p.cones.blocks.size());
  const SolverResult r1 = solve(p);
  const SolverResult r2 = solve(q);
  CHECK(r1.objective == doctest::Approx(r2.objective).epsilon(1e-12));
}
