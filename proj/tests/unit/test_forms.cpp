#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "crslip/errors.hpp"
#include "crslip/forms.hpp"
#include "crslip/quadrature.hpp"

using namespace crslip;

namespace {

const BallDomain disk(DomainKind::disk2d);
const BallDomain ball(DomainKind::ball3d);

SimplexMesh level(const SmoothDomain& d, int refinements) {
  SimplexMesh m = coarse_mesh(d);
  for (int r = 0; r < refinements; ++r) m = refine(m, d);
  return m;
}

CRFunction random_cr(const FacetComplex& f, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CRFunction u(f);
  for (Eigen::Index i = 0; i < u.values.size(); ++i) u.values[i] = g(rng);
  return u;
}

// (u, v) + (nu/2) sum_T (E u, E v) with E = grad + grad^T, by cell quadrature.
double a_oracle(const CRFunction& u, const CRFunction& v, double nu) {
  const SimplexMesh& m = u.facets->mesh();
  const QuadratureRule& q = simplex_rule(m.dim(), 2);
  double s = 0.0;
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (std::size_t k = 0; k < q.size(); ++k)
      s += m.volume(c) * q.weights[k] * u.eval_local(c, q.points[k]).dot(v.eval_local(c, q.points[k]));
    const Eigen::Matrix3d gu = u.gradient(c), gv = v.gradient(c);
    const Eigen::Matrix3d eu = gu + gu.transpose(), ev = gv + gv.transpose();
    s += 0.5 * nu * m.volume(c) * (eu.array() * ev.array()).sum();
  }
  return s;
}

// -(q, div v) with q in P0.
double b_oracle(const Eigen::VectorXd& q, const CRFunction& v) {
  const SimplexMesh& m = v.facets->mesh();
  double s = 0.0;
  for (std::size_t c = 0; c < m.num_cells(); ++c) s -= m.volume(c) * q[c] * v.gradient(c).trace();
  return s;
}

// gamma sum_e h_e^{-1} int_e [u].[v] with a degree-8 facet rule.
double j_oracle(const CRFunction& u, const CRFunction& v, double gamma) {
  const FacetComplex& f = *u.facets;
  const SimplexMesh& m = f.mesh();
  const int n = m.dim();
  const QuadratureRule& q = simplex_rule(n - 1, 8);
  double s = 0.0;
  for (const Facet& e : f.facets()) {
    if (e.is_boundary()) continue;
    for (std::size_t k = 0; k < q.size(); ++k) {
      Point x = Point::Zero();
      for (int i = 0; i < n; ++i) x += q.points[k][i] * m.vertex(e.vertices[i]);
      const Point ju = cr_eval(u, e.cells[1], x) - cr_eval(u, e.cells[0], x);
      const Point jv = cr_eval(v, e.cells[1], x) - cr_eval(v, e.cells[0], x);
      s += gamma / e.diameter * e.measure * q.weights[k] * ju.dot(jv);
    }
  }
  return s;
}

bool symmetric(const SparseMatrix& m) {
  const SparseMatrix d = m - SparseMatrix(m.transpose());
  return d.norm() <= 1e-13 * std::max(1.0, m.norm());
}

Point affine(const Point& x) { return Point(0.5 + x[0] - 2.0 * x[1], -1.0 + 3.0 * x[0] + x[1], 0.0); }

}  // namespace

TEST(FormA, ConstantFieldGivesArea) {
  for (const SmoothDomain* d : {static_cast<const SmoothDomain*>(&disk), static_cast<const SmoothDomain*>(&ball)}) {
    const SimplexMesh m = level(*d, 1);
    const FacetComplex f = build_facets(m);
    const SparseMatrix A = assemble_a(f, 1.7);
    for (int a = 0; a < m.dim(); ++a) {
      Point e = Point::Zero();
      e[a] = 1.0;
      const CRFunction u = cr_interpolate([&](const Point&) { return e; }, f);
      EXPECT_NEAR(u.values.dot(A * u.values), m.total_volume(), 1e-12);
    }
  }
}

TEST(FormA, RigidRotationHasNoStrain) {
  const SimplexMesh m = level(disk, 2);
  const FacetComplex f = build_facets(m);
  const CRFunction u = cr_interpolate([](const Point& x) { return Point(-x[1], x[0], 0.0); }, f);
  const SparseMatrix A1 = assemble_a(f, 1.0), A9 = assemble_a(f, 9.0);
  EXPECT_NEAR(u.values.dot(A1 * u.values), u.values.dot(A9 * u.values), 1e-12);
  EXPECT_NEAR(u.values.dot(A1 * u.values), a_oracle(u, u, 0.0), 1e-12);
}

TEST(FormA, PositiveDefinite) {
  const SimplexMesh m = level(ball, 1);
  const FacetComplex f = build_facets(m);
  Eigen::SimplicialLLT<SparseMatrix> llt(assemble_a(f, 1.0));
  EXPECT_EQ(llt.info(), Eigen::Success);
}

TEST(FormA, MatchesQuadratureOracle) {
  for (const SmoothDomain* d : {static_cast<const SmoothDomain*>(&disk), static_cast<const SmoothDomain*>(&ball)}) {
    const SimplexMesh m = level(*d, 1);
    const FacetComplex f = build_facets(m);
    const SparseMatrix A = assemble_a(f, 0.8);
    EXPECT_TRUE(symmetric(A));
    const CRFunction u = random_cr(f, 1), v = random_cr(f, 2);
    const double ref = a_oracle(u, v, 0.8);
    EXPECT_NEAR(u.values.dot(A * v.values), ref, 1e-11 * std::max(1.0, std::abs(ref)));
  }
}

TEST(FormB, ConstantPressureAgainstInteriorField) {
  for (const SmoothDomain* d : {static_cast<const SmoothDomain*>(&disk), static_cast<const SmoothDomain*>(&ball)}) {
    const SimplexMesh m = level(*d, 2);
    const FacetComplex f = build_facets(m);
    const SparseMatrix B = assemble_b(f);
    CRFunction v = random_cr(f, 3);
    for (int e : f.boundary_facets()) v.set(e, Point::Zero());
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(B.rows());
    EXPECT_NEAR(one.dot(B * v.values), 0.0, 1e-12);

    const CRFunction x = cr_interpolate([](const Point& p) { return p; }, f);
    EXPECT_NEAR(one.dot(B * x.values), -m.dim() * m.total_volume(), 1e-12);
  }
}

TEST(FormB, MatchesDivergenceOracle) {
  const SimplexMesh m = level(ball, 1);
  const FacetComplex f = build_facets(m);
  const SparseMatrix B = assemble_b(f);
  const CRFunction v = random_cr(f, 4);
  Eigen::VectorXd q = Eigen::VectorXd::LinSpaced(B.rows(), -1.0, 2.0);
  EXPECT_NEAR(q.dot(B * v.values), b_oracle(q, v), 1e-11);
}

TEST(FormC, HexagonPerimeter) {
  const SimplexMesh m = coarse_mesh(disk);
  const FacetComplex f = build_facets(m);
  const SparseMatrix C = assemble_c(f);
  EXPECT_TRUE(symmetric(C));
  CRFunction u(f);
  for (int e : f.boundary_facets()) u.set(e, f.facet(e).normal);
  EXPECT_NEAR(u.values.dot(C * u.values), 6.0, 1e-14);
  // Tangential boundary values are invisible to c_h.
  CRFunction t(f);
  for (int e : f.boundary_facets()) t.set(e, Point(-f.facet(e).normal[1], f.facet(e).normal[0], 0.0));
  EXPECT_NEAR(t.values.dot(C * t.values), 0.0, 1e-14);
}

TEST(FormC, EqualsMidpointRuleOfNormalTraces) {
  for (const SmoothDomain* d : {static_cast<const SmoothDomain*>(&disk), static_cast<const SmoothDomain*>(&ball)}) {
    const SimplexMesh m = level(*d, 1);
    const FacetComplex f = build_facets(m);
    const SparseMatrix C = assemble_c(f);
    EXPECT_TRUE(symmetric(C));
    const CRFunction u = random_cr(f, 12), v = random_cr(f, 13);
    const FacetFunction un = normal_trace(u), vn = normal_trace(v);
    double ref = 0.0;
    for (std::size_t b = 0; b < f.num_boundary_facets(); ++b)
      ref += f.facet(f.boundary_facets()[b]).measure * un[b] * vn[b];
    EXPECT_NEAR(u.values.dot(C * v.values), ref, 1e-12 * std::max(1.0, std::abs(ref)));
    // Interior DOFs never enter C.
    for (Eigen::Index k = 0; k < C.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(C, k); it; ++it)
        EXPECT_TRUE(f.facet(it.row() / m.dim()).is_boundary());
    EXPECT_EQ(penalty_load(f, [](const Point&) { return 0.0; }).lpNorm<Eigen::Infinity>(), 0.0);
  }
}

TEST(FormC, PenaltyLoadOfNormalTrace) {
  const SimplexMesh m = level(ball, 1);
  const FacetComplex f = build_facets(m);
  const Eigen::VectorXd g = penalty_load(f, [](const Point& x) { return 1.0 + x[0]; });
  const FacetFunction gm = boundary_mean([](const Point& x) { return 1.0 + x[0]; }, f);
  const CRFunction v = random_cr(f, 5);
  const FacetFunction vn = normal_trace(v);
  double ref = 0.0;
  for (std::size_t b = 0; b < f.num_boundary_facets(); ++b)
    ref += f.facet(f.boundary_facets()[b]).measure * gm[b] * vn[b];
  EXPECT_NEAR(g.dot(v.values), ref, 1e-12);
}

TEST(FormJ, VanishesOnConformingFields) {
  for (const SmoothDomain* d : {static_cast<const SmoothDomain*>(&disk), static_cast<const SmoothDomain*>(&ball)}) {
    const SimplexMesh m = level(*d, 1);
    const FacetComplex f = build_facets(m);
    const SparseMatrix J = assemble_j(f, 3.0);
    EXPECT_TRUE(symmetric(J));
    const CRFunction u = cr_interpolate(
        [](const Point& x) { return Point(1.0 + x[0] - x[2], x[1] * 2.0, 0.5 * x[0] - x[1]); }, f);
    Eigen::VectorXd r = J * u.values;
    EXPECT_LT(r.lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(FormJ, LinearInGammaAndMatchesOracle) {
  const SimplexMesh m = level(disk, 1);
  const FacetComplex f = build_facets(m);
  const SparseMatrix J1 = assemble_j(f, 1.0), J4 = assemble_j(f, 4.0);
  EXPECT_LT((SparseMatrix(J4 - 4.0 * J1)).norm(), 1e-12 * J4.norm());
  const CRFunction u = random_cr(f, 6), v = random_cr(f, 7);
  EXPECT_NEAR(u.values.dot(J4 * v.values), j_oracle(u, v, 4.0), 1e-11);
  EXPECT_GE(u.values.dot(J1 * u.values), 0.0);
}

TEST(FormJ, MatchesOracleIn3d) {
  const SimplexMesh m = level(ball, 1);
  const FacetComplex f = build_facets(m);
  const SparseMatrix J = assemble_j(f, 5.0);
  const CRFunction u = random_cr(f, 16), v = random_cr(f, 17);
  const double ref = j_oracle(u, v, 5.0);
  EXPECT_NEAR(u.values.dot(J * v.values), ref, 1e-10 * std::max(1.0, std::abs(ref)));
}

TEST(FormJ, TwoTriangleSingleDof) {
  // Unit square split along its diagonal; bump the DOF of one outer edge.
  const SimplexMesh m(2, {Point(0, 0, 0), Point(1, 0, 0), Point(1, 1, 0), Point(0, 1, 0)},
                      {{0, 1, 2, -1}, {0, 2, 3, -1}});
  const FacetComplex f = build_facets(m);
  const SparseMatrix J = assemble_j(f, 1.0);
  CRFunction u(f);
  for (std::size_t e = 0; e < f.num_facets(); ++e)
    if (f.facet(e).midpoint.isApprox(Point(0.5, 0, 0))) u.set(e, Point(1.0, 0.0, 0.0));
  // On the diagonal the bumped basis is 1 - 2 lambda, linear from 1 to -1,
  // the other side is zero: int_0^1 (1 - 2t)^2 |e| dt / |e| = 1/3.
  EXPECT_NEAR(u.values.dot(J * u.values), 1.0 / 3.0, 1e-14);
}

TEST(Load, MatchesHighDegreeOracle) {
  for (const SmoothDomain* d : {static_cast<const SmoothDomain*>(&disk), static_cast<const SmoothDomain*>(&ball)}) {
    const SimplexMesh m = level(*d, 1);
    const FacetComplex f = build_facets(m);
    const int n = m.dim();
    const VectorField fx = [](const Point& x) { return Point(x[0] * x[1], 1.0 - x[2] * x[2], x[0]); };
    const VectorField tx = [](const Point& x) { return Point(x[1], x[0] * x[0], -x[2]); };
    const Eigen::VectorXd load = assemble_load(f, fx, tx, 4);
    const CRFunction v = random_cr(f, 8);
    double ref = 0.0;
    const QuadratureRule& qc = simplex_rule(n, 8);
    for (std::size_t c = 0; c < m.num_cells(); ++c)
      for (std::size_t k = 0; k < qc.size(); ++k) {
        const Point x = m.map_to_cell(c, qc.points[k]);
        ref += m.volume(c) * qc.weights[k] * fx(x).head(n).dot(v.eval_local(c, qc.points[k]).head(n));
      }
    const QuadratureRule& qf = simplex_rule(n - 1, 8);
    for (int e : f.boundary_facets()) {
      const Facet& fc = f.facet(e);
      for (std::size_t k = 0; k < qf.size(); ++k) {
        Point x = Point::Zero();
        for (int i = 0; i < n; ++i) x += qf.points[k][i] * m.vertex(fc.vertices[i]);
        ref += fc.measure * qf.weights[k] *
               tx(x).head(n).dot(v.eval_local(fc.cells[0], m.barycentric(fc.cells[0], x)).head(n));
      }
    }
    EXPECT_NEAR(load.dot(v.values), ref, 1e-11);
  }
}

TEST(Load, ZeroDataAndUnitForce) {
  for (const SmoothDomain* d : {static_cast<const SmoothDomain*>(&disk), static_cast<const SmoothDomain*>(&ball)}) {
    const SimplexMesh m = level(*d, 1);
    const FacetComplex f = build_facets(m);
    const int n = m.dim();
    const VectorField zero = [](const Point&) { return Point(Point::Zero()); };
    EXPECT_EQ(assemble_load(f, zero, zero).lpNorm<Eigen::Infinity>(), 0.0);
    // int_T phi_e = |T| / (N + 1) for every CR basis function.
    const Eigen::VectorXd unit = assemble_load(f, [](const Point&) { return Point(1, 0, 0); }, zero);
    std::vector<double> want(f.num_facets(), 0.0);
    for (std::size_t c = 0; c < m.num_cells(); ++c)
      for (int i = 0; i <= n; ++i) want[f.cell_facet(c, i)] += m.volume(c) / (n + 1);
    for (std::size_t e = 0; e < f.num_facets(); ++e) {
      EXPECT_NEAR(unit[n * e], want[e], 1e-14);
      EXPECT_NEAR(unit[n * e + 1], 0.0, 1e-15);
    }
  }
}

TEST(Load, FacetNormalTraction) {
  // tau = n_h facetwise: the basis of the boundary facet itself has mean 1 on
  // it, every other basis function of the cell has mean 0.
  for (const SmoothDomain* d : {static_cast<const SmoothDomain*>(&disk), static_cast<const SmoothDomain*>(&ball)}) {
    const SimplexMesh m = level(*d, 1);
    const FacetComplex f = build_facets(m);
    const int n = m.dim();
    const VectorField tau = [&f](const Point& x) {
      Point best = Point::Zero();
      double dist = 1e300;
      for (int e : f.boundary_facets()) {
        const double dd = (x - f.facet(e).midpoint).norm();
        if (dd < dist) {
          dist = dd;
          best = f.facet(e).normal;
        }
      }
      return best;
    };
    const Eigen::VectorXd load = assemble_load(f, [](const Point&) { return Point(Point::Zero()); }, tau);
    for (std::size_t e = 0; e < f.num_facets(); ++e) {
      const Facet& fc = f.facet(e);
      const Point want = fc.is_boundary() ? Point(fc.measure * fc.normal) : Point(Point::Zero());
      for (int a = 0; a < n; ++a) EXPECT_NEAR(load[n * e + a], want[a], 1e-12);
    }
  }
}

TEST(System, ShapeSymmetryAndScaling) {
  const SimplexMesh m = level(disk, 2);
  const FacetComplex f = build_facets(m);
  const LoadData data{[](const Point& x) { return affine(x); }, [](const Point&) { return Point(1, 0, 0); },
                      [](const Point& x) { return x[0]; }};
  const SaddleSystem s1 = assemble_system(f, data, {0.5, 2.0, 1.0, 4});
  const SaddleSystem s2 = assemble_system(f, data, {0.25, 2.0, 1.0, 4});
  EXPECT_EQ(s1.velocity_size(), static_cast<Eigen::Index>(2 * f.num_facets()));
  EXPECT_EQ(s1.pressure_size(), static_cast<Eigen::Index>(m.num_cells()));
  EXPECT_TRUE(symmetric(s1.matrix()));
  const SparseMatrix dk = s2.velocity_block() - s1.velocity_block();
  EXPECT_LT((SparseMatrix(dk - 2.0 * s1.C)).norm(), 1e-12);
  const Eigen::VectorXd dr = s2.rhs() - s1.rhs();
  EXPECT_LT((dr.head(s1.velocity_size()) - 2.0 * s1.penalty).norm(), 1e-12);
  EXPECT_EQ(dr.tail(s1.pressure_size()).norm(), 0.0);
  EXPECT_EQ((SparseMatrix(s2.A - s1.A)).norm(), 0.0);
  EXPECT_EQ((SparseMatrix(s2.J - s1.J)).norm(), 0.0);
  EXPECT_EQ((SparseMatrix(s2.B - s1.B)).norm(), 0.0);
  EXPECT_EQ(s1.matrix().rows(), static_cast<Eigen::Index>(2 * f.num_facets() + m.num_cells()));
}

TEST(System, RejectsBadParameters) {
  const SimplexMesh m = coarse_mesh(disk);
  const FacetComplex f = build_facets(m);
  const LoadData data{[](const Point&) { return Point(Point::Zero()); },
                      [](const Point&) { return Point(Point::Zero()); }, [](const Point&) { return 0.0; }};
  EXPECT_THROW(assemble_system(f, data, {0.0, 1.0, 1.0, 4}), Error);
  EXPECT_THROW(assemble_system(f, data, {1.0, -1.0, 1.0, 4}), Error);
  EXPECT_THROW(assemble_system(f, data, {1.0, 1.0, 0.0, 4}), Error);
}
