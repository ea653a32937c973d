#include "crslip/spaces.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "crslip/errors.hpp"
#include "crslip/quadrature.hpp"

namespace crslip {

namespace {

Point facet_point(const SimplexMesh& mesh, const Facet& f, const std::array<double, 4>& lambda) {
  Point x = Point::Zero();
  for (int k = 0; k < mesh.dim(); ++k) x += lambda[k] * mesh.vertex(f.vertices[k]);
  return x;
}

}  // namespace

CRFunction::CRFunction(const FacetComplex& fc)
    : facets(&fc), values(Eigen::VectorXd::Zero(fc.num_facets() * fc.dim())) {}

Point CRFunction::at(std::size_t e) const {
  const int n = dim();
  Point v = Point::Zero();
  for (int a = 0; a < n; ++a) v[a] = values[n * e + a];
  return v;
}

void CRFunction::set(std::size_t e, const Point& v) {
  const int n = dim();
  for (int a = 0; a < n; ++a) values[n * e + a] = v[a];
}

Point CRFunction::eval_local(std::size_t c, std::span<const double> lambda) const {
  const int n = dim();
  Point v = Point::Zero();
  for (int i = 0; i <= n; ++i) v += cr_basis(n, lambda, i) * at(facets->cell_facet(c, i));
  return v;
}

Eigen::Matrix3d CRFunction::gradient(std::size_t c) const {
  const int n = dim();
  const auto& g = facets->mesh().barycentric_gradients(c);
  Eigen::Matrix3d G = Eigen::Matrix3d::Zero();
  for (int i = 0; i <= n; ++i) G -= n * at(facets->cell_facet(c, i)) * g[i].transpose();
  return G;
}

CRFunction cr_interpolate(const VectorField& v, const FacetComplex& facets) {
  const SimplexMesh& mesh = facets.mesh();
  const QuadratureRule& q = facet_rule(mesh.dim());
  CRFunction u(facets);
  for (std::size_t e = 0; e < facets.num_facets(); ++e) {
    const Facet& f = facets.facet(e);
    Point mean = Point::Zero();
    for (std::size_t k = 0; k < q.size(); ++k) mean += q.weights[k] * v(facet_point(mesh, f, q.points[k]));
    u.set(e, mean);
  }
  return u;
}

FacetFunction boundary_mean(const FacetIntegrand& v, const FacetComplex& facets) {
  const SimplexMesh& mesh = facets.mesh();
  const QuadratureRule& q = facet_rule(mesh.dim());
  FacetFunction mu{&facets, 1, Eigen::VectorXd::Zero(facets.num_boundary_facets())};
  for (std::size_t b = 0; b < facets.num_boundary_facets(); ++b) {
    const Facet& f = facets.facet(facets.boundary_facets()[b]);
    double mean = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) mean += q.weights[k] * v(facet_point(mesh, f, q.points[k]), f);
    mu.values[b] = mean;
  }
  return mu;
}

FacetFunction boundary_mean(const ScalarField& v, const FacetComplex& facets) {
  return boundary_mean([&v](const Point& x, const Facet&) { return v(x); }, facets);
}

FacetFunction normal_trace(const CRFunction& u) {
  const FacetComplex& facets = *u.facets;
  FacetFunction mu{&facets, 1, Eigen::VectorXd::Zero(facets.num_boundary_facets())};
  for (std::size_t b = 0; b < facets.num_boundary_facets(); ++b) {
    const int e = facets.boundary_facets()[b];
    mu.values[b] = u.at(e).dot(facets.facet(e).normal);
  }
  return mu;
}

P0Function p0_project(const ScalarField& p, const SimplexMesh& mesh, int degree) {
  const QuadratureRule& q = simplex_rule(mesh.dim(), degree);
  P0Function out{&mesh, Eigen::VectorXd::Zero(mesh.num_cells())};
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    double mean = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) mean += q.weights[k] * p(mesh.map_to_cell(c, q.points[k]));
    out.values[c] = mean;
  }
  return out;
}

Point cr_eval(const CRFunction& u, std::size_t c, const Point& x) {
  const SimplexMesh& mesh = u.facets->mesh();
  const auto lam = mesh.barycentric(c, x);
  for (int i = 0; i <= mesh.dim(); ++i) {
    if (lam[i] < -1e-12) throw PointOutsideCell("point is outside cell " + std::to_string(c));
  }
  return u.eval_local(c, lam);
}

ConformingP1Function enrich_boundary(const FacetFunction& mu) {
  const FacetComplex& facets = *mu.facets;
  const SimplexMesh& mesh = facets.mesh();
  const int nc = mu.components;
  ConformingP1Function out{&mesh, nc, true, Eigen::VectorXd::Zero(mesh.num_vertices() * nc)};
  for (int v : facets.boundary_vertices()) {
    const auto at_v = facets.boundary_facets_at(v);
    for (int k = 0; k < nc; ++k) {
      double s = 0.0;
      for (int e : at_v) s += mu.values[facets.facet(e).boundary_index * nc + k];
      out.values[v * nc + k] = s / static_cast<double>(at_v.size());
    }
  }
  return out;
}

ConformingP1Function enrich_volume(const CRFunction& v) {
  const FacetComplex& facets = *v.facets;
  const SimplexMesh& mesh = facets.mesh();
  const int n = mesh.dim();
  ConformingP1Function out{&mesh, n, false, Eigen::VectorXd::Zero(mesh.num_vertices() * n)};
  std::vector<int> count(mesh.num_vertices(), 0);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    Point sum = Point::Zero();
    for (int i = 0; i <= n; ++i) sum += v.at(facets.cell_facet(c, i));
    for (int i = 0; i <= n; ++i) {
      // v|_T at vertex i: every basis equals 1 except the one opposite i (1 - N).
      const Point val = sum - n * v.at(facets.cell_facet(c, i));
      const int p = mesh.cell(c)[i];
      for (int a = 0; a < n; ++a) out.values[p * n + a] += val[a];
      ++count[p];
    }
  }
  for (std::size_t p = 0; p < mesh.num_vertices(); ++p)
    for (int a = 0; a < n; ++a) out.values[p * n + a] /= count[p];
  return out;
}

Eigen::Vector3d p1_eval_local(const ConformingP1Function& f, std::size_t c,
                              std::span<const double> lambda) {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  const SimplexMesh& mesh = *f.mesh;
  for (int i = 0; i <= mesh.dim(); ++i) {
    const int p = mesh.cell(c)[i];
    for (int k = 0; k < f.components && k < 3; ++k) v[k] += lambda[i] * f.value(p, k);
  }
  return v;
}

ConformingP1Function harmonic_extension(const ConformingP1Function& data,
                                        const FacetComplex& facets) {
  const SimplexMesh& mesh = facets.mesh();
  const int n = mesh.dim();
  const std::size_t nv = mesh.num_vertices();
  const int nc = data.components;

  // Interior vertices are numbered consecutively; boundary ones get -1.
  std::vector<int> interior(nv, -1);
  int ni = 0;
  for (std::size_t v = 0; v < nv; ++v)
    if (!facets.is_boundary_vertex(v)) interior[v] = ni++;

  ConformingP1Function out{&mesh, nc, false, Eigen::VectorXd::Zero(nv * nc)};
  for (int v : facets.boundary_vertices())
    for (int k = 0; k < nc; ++k) out.values[v * nc + k] = data.value(v, k);
  if (ni == 0) return out;

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(ni, nc);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& g = mesh.barycentric_gradients(c);
    const Cell& cell = mesh.cell(c);
    for (int i = 0; i <= n; ++i) {
      const int row = interior[cell[i]];
      if (row < 0) continue;
      for (int j = 0; j <= n; ++j) {
        const double kij = mesh.volume(c) * g[i].dot(g[j]);
        const int col = interior[cell[j]];
        if (col >= 0) {
          trips.emplace_back(row, col, kij);
        } else {
          for (int k = 0; k < nc; ++k) rhs(row, k) -= kij * data.value(cell[j], k);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> K(ni, ni);
  K.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw SolveFailure("Laplace factorisation failed");
  const Eigen::MatrixXd sol = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success) throw SolveFailure("Laplace solve failed");
  for (std::size_t v = 0; v < nv; ++v)
    if (interior[v] >= 0)
      for (int k = 0; k < nc; ++k) out.values[v * nc + k] = sol(interior[v], k);
  return out;
}

CRFunction discrete_lift(const FacetFunction& mu) {
  const FacetComplex& facets = *mu.facets;
  const SimplexMesh& mesh = facets.mesh();
  const int n = mesh.dim();
  const std::size_t nb = facets.num_boundary_facets();

  FacetFunction mun{&facets, n, Eigen::VectorXd::Zero(nb * n)};
  for (std::size_t b = 0; b < nb; ++b) {
    const Point& nh = facets.facet(facets.boundary_facets()[b]).normal;
    for (int a = 0; a < n; ++a) mun.values[b * n + a] = mu[b] * nh[a];
  }
  const ConformingP1Function ext = harmonic_extension(enrich_boundary(mun), facets);

  CRFunction v(facets);
  for (std::size_t e = 0; e < facets.num_facets(); ++e) {
    const Facet& f = facets.facet(e);
    if (f.is_boundary()) {
      v.set(e, mu[f.boundary_index] * f.normal);
    } else {
      // Facet mean of an affine field is the mean of its vertex values.
      Point mean = Point::Zero();
      for (int k = 0; k < n; ++k)
        for (int a = 0; a < n; ++a) mean[a] += ext.value(f.vertices[k], a) / n;
      v.set(e, mean);
    }
  }
  return v;
}

}  // namespace crslip
