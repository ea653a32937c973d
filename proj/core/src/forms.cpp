#include "crslip/forms.hpp"

#include <algorithm>

#include "crslip/errors.hpp"
#include "crslip/quadrature.hpp"

namespace crslip {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(Eigen::Index rows, Eigen::Index cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

Point facet_point(const SimplexMesh& mesh, const Facet& f, const std::array<double, 4>& lambda) {
  Point x = Point::Zero();
  for (int k = 0; k < mesh.dim(); ++k) x += lambda[k] * mesh.vertex(f.vertices[k]);
  return x;
}

}  // namespace

SparseMatrix SaddleSystem::velocity_block() const {
  SparseMatrix K = A + J;
  K += (1.0 / params.epsilon) * C;
  return K;
}

SparseMatrix SaddleSystem::matrix() const {
  const Eigen::Index nu = velocity_size(), np = pressure_size();
  const SparseMatrix K = velocity_block();
  Triplets t;
  t.reserve(K.nonZeros() + 2 * B.nonZeros());
  for (Eigen::Index k = 0; k < K.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(K, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (Eigen::Index k = 0; k < B.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(B, k); it; ++it) {
      t.emplace_back(nu + it.row(), it.col(), it.value());
      t.emplace_back(it.col(), nu + it.row(), it.value());
    }
  return from_triplets(nu + np, nu + np, t);
}

Eigen::VectorXd SaddleSystem::rhs() const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(size());
  r.head(velocity_size()) = load + (1.0 / params.epsilon) * penalty;
  return r;
}

SparseMatrix assemble_a(const FacetComplex& facets, double nu) {
  const SimplexMesh& mesh = facets.mesh();
  const int n = mesh.dim();
  const Eigen::Index size = n * static_cast<Eigen::Index>(facets.num_facets());
  // Exact CR mass: int_T phi_i phi_j = |T| (1 - 2N/(N+1) + N^2 (1 + d_ij)/((N+1)(N+2))).
  const double base = 1.0 - 2.0 * n / (n + 1.0);
  const double pair = n * n / ((n + 1.0) * (n + 2.0));
  Triplets t;
  t.reserve(mesh.num_cells() * (n + 1) * (n + 1) * n * n);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const double vol = mesh.volume(c);
    const auto& g = mesh.barycentric_gradients(c);
    std::array<Point, 4> grad;
    for (int i = 0; i <= n; ++i) grad[i] = -n * g[i];
    for (int i = 0; i <= n; ++i) {
      const int ei = facets.cell_facet(c, i);
      for (int j = 0; j <= n; ++j) {
        const int ej = facets.cell_facet(c, j);
        const double mass = vol * (base + pair * (i == j ? 2.0 : 1.0));
        const double gg = grad[i].dot(grad[j]);
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) {
            // (nu/2)(E(phi_i e_a), E(phi_j e_b)) = nu |T| (d_ab gi.gj + gi_b gj_a)
            double v = nu * vol * grad[i][b] * grad[j][a];
            if (a == b) v += mass + nu * vol * gg;
            t.emplace_back(n * ei + a, n * ej + b, v);
          }
        }
      }
    }
  }
  return from_triplets(size, size, t);
}

SparseMatrix assemble_b(const FacetComplex& facets) {
  const SimplexMesh& mesh = facets.mesh();
  const int n = mesh.dim();
  Triplets t;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& g = mesh.barycentric_gradients(c);
    for (int i = 0; i <= n; ++i) {
      const int e = facets.cell_facet(c, i);
      // -|T| div(phi_i e_a) = -|T| (-N d_a lambda_i)
      for (int a = 0; a < n; ++a) t.emplace_back(c, n * e + a, n * mesh.volume(c) * g[i][a]);
    }
  }
  return from_triplets(static_cast<Eigen::Index>(mesh.num_cells()),
                       n * static_cast<Eigen::Index>(facets.num_facets()), t);
}

SparseMatrix assemble_c(const FacetComplex& facets) {
  const int n = facets.dim();
  const Eigen::Index size = n * static_cast<Eigen::Index>(facets.num_facets());
  Triplets t;
  for (int e : facets.boundary_facets()) {
    const Facet& f = facets.facet(e);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) t.emplace_back(n * e + a, n * e + b, f.measure * f.normal[a] * f.normal[b]);
  }
  return from_triplets(size, size, t);
}

Eigen::VectorXd penalty_load(const FacetComplex& facets, const ScalarField& g) {
  const int n = facets.dim();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n * static_cast<Eigen::Index>(facets.num_facets()));
  const FacetFunction gm = boundary_mean(g, facets);
  for (std::size_t b = 0; b < facets.num_boundary_facets(); ++b) {
    const int e = facets.boundary_facets()[b];
    const Facet& f = facets.facet(e);
    for (int a = 0; a < n; ++a) r[n * e + a] = f.measure * gm[b] * f.normal[a];
  }
  return r;
}

SparseMatrix assemble_j(const FacetComplex& facets, double gamma) {
  const SimplexMesh& mesh = facets.mesh();
  const int n = mesh.dim();
  const Eigen::Index size = n * static_cast<Eigen::Index>(facets.num_facets());
  const QuadratureRule& q = facet_rule(n);
  Triplets t;
  std::vector<int> dofs;
  std::vector<std::vector<double>> jump;  // jump[local dof][quadrature point]
  for (std::size_t e = 0; e < facets.num_facets(); ++e) {
    const Facet& f = facets.facet(e);
    if (f.is_boundary()) continue;
    dofs.clear();
    jump.clear();
    for (int side = 0; side < 2; ++side) {
      const int c = f.cells[side];
      const double sign = side == 1 ? 1.0 : -1.0;
      for (int i = 0; i <= n; ++i) {
        const int dof = facets.cell_facet(c, i);
        auto it = std::find(dofs.begin(), dofs.end(), dof);
        std::size_t slot = it - dofs.begin();
        if (it == dofs.end()) {
          dofs.push_back(dof);
          jump.emplace_back(q.size(), 0.0);
        }
        for (std::size_t k = 0; k < q.size(); ++k) {
          const auto lam = mesh.barycentric(c, facet_point(mesh, f, q.points[k]));
          jump[slot][k] += sign * cr_basis(n, lam, i);
        }
      }
    }
    const double scale = gamma / f.diameter * f.measure;
    for (std::size_t k = 0; k < dofs.size(); ++k) {
      for (std::size_t l = 0; l < dofs.size(); ++l) {
        double v = 0.0;
        for (std::size_t p = 0; p < q.size(); ++p) v += q.weights[p] * jump[k][p] * jump[l][p];
        v *= scale;
        if (v == 0.0) continue;
        for (int a = 0; a < n; ++a) t.emplace_back(n * dofs[k] + a, n * dofs[l] + a, v);
      }
    }
  }
  return from_triplets(size, size, t);
}

Eigen::VectorXd assemble_load(const FacetComplex& facets, const VectorField& f,
                              const VectorField& tau, int degree) {
  const SimplexMesh& mesh = facets.mesh();
  const int n = mesh.dim();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n * static_cast<Eigen::Index>(facets.num_facets()));
  const QuadratureRule& qc = simplex_rule(n, degree);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const double vol = mesh.volume(c);
    for (std::size_t k = 0; k < qc.size(); ++k) {
      const Point fx = f(mesh.map_to_cell(c, qc.points[k]));
      for (int i = 0; i <= n; ++i) {
        const int e = facets.cell_facet(c, i);
        const double w = vol * qc.weights[k] * cr_basis(n, qc.points[k], i);
        for (int a = 0; a < n; ++a) r[n * e + a] += w * fx[a];
      }
    }
  }
  const QuadratureRule& qf = simplex_rule(n - 1, degree);
  for (int e : facets.boundary_facets()) {
    const Facet& fct = facets.facet(e);
    const int c = fct.cells[0];
    for (std::size_t k = 0; k < qf.size(); ++k) {
      const Point x = facet_point(mesh, fct, qf.points[k]);
      const Point tx = tau(x);
      const auto lam = mesh.barycentric(c, x);
      for (int i = 0; i <= n; ++i) {
        const int ei = facets.cell_facet(c, i);
        const double w = fct.measure * qf.weights[k] * cr_basis(n, lam, i);
        for (int a = 0; a < n; ++a) r[n * ei + a] += w * tx[a];
      }
    }
  }
  return r;
}

SaddleSystem assemble_system(const FacetComplex& facets, const LoadData& data,
                             const FormParameters& params) {
  if (!(params.epsilon > 0.0)) throw Error("penalty parameter epsilon must be positive");
  if (!(params.gamma > 0.0)) throw Error("stabilisation parameter gamma must be positive");
  if (!(params.nu > 0.0)) throw Error("viscosity nu must be positive");
  SaddleSystem s;
  s.facets = &facets;
  s.params = params;
  s.A = assemble_a(facets, params.nu);
  s.J = assemble_j(facets, params.gamma);
  s.C = assemble_c(facets);
  s.B = assemble_b(facets);
  s.load = assemble_load(facets, data.f, data.tau, params.data_degree);
  s.penalty = penalty_load(facets, data.g);
  return s;
}

}  // namespace crslip
