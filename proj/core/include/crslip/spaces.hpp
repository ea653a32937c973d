#pragma once

#include <functional>
#include <span>

#include <Eigen/Core>

#include "crslip/mesh.hpp"

namespace crslip {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;
/// Integrand evaluated at a point x of the given boundary facet.
using FacetIntegrand = std::function<double(const Point&, const Facet&)>;

/// Nonconforming P1 (Crouzeix-Raviart) vector field. One N-vector per facet,
/// stored at values[N*e + a] for component a of facet e.
struct CRFunction {
  const FacetComplex* facets = nullptr;
  Eigen::VectorXd values;

  CRFunction() = default;
  explicit CRFunction(const FacetComplex& fc);

  int dim() const { return facets->dim(); }
  /// Value at the midpoint m_e.
  Point at(std::size_t e) const;
  void set(std::size_t e, const Point& v);
  /// Value of u|_T at barycentric coordinates `lambda` of cell c.
  Point eval_local(std::size_t c, std::span<const double> lambda) const;
  /// Row a holds grad(u_a) on cell c (unused rows/cols zero in 2D).
  Eigen::Matrix3d gradient(std::size_t c) const;
};

/// Piecewise constant scalar (pressure space Q_h).
struct P0Function {
  const SimplexMesh* mesh = nullptr;
  Eigen::VectorXd values;
};

/// Piecewise constant on boundary facets (Lambda_h). Entry b*components + k
/// belongs to boundary facet boundary_facets()[b].
struct FacetFunction {
  const FacetComplex* facets = nullptr;
  int components = 1;
  Eigen::VectorXd values;

  double operator[](std::size_t b) const { return values[b * components]; }
};

/// Continuous P1 field with one value (or vector) per mesh vertex. The
/// boundary variant (Lambda-bar_h) only carries meaningful values on
/// boundary vertices.
struct ConformingP1Function {
  const SimplexMesh* mesh = nullptr;
  int components = 1;
  bool boundary_only = false;
  Eigen::VectorXd values;  ///< values[v*components + k]

  double value(std::size_t v, int k = 0) const { return values[v * components + k]; }
};

/// CR basis function of the facet opposite local vertex i: 1 - N lambda_i.
inline double cr_basis(int dim, std::span<const double> lambda, int i) {
  return 1.0 - dim * lambda[i];
}

/// Pi_h: facet means of v on every facet.
CRFunction cr_interpolate(const VectorField& v, const FacetComplex& facets);
/// Pi_h^partial: boundary-facet means of a scalar integrand.
FacetFunction boundary_mean(const FacetIntegrand& v, const FacetComplex& facets);
FacetFunction boundary_mean(const ScalarField& v, const FacetComplex& facets);
/// (u_h . n_h)(m_e) on each boundary facet, equal to Pi_h^partial(u_h . n_h).
FacetFunction normal_trace(const CRFunction& u);
/// R_h: cell means.
P0Function p0_project(const ScalarField& p, const SimplexMesh& mesh, int degree = 4);
/// Evaluates u at x in cell c; throws PointOutsideCell if x is not in c.
Point cr_eval(const CRFunction& u, std::size_t c, const Point& x);

/// E_h^partial: vertex value = mean of mu over the boundary facets at the vertex.
ConformingP1Function enrich_boundary(const FacetFunction& mu);
/// E_h: vertex value = mean over cells at the vertex of the cell traces.
ConformingP1Function enrich_volume(const CRFunction& v);
/// Evaluates a conforming P1 field at barycentric coordinates of cell c.
Eigen::Vector3d p1_eval_local(const ConformingP1Function& f, std::size_t c,
                              std::span<const double> lambda);

/// Discrete harmonic extension: conforming P1 solution of the Laplace problem
/// on Omega_h with Dirichlet data taken from the boundary vertices of `data`.
/// Throws SolveFailure when the factorisation fails.
ConformingP1Function harmonic_extension(const ConformingP1Function& data,
                                        const FacetComplex& facets);

/// Discrete lifting of mu: boundary DOFs mu(m_e) n_h, interior DOFs
/// Pi_h of the harmonic extension of E_h^partial(mu n_h).
CRFunction discrete_lift(const FacetFunction& mu);

}  // namespace crslip
