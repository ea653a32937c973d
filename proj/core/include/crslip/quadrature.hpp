#pragma once

#include <array>
#include <vector>

namespace crslip {

/// Quadrature on the reference k-simplex (k = 1, 2, 3). Points are given in
/// barycentric coordinates (k+1 used entries) and weights are normalised so
/// they sum to 1, i.e. the integral over a simplex S is |S| * sum_q w_q f(x_q).
struct QuadratureRule {
  int dim = 0;
  int degree = 0;  ///< all polynomials up to this degree are integrated exactly
  std::vector<std::array<double, 4>> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// n-point Gauss-Legendre rule on [0, 1] (nodes and weights summing to 1).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Rule on the k-simplex exact to at least `degree`. Edges use Gauss-Legendre,
/// degree <= 4 on triangles uses the symmetric 6-point rule, everything else
/// the collapsed (Duffy) Gauss product. Results are cached; thread-safe.
const QuadratureRule& simplex_rule(int dim, int degree);

/// Rule used for facet means: 3-point Gauss on edges, 6-point on triangles.
inline const QuadratureRule& facet_rule(int mesh_dim) { return simplex_rule(mesh_dim - 1, 4); }

}  // namespace crslip
