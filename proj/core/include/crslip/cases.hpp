#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include <Eigen/Core>

#include "crslip/forms.hpp"
#include "crslip/geometry.hpp"

namespace crslip {

using MatrixField = std::function<Eigen::Matrix3d(const Point&)>;

/// Exact solution defined on all of R^N (polynomials), so the fields double
/// as their own extensions u~, p~.
struct AnalyticSolution {
  int dim = 2;
  double nu = 1.0;
  VectorField u;
  MatrixField grad_u;       ///< (grad u)_{ak} = d_k u_a
  VectorField laplacian_u;
  ScalarField p;
  VectorField grad_p;

  /// sigma(u, p) = -p I + nu (grad u + grad u^T)
  Eigen::Matrix3d stress(const Point& x) const;
};

/// f = u - nu Lap u + grad p, g = u.n and tau = (I - n n^T) sigma n, with
/// n = x/|x| extended radially off the boundary.
struct ProblemData {
  double nu = 1.0;
  VectorField f;
  ScalarField g;
  VectorField tau;

  LoadData load() const { return LoadData{f, tau, g}; }
};

enum class PressureVariant {
  printed,    ///< p = 10xyz(z+y+z), taken literally
  symmetric,  ///< p = 10xyz(x+y+z)
};

PressureVariant parse_pressure_variant(const std::string& name);

struct ManufacturedCase {
  std::string name;
  std::shared_ptr<const SmoothDomain> domain;
  AnalyticSolution solution;
  ProblemData data;
};

/// Unit disk, u = (-y r^2, x r^2), p = 8xy.
ManufacturedCase case_disk2d(double nu = 1.0);
/// Unit ball, u = 10 (x^2yz(y-z), xy^2z(z-x), xyz^2(x-y)).
ManufacturedCase case_ball3d(PressureVariant variant = PressureVariant::printed, double nu = 1.0);
ManufacturedCase make_case(DomainKind kind, PressureVariant variant = PressureVariant::printed,
                           double nu = 1.0);

struct OracleReport {
  int points = 0;
  double max_divergence = 0.0;      ///< |div u| from the analytic gradient
  double max_gradient_defect = 0.0; ///< analytic grad u vs finite differences
  double max_force_defect = 0.0;    ///< f vs u - nu Lap u + grad p by finite differences
  double max_normal_defect = 0.0;   ///< |g - u.n| on Gamma
  double max_tangency = 0.0;        ///< |tau.n| on Gamma
  double flux_integral = 0.0;       ///< int_Gamma g ds
};

/// Evaluates every data invariant at `n_points` random interior and boundary
/// points. Throws OracleMismatch naming the field and point at the first
/// violation.
OracleReport oracle_check(const ManufacturedCase& c, int n_points = 1000,
                          std::uint64_t seed = 20240531);

/// Divergence-free field on the unit disk with non-zero normal flux, used to
/// probe the flux defect Pi_h^partial(u~.n_h - g~). g~ = g o pi.
struct FluxProbe {
  VectorField u;
  ScalarField g;
};
FluxProbe flux_probe_disk2d();

}  // namespace crslip
