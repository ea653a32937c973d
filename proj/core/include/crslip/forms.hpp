#pragma once

#include <Eigen/Sparse>

#include "crslip/spaces.hpp"

namespace crslip {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Data of the discrete problem, already extended off Omega / Gamma.
struct LoadData {
  VectorField f;    ///< body force f~
  VectorField tau;  ///< tangential traction tau~
  ScalarField g;    ///< normal velocity g~
};

struct FormParameters {
  double epsilon = 1.0;  ///< penalty parameter
  double gamma = 1.0;    ///< jump stabilisation
  double nu = 1.0;       ///< viscosity
  int data_degree = 4;   ///< quadrature degree for load integrals
};

/// [A + J + C/eps, B^T; B, 0] [U; P] = [F + G/eps; 0] with its blocks kept
/// separately so each form can be inspected.
struct SaddleSystem {
  const FacetComplex* facets = nullptr;
  FormParameters params;
  SparseMatrix A;  ///< a_h
  SparseMatrix J;  ///< j_h
  SparseMatrix C;  ///< reduced-integration penalty Gram c_h(u.n_h, v.n_h)
  SparseMatrix B;  ///< b_h, rows = cells
  Eigen::VectorXd load;     ///< (f~, v)_{Omega_h} + (tau~, v)_{Gamma_h}
  Eigen::VectorXd penalty;  ///< c_h(g~, v.n_h)

  Eigen::Index velocity_size() const { return A.rows(); }
  Eigen::Index pressure_size() const { return B.rows(); }
  Eigen::Index size() const { return velocity_size() + pressure_size(); }

  /// A + J + C / eps.
  SparseMatrix velocity_block() const;
  SparseMatrix matrix() const;
  Eigen::VectorXd rhs() const;
};

SparseMatrix assemble_a(const FacetComplex& facets, double nu);
SparseMatrix assemble_b(const FacetComplex& facets);
SparseMatrix assemble_c(const FacetComplex& facets);
Eigen::VectorXd penalty_load(const FacetComplex& facets, const ScalarField& g);
SparseMatrix assemble_j(const FacetComplex& facets, double gamma);
Eigen::VectorXd assemble_load(const FacetComplex& facets, const VectorField& f,
                              const VectorField& tau, int degree = 4);
/// Throws Error for non-positive eps, gamma or nu.
SaddleSystem assemble_system(const FacetComplex& facets, const LoadData& data,
                             const FormParameters& params);

}  // namespace crslip
