#pragma once

#include <string>

#include "crslip/forms.hpp"

namespace crslip {

struct Solution {
  CRFunction u;           ///< u_h
  P0Function p;           ///< p_h
  double mean_pressure;   ///< k_h = (p_h, 1) / |Omega_h|
  P0Function p_centered;  ///< p_h - k_h
  FacetFunction multiplier;  ///< lambda_h
  double residual = 0.0;  ///< ||M x - rhs||_inf / max(1, ||rhs||_inf)
};

enum class SolverKind {
  automatic,             ///< lu in 2D, augmented_lagrangian in 3D
  lu,                    ///< sparse LU of the full saddle matrix (UMFPACK)
  augmented_lagrangian,  ///< Uzawa on K + r B^T M_p^{-1} B, sparse Cholesky (CHOLMOD)
};

SolverKind parse_solver_kind(const std::string& name);
std::string to_string(SolverKind kind);

struct SolverOptions {
  SolverKind kind = SolverKind::automatic;
  double augmentation = 1e4;  ///< r
  int max_uzawa = 50;
  double tolerance = 1e-10;   ///< residual contract
};

/// Solves the saddle-point system. Throws FactorizationFailure,
/// SingularSystem, or SolveFailure when the relative residual
/// ||M x - rhs||_inf / max(1, ||rhs||_inf) exceeds options.tolerance.
Solution solve(const SaddleSystem& system, const ScalarField& g, const SolverOptions& options = {});

/// ||M x - rhs||_inf / max(1, ||rhs||_inf) computed blockwise.
double relative_residual(const SaddleSystem& system, const Eigen::VectorXd& u, const Eigen::VectorXd& p);

/// lambda_h = (u_h(m_e).n_h - Pi_h^partial g~) / eps on each boundary facet.
FacetFunction multiplier(const CRFunction& u, const ScalarField& g, double epsilon);

}  // namespace crslip
