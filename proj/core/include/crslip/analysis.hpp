#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crslip/cases.hpp"
#include "crslip/forms.hpp"
#include "crslip/solver.hpp"

namespace crslip {

// ---------------------------------------------------------------------------
// Norms of discrete functions
// ---------------------------------------------------------------------------

/// sum over interior facets of h_e^{-1} ||[v]||^2_{L2(e)}.
double jump_seminorm_sq(const CRFunction& v);
/// ||v||_{V_h} = (||v||^2 + sum_T ||grad v||^2_T)^{1/2}.
double vh_norm(const CRFunction& v);
/// |||v|||_{V_h}: ||v||_{V_h} augmented with the jump term.
double triple_norm(const CRFunction& v);
/// Sparse Gram matrix of ||.||_{V_h} over the CR velocity DOFs.
SparseMatrix vh_gram(const FacetComplex& facets);

// ---------------------------------------------------------------------------
// Errors against exact fields
// ---------------------------------------------------------------------------

/// ||u~ - u_h||_{L2(Omega_h)} with a cellwise rule of the given degree.
double error_l2(const VectorField& u_exact, const CRFunction& uh, int degree = 8);
/// ||p~ - q_h||_{L2(Omega_h)}.
double error_pressure(const ScalarField& p_exact, const P0Function& ph, int degree = 8);
/// (sum_T ||grad(u~ - u_h)||^2_T)^{1/2}.
double error_h1_seminorm(const MatrixField& grad_exact, const CRFunction& uh, int degree = 8);
/// |||u~ - u_h|||_{V_h}; u~ is continuous so only jumps of u_h enter.
double error_triple_norm(const VectorField& u_exact, const MatrixField& grad_exact,
                         const CRFunction& uh, int degree = 8);

struct FluxDefect {
  double global = 0.0;    ///< ||Pi_h^partial(u~.n_h - g~)||_{L2(Gamma_h)}
  double weighted = 0.0;  ///< (sum_e h_e^{-1} ||.||^2_{L2(e)})^{1/2}
};
FluxDefect flux_defect(const VectorField& u_exact, const ScalarField& g, const FacetComplex& facets);

struct ErrorRecord {
  double h = 0.0;
  std::size_t cells = 0;
  double l2_u = 0.0;        ///< ||u~ - u_h||_{L2}
  double h1_semi_u = 0.0;   ///< broken H1 seminorm of the error
  double h1_u = 0.0;        ///< ||u~ - u_h||_{V_h} (broken H1 norm)
  double triple_u = 0.0;    ///< |||u~ - u_h|||_{V_h}
  double l2_p = 0.0;        ///< ||p~ - (p_h - k_h)||_{L2}
  double l2_p_raw = 0.0;    ///< ||p~ - p_h||_{L2}
  double flux = 0.0;        ///< global flux defect of the exact solution
  double epsilon = 0.0;
  double residual = 0.0;
  double mean_pressure = 0.0;  ///< k_h
};

ErrorRecord compute_errors(const ManufacturedCase& c, const Solution& s, double epsilon);

// ---------------------------------------------------------------------------
// Convergence orders
// ---------------------------------------------------------------------------

/// EOC_i = log(e_i / e_{i+1}) / log(h_i / h_{i+1}). Throws ZeroError when
/// an error is zero and Error for fewer than two levels.
std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& h);

struct ConvergenceReport {
  std::vector<ErrorRecord> records;

  std::vector<double> column(double ErrorRecord::*field) const;
  /// Orders of a column; std::nullopt for the first level.
  std::vector<std::optional<double>> orders(double ErrorRecord::*field) const;
};

// ---------------------------------------------------------------------------
// Discrete H^{1/2} machinery on Gamma_h
// ---------------------------------------------------------------------------

/// Gram matrix G with ||mu||^2_{1/2,Lambda_h} = mu^T G mu over boundary facets.
Eigen::MatrixXd half_norm_gram(const FacetComplex& facets);
/// ||mu||_{1/2,Lambda_h}.
double discrete_h_half_norm(const FacetFunction& mu);
/// ||mu||_{-1/2,Lambda_h} = sup_lambda c_h(mu, lambda) / ||lambda||_{1/2,Lambda_h}.
/// Throws SingularGram if the Gram matrix is not positive definite.
double dual_half_norm(const FacetFunction& mu);
/// Maximiser lambda* of the dual-norm quotient (normalised to unit 1/2-norm).
Eigen::VectorXd dual_half_norm_argmax(const FacetFunction& mu);
/// ||f||_{H^{1/2}(Gamma_h)} = (||f||^2_{L2} + |f|^2_{1/2})^{1/2} for a
/// smooth scalar f evaluated on Gamma_h.
double h_half_norm(const ScalarField& f, const FacetComplex& facets);
/// Slobodeckij seminorm squared of the boundary P1 function E_h^partial(mu).
double slobodeckij_seminorm_sq(const ConformingP1Function& w, const FacetComplex& facets);

// ---------------------------------------------------------------------------
// Boundary skin and stability diagnostics
// ---------------------------------------------------------------------------

/// ||v||_{L2(Omega_h \ Omega)}: 4x uniformly subdivided cells, quadrature
/// points masked by d(x) > 0.
double skin_l2(const CRFunction& v, const SmoothDomain& domain);
/// skin_l2(v) / (h |||v|||_{V_h}).
double boundary_skin_ratio(const CRFunction& v, const SmoothDomain& domain);

/// min over `samples` random v of (a_h + j_h)(v, v) / ||v||^2_{V_h}.
double korn_ratio(const FacetComplex& facets, double nu, double gamma, int samples,
                  std::uint64_t seed);
/// sum_e h_e^{-1}||[v]||^2 / sum_T ||grad v||^2_T, max over random v.
double jump_equivalence_ratio(const FacetComplex& facets, int samples, std::uint64_t seed);
/// sup over v in V_h-ring of b_h(q, v) / (||v||_{V_h} ||q||) for a mean-zero q.
double inf_sup_ratio(const FacetComplex& facets, const P0Function& q);
/// ||v_h - E_h v_h||_{V_h} / (sum_e h_e^{-1}||[v_h]||^2)^{1/2}.
double enrich_volume_ratio(const CRFunction& v);

}  // namespace crslip
