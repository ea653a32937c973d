#include "crslip/solver.hpp"

#include <Eigen/CholmodSupport>
#include <Eigen/UmfPackSupport>

#include "crslip/errors.hpp"

namespace crslip {

namespace {

struct Residual {
  Eigen::VectorXd u, p;
  double relative = 0.0;
};

Residual residual(const SaddleSystem& s, const Eigen::VectorXd& u, const Eigen::VectorXd& p) {
  const Eigen::VectorXd f = s.load + (1.0 / s.params.epsilon) * s.penalty;
  Residual r;
  r.u = f - (s.A * u + s.J * u + (1.0 / s.params.epsilon) * (s.C * u) + s.B.transpose() * p);
  r.p = -(s.B * u);
  const double scale = std::max(1.0, f.lpNorm<Eigen::Infinity>());
  r.relative = std::max(r.u.lpNorm<Eigen::Infinity>(), r.p.lpNorm<Eigen::Infinity>()) / scale;
  return r;
}

void solve_lu(const SaddleSystem& system, Eigen::VectorXd& u, Eigen::VectorXd& p) {
  const SparseMatrix M = system.matrix();
  Eigen::UmfPackLU<SparseMatrix> lu;
  lu.analyzePattern(M);
  if (lu.info() != Eigen::Success) throw FactorizationFailure("symbolic factorisation failed");
  lu.factorize(M);
  if (lu.info() != Eigen::Success) {
    const int code = lu.umfpackFactorizeReturncode();
    if (code == UMFPACK_WARNING_singular_matrix) {
      throw SingularSystem("saddle-point matrix is numerically singular");
    }
    throw FactorizationFailure("numeric factorisation failed (UMFPACK status " + std::to_string(code) + ")");
  }
  const Eigen::Index nu = system.velocity_size();
  Eigen::VectorXd x = lu.solve(system.rhs());
  if (lu.info() != Eigen::Success) throw SolveFailure("triangular solves failed");
  // One step of iterative refinement.
  Residual r = residual(system, x.head(nu), x.tail(system.pressure_size()));
  Eigen::VectorXd rr(system.size());
  rr << r.u, r.p;
  x += lu.solve(rr);
  u = x.head(nu);
  p = x.tail(system.pressure_size());
}

void solve_augmented(const SaddleSystem& system, const SolverOptions& opt, Eigen::VectorXd& u,
                     Eigen::VectorXd& p) {
  const SimplexMesh& mesh = system.facets->mesh();
  const double r = opt.augmentation;
  Eigen::VectorXd inv_mass(static_cast<Eigen::Index>(mesh.num_cells()));
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) inv_mass[c] = 1.0 / mesh.volume(c);

  Eigen::CholmodSupernodalLLT<SparseMatrix> chol;
  {
    SparseMatrix K = system.velocity_block();
    K += r * (SparseMatrix(system.B.transpose()) * inv_mass.asDiagonal() * system.B);
    chol.compute(K);
  }
  if (chol.info() == Eigen::NumericalIssue) {
    throw SingularSystem("augmented velocity block is not positive definite");
  }
  if (chol.info() != Eigen::Success) {
    throw FactorizationFailure("Cholesky factorisation of the augmented velocity block failed");
  }

  // Solves K du + B^T dp = ru, B du = rp; K + r B^T M^{-1} B is SPD so each
  // Uzawa step is a single pair of triangular solves.
  auto correction = [&](const Eigen::VectorXd& ru, const Eigen::VectorXd& rp, Eigen::VectorXd& du,
                        Eigen::VectorXd& dp) {
    const Eigen::VectorXd shifted = ru + r * (system.B.transpose() * inv_mass.cwiseProduct(rp));
    dp = Eigen::VectorXd::Zero(rp.size());
    const double scale = std::max(1.0, ru.lpNorm<Eigen::Infinity>());
    for (int it = 0; it < opt.max_uzawa; ++it) {
      du = chol.solve(shifted - system.B.transpose() * dp);
      const Eigen::VectorXd defect = system.B * du - rp;
      dp += r * inv_mass.cwiseProduct(defect);
      if (defect.lpNorm<Eigen::Infinity>() <= 1e-3 * opt.tolerance * scale) return;
    }
  };

  u = Eigen::VectorXd::Zero(system.velocity_size());
  p = Eigen::VectorXd::Zero(system.pressure_size());
  Eigen::VectorXd du, dp;
  for (int pass = 0; pass < 4; ++pass) {
    const Residual res = residual(system, u, p);
    if (pass > 0 && res.relative <= 1e-2 * opt.tolerance) break;
    correction(res.u, res.p, du, dp);
    u += du;
    p += dp;
  }
}

}  // namespace

SolverKind parse_solver_kind(const std::string& name) {
  if (name == "auto" || name == "automatic") return SolverKind::automatic;
  if (name == "lu") return SolverKind::lu;
  if (name == "augmented" || name == "augmented-lagrangian") return SolverKind::augmented_lagrangian;
  throw ConfigError("unknown solver '" + name + "' (expected auto, lu or augmented)");
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::lu: return "lu";
    case SolverKind::augmented_lagrangian: return "augmented";
    default: return "auto";
  }
}

FacetFunction multiplier(const CRFunction& u, const ScalarField& g, double epsilon) {
  FacetFunction lambda = normal_trace(u);
  const FacetFunction gm = boundary_mean(g, *u.facets);
  lambda.values = (lambda.values - gm.values) / epsilon;
  return lambda;
}

double relative_residual(const SaddleSystem& system, const Eigen::VectorXd& u, const Eigen::VectorXd& p) {
  return residual(system, u, p).relative;
}

Solution solve(const SaddleSystem& system, const ScalarField& g, const SolverOptions& options) {
  const FacetComplex& facets = *system.facets;
  const SimplexMesh& mesh = facets.mesh();
  SolverKind kind = options.kind;
  if (kind == SolverKind::automatic)
    kind = mesh.dim() == 2 ? SolverKind::lu : SolverKind::augmented_lagrangian;

  Eigen::VectorXd u, p;
  if (kind == SolverKind::lu)
    solve_lu(system, u, p);
  else
    solve_augmented(system, options, u, p);

  const double res = residual(system, u, p).relative;
  if (!(res <= options.tolerance)) {
    throw SolveFailure("relative residual " + std::to_string(res) + " exceeds " +
                       std::to_string(options.tolerance));
  }

  Solution s;
  s.u = CRFunction(facets);
  s.u.values = std::move(u);
  s.p = P0Function{&mesh, std::move(p)};
  double integral = 0.0, volume = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    integral += mesh.volume(c) * s.p.values[c];
    volume += mesh.volume(c);
  }
  s.mean_pressure = integral / volume;
  s.p_centered = P0Function{&mesh, s.p.values.array() - s.mean_pressure};
  s.multiplier = multiplier(s.u, g, system.params.epsilon);
  s.residual = res;
  return s;
}

}  // namespace crslip
