#include "crslip/analysis.hpp"

#include <cmath>
#include <random>

#include <Eigen/SparseCholesky>

#include "crslip/errors.hpp"
#include "crslip/quadrature.hpp"

namespace crslip {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;
using Bary = std::array<double, 4>;

Point facet_point(const SimplexMesh& mesh, const Facet& f, const Bary& lambda) {
  Point x = Point::Zero();
  for (int k = 0; k < mesh.dim(); ++k) x += lambda[k] * mesh.vertex(f.vertices[k]);
  return x;
}

// h_e^{-1} ||[v]||^2_{L2(e)} on interior facet e.
double facet_jump_sq(const CRFunction& v, const Facet& f) {
  const SimplexMesh& mesh = v.facets->mesh();
  const QuadratureRule& q = facet_rule(mesh.dim());
  double s = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const Point x = facet_point(mesh, f, q.points[k]);
    const auto l0 = mesh.barycentric(f.cells[0], x);
    const auto l1 = mesh.barycentric(f.cells[1], x);
    const Point jump = v.eval_local(f.cells[1], l1) - v.eval_local(f.cells[0], l0);
    s += q.weights[k] * jump.squaredNorm();
  }
  return s * f.measure / f.diameter;
}

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

double quadratic(const SparseMatrix& M, const Eigen::VectorXd& x) { return x.dot(M * x); }

// Children of a simplex under one red refinement step, in barycentric
// coordinates of the reference cell.
std::vector<std::array<Bary, 4>> red_children(int dim, const std::array<Bary, 4>& s) {
  auto mid = [](const Bary& a, const Bary& b) {
    Bary m;
    for (int k = 0; k < 4; ++k) m[k] = 0.5 * (a[k] + b[k]);
    return m;
  };
  std::vector<std::array<Bary, 4>> out;
  if (dim == 2) {
    const Bary ab = mid(s[0], s[1]), bc = mid(s[1], s[2]), ca = mid(s[2], s[0]);
    out.push_back({s[0], ab, ca, {}});
    out.push_back({ab, s[1], bc, {}});
    out.push_back({ca, bc, s[2], {}});
    out.push_back({ab, bc, ca, {}});
  } else {
    const Bary ab = mid(s[0], s[1]), ac = mid(s[0], s[2]), ad = mid(s[0], s[3]);
    const Bary bc = mid(s[1], s[2]), bd = mid(s[1], s[3]), cd = mid(s[2], s[3]);
    out.push_back({s[0], ab, ac, ad});
    out.push_back({ab, s[1], bc, bd});
    out.push_back({ac, bc, s[2], cd});
    out.push_back({ad, bd, cd, s[3]});
    out.push_back({ab, ac, ad, bd});
    out.push_back({ab, ac, bc, bd});
    out.push_back({ac, ad, bd, cd});
    out.push_back({ac, bc, bd, cd});
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

double jump_seminorm_sq(const CRFunction& v) {
  double s = 0.0;
  for (const Facet& f : v.facets->facets())
    if (!f.is_boundary()) s += facet_jump_sq(v, f);
  return s;
}

double vh_norm(const CRFunction& v) {
  const SimplexMesh& mesh = v.facets->mesh();
  const int n = mesh.dim();
  const QuadratureRule& q = simplex_rule(n, 2);
  double s = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    double l2 = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) l2 += q.weights[k] * v.eval_local(c, q.points[k]).squaredNorm();
    s += mesh.volume(c) * (l2 + v.gradient(c).squaredNorm());
  }
  return std::sqrt(s);
}

double triple_norm(const CRFunction& v) {
  const double n = vh_norm(v);
  return std::sqrt(n * n + jump_seminorm_sq(v));
}

SparseMatrix vh_gram(const FacetComplex& facets) {
  const SimplexMesh& mesh = facets.mesh();
  const int n = mesh.dim();
  const Eigen::Index size = n * static_cast<Eigen::Index>(facets.num_facets());
  const double base = 1.0 - 2.0 * n / (n + 1.0);
  const double pair = n * n / ((n + 1.0) * (n + 2.0));
  Triplets t;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const double vol = mesh.volume(c);
    const auto& g = mesh.barycentric_gradients(c);
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const double v = vol * (base + pair * (i == j ? 2.0 : 1.0) + n * n * g[i].dot(g[j]));
        for (int a = 0; a < n; ++a)
          t.emplace_back(n * facets.cell_facet(c, i) + a, n * facets.cell_facet(c, j) + a, v);
      }
    }
  }
  SparseMatrix m(size, size);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// ---------------------------------------------------------------------------

double error_l2(const VectorField& u_exact, const CRFunction& uh, int degree) {
  const SimplexMesh& mesh = uh.facets->mesh();
  const QuadratureRule& q = simplex_rule(mesh.dim(), degree);
  double s = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    double local = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      const Point x = mesh.map_to_cell(c, q.points[k]);
      local += q.weights[k] * (u_exact(x) - uh.eval_local(c, q.points[k])).squaredNorm();
    }
    s += mesh.volume(c) * local;
  }
  return std::sqrt(s);
}

double error_pressure(const ScalarField& p_exact, const P0Function& ph, int degree) {
  const SimplexMesh& mesh = *ph.mesh;
  const QuadratureRule& q = simplex_rule(mesh.dim(), degree);
  double s = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    double local = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double d = p_exact(mesh.map_to_cell(c, q.points[k])) - ph.values[c];
      local += q.weights[k] * d * d;
    }
    s += mesh.volume(c) * local;
  }
  return std::sqrt(s);
}

double error_h1_seminorm(const MatrixField& grad_exact, const CRFunction& uh, int degree) {
  const SimplexMesh& mesh = uh.facets->mesh();
  const QuadratureRule& q = simplex_rule(mesh.dim(), degree);
  double s = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Eigen::Matrix3d G = uh.gradient(c);
    double local = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k)
      local += q.weights[k] * (grad_exact(mesh.map_to_cell(c, q.points[k])) - G).squaredNorm();
    s += mesh.volume(c) * local;
  }
  return std::sqrt(s);
}

double error_triple_norm(const VectorField& u_exact, const MatrixField& grad_exact,
                         const CRFunction& uh, int degree) {
  const double l2 = error_l2(u_exact, uh, degree);
  const double h1 = error_h1_seminorm(grad_exact, uh, degree);
  return std::sqrt(l2 * l2 + h1 * h1 + jump_seminorm_sq(uh));
}

FluxDefect flux_defect(const VectorField& u_exact, const ScalarField& g, const FacetComplex& facets) {
  const FacetFunction d = boundary_mean(
      [&](const Point& x, const Facet& f) { return u_exact(x).dot(f.normal) - g(x); }, facets);
  FluxDefect out;
  for (std::size_t b = 0; b < facets.num_boundary_facets(); ++b) {
    const Facet& f = facets.facet(facets.boundary_facets()[b]);
    const double v2 = d[b] * d[b] * f.measure;
    out.global += v2;
    out.weighted += v2 / f.diameter;
  }
  out.global = std::sqrt(out.global);
  out.weighted = std::sqrt(out.weighted);
  return out;
}

ErrorRecord compute_errors(const ManufacturedCase& c, const Solution& s, double epsilon) {
  const AnalyticSolution& a = c.solution;
  const SimplexMesh& mesh = s.u.facets->mesh();
  ErrorRecord r;
  r.h = mesh.mesh_size();
  r.cells = mesh.num_cells();
  r.l2_u = error_l2(a.u, s.u);
  r.h1_semi_u = error_h1_seminorm(a.grad_u, s.u);
  r.h1_u = std::sqrt(r.l2_u * r.l2_u + r.h1_semi_u * r.h1_semi_u);
  r.triple_u = std::sqrt(r.h1_u * r.h1_u + jump_seminorm_sq(s.u));
  r.l2_p = error_pressure(a.p, s.p_centered);
  r.l2_p_raw = error_pressure(a.p, s.p);
  r.flux = flux_defect(a.u, c.data.g, *s.u.facets).global;
  r.epsilon = epsilon;
  r.residual = s.residual;
  r.mean_pressure = s.mean_pressure;
  return r;
}

// ---------------------------------------------------------------------------

std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& h) {
  if (errors.size() != h.size()) throw Error("eoc: error and mesh-size columns differ in length");
  if (errors.size() < 2) throw Error("eoc: at least two levels are required");
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    if (errors[i] == 0.0 || errors[i + 1] == 0.0)
      throw ZeroError("eoc: zero error at level " + std::to_string(errors[i] == 0.0 ? i : i + 1));
    out.push_back(std::log(errors[i] / errors[i + 1]) / std::log(h[i] / h[i + 1]));
  }
  return out;
}

std::vector<double> ConvergenceReport::column(double ErrorRecord::*field) const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const ErrorRecord& r : records) out.push_back(r.*field);
  return out;
}

std::vector<std::optional<double>> ConvergenceReport::orders(double ErrorRecord::*field) const {
  std::vector<std::optional<double>> out(records.size());
  if (records.size() < 2) return out;
  const std::vector<double> e = eoc(column(field), column(&ErrorRecord::h));
  for (std::size_t i = 0; i < e.size(); ++i) out[i + 1] = e[i];
  return out;
}

// ---------------------------------------------------------------------------

double skin_l2(const CRFunction& v, const SmoothDomain& domain) {
  const SimplexMesh& mesh = v.facets->mesh();
  const int n = mesh.dim();
  const QuadratureRule& q = simplex_rule(n, 4);
  std::array<Bary, 4> ref{};
  for (int k = 0; k <= n; ++k) ref[k][k] = 1.0;
  std::vector<std::array<Bary, 4>> subs{ref};
  for (int level = 0; level < 2; ++level) {
    std::vector<std::array<Bary, 4>> next;
    for (const auto& s : subs)
      for (const auto& c : red_children(n, s)) next.push_back(c);
    subs = std::move(next);
  }
  const double sub_fraction = 1.0 / static_cast<double>(subs.size());

  double total = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    // Cells whose vertices are all at least h_T inside cannot meet Omega_h \ Omega.
    double dmax = -1e300;
    for (int i = 0; i <= n; ++i) dmax = std::max(dmax, domain.signed_distance(mesh.vertex(mesh.cell(c)[i])));
    if (dmax < -mesh.diameter(c)) continue;
    double local = 0.0;
    for (const auto& s : subs) {
      for (std::size_t k = 0; k < q.size(); ++k) {
        Bary lam{};
        for (int i = 0; i <= n; ++i)
          for (int m = 0; m <= n; ++m) lam[m] += q.points[k][i] * s[i][m];
        const Point x = mesh.map_to_cell(c, lam);
        if (domain.signed_distance(x) > 0.0) local += q.weights[k] * v.eval_local(c, lam).squaredNorm();
      }
    }
    total += mesh.volume(c) * sub_fraction * local;
  }
  return std::sqrt(total);
}

double boundary_skin_ratio(const CRFunction& v, const SmoothDomain& domain) {
  const double skin = skin_l2(v, domain);
  if (skin == 0.0) return 0.0;
  return skin / (v.facets->mesh().mesh_size() * triple_norm(v));
}

double korn_ratio(const FacetComplex& facets, double nu, double gamma, int samples,
                  std::uint64_t seed) {
  const SparseMatrix K = assemble_a(facets, nu) + assemble_j(facets, gamma);
  const SparseMatrix G = vh_gram(facets);
  Eigen::SimplicialLDLT<SparseMatrix> solver(K);
  if (solver.info() != Eigen::Success) throw SolveFailure("korn_ratio: factorisation failed");
  std::mt19937_64 rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd x = random_vector(K.rows(), rng);
    best = std::min(best, quadratic(K, x) / quadratic(G, x));
    // Inverse iteration drives the sample toward the lowest generalised mode.
    for (int it = 0; it < 30; ++it) {
      x = solver.solve(G * x);
      x /= x.norm();
    }
    best = std::min(best, quadratic(K, x) / quadratic(G, x));
  }
  return best;
}

double jump_equivalence_ratio(const FacetComplex& facets, int samples, std::uint64_t seed) {
  const SimplexMesh& mesh = facets.mesh();
  std::mt19937_64 rng(seed);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    CRFunction v(facets);
    v.values = random_vector(v.values.size(), rng);
    double grad = 0.0;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) grad += mesh.volume(c) * v.gradient(c).squaredNorm();
    if (grad > 0.0) best = std::max(best, jump_seminorm_sq(v) / grad);
  }
  return std::sqrt(best);
}

double inf_sup_ratio(const FacetComplex& facets, const P0Function& q) {
  const int n = facets.dim();
  std::vector<int> dof_map(n * facets.num_facets(), -1);
  int m = 0;
  for (std::size_t e = 0; e < facets.num_facets(); ++e)
    if (!facets.facet(e).is_boundary())
      for (int a = 0; a < n; ++a) dof_map[n * e + a] = m++;
  const SparseMatrix G = vh_gram(facets);
  Triplets t;
  for (Eigen::Index k = 0; k < G.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(G, k); it; ++it) {
      const int r = dof_map[it.row()], c = dof_map[it.col()];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  SparseMatrix G0(m, m);
  G0.setFromTriplets(t.begin(), t.end());
  const Eigen::VectorXd bt = assemble_b(facets).transpose() * q.values;
  Eigen::VectorXd b(m);
  for (std::size_t i = 0; i < dof_map.size(); ++i)
    if (dof_map[i] >= 0) b[dof_map[i]] = bt[i];
  Eigen::SimplicialLLT<SparseMatrix> llt(G0);
  if (llt.info() != Eigen::Success) throw SolveFailure("inf_sup_ratio: Gram factorisation failed");
  const double sup = std::sqrt(std::max(0.0, b.dot(llt.solve(b))));
  double qn = 0.0;
  for (std::size_t c = 0; c < q.mesh->num_cells(); ++c) qn += q.mesh->volume(c) * q.values[c] * q.values[c];
  return sup / std::sqrt(qn);
}

double enrich_volume_ratio(const CRFunction& v) {
  const FacetComplex& facets = *v.facets;
  const SimplexMesh& mesh = facets.mesh();
  const int n = mesh.dim();
  const ConformingP1Function ev = enrich_volume(v);
  const QuadratureRule& q = simplex_rule(n, 2);
  double s = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    // Vertex values of the cellwise affine difference v|_T - E_h v.
    std::array<Point, 4> d;
    Point sum = Point::Zero();
    for (int i = 0; i <= n; ++i) sum += v.at(facets.cell_facet(c, i));
    for (int i = 0; i <= n; ++i) {
      d[i] = sum - n * v.at(facets.cell_facet(c, i));
      for (int a = 0; a < n; ++a) d[i][a] -= ev.value(mesh.cell(c)[i], a);
    }
    const auto& g = mesh.barycentric_gradients(c);
    Eigen::Matrix3d grad = Eigen::Matrix3d::Zero();
    for (int i = 0; i <= n; ++i) grad += d[i] * g[i].transpose();
    double l2 = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      Point x = Point::Zero();
      for (int i = 0; i <= n; ++i) x += q.points[k][i] * d[i];
      l2 += q.weights[k] * x.squaredNorm();
    }
    s += mesh.volume(c) * (l2 + grad.squaredNorm());
  }
  const double jump = jump_seminorm_sq(v);
  if (jump == 0.0) return 0.0;
  return std::sqrt(s / jump);
}

}  // namespace crslip
