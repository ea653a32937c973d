#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "crslip/analysis.hpp"
#include "crslip/errors.hpp"
#include "crslip/quadrature.hpp"

namespace crslip {

namespace {

using Bary = std::array<double, 4>;

// Sub-simplex of a boundary facet, vertices in barycentric coordinates of
// the facet (N entries used).
struct Piece {
  std::array<Bary, 3> v{};
};

// Quadrature node pair (x on e, y on f) with the kernel and Jacobians folded
// into the weight.
using PairVisitor = std::function<void(const Bary& lx, const Bary& ly, double weight)>;

constexpr int kSubdivisionDepth = 4;

class PairIntegrator {
 public:
  explicit PairIntegrator(const FacetComplex& facets)
      : facets_(facets),
        mesh_(facets.mesh()),
        n_(facets.dim()),
        regular_(simplex_rule(n_ - 1, 4)),
        shifted_(simplex_rule(n_ - 1, 6)) {}

  // Integrates V(x, y) / |x - y|^N over e x f.
  void integrate(int e, int f, bool touching, const PairVisitor& visit) const {
    Piece whole;
    for (int k = 0; k < n_; ++k) whole.v[k][k] = 1.0;
    const Facet& fe = facets_.facet(e);
    const Facet& ff = facets_.facet(f);
    if (!touching) {
      tensor(fe, whole, regular_, ff, whole, regular_, 1.0, visit);
    } else {
      recurse(fe, whole, ff, whole, 1.0, 0, visit);
    }
  }

 private:
  Point point(const Facet& f, const Bary& l) const {
    Point x = Point::Zero();
    for (int k = 0; k < n_; ++k) x += l[k] * mesh_.vertex(f.vertices[k]);
    return x;
  }

  Bary compose(const Piece& p, const Bary& local) const {
    Bary l{};
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k) l[k] += local[i] * p.v[i][k];
    return l;
  }

  // Tensor rule on piece pe of e times piece pf of f; `fraction` is
  // |pe||pf| / (|e||f|).
  void tensor(const Facet& e, const Piece& pe, const QuadratureRule& qe, const Facet& f,
              const Piece& pf, const QuadratureRule& qf, double fraction,
              const PairVisitor& visit) const {
    const double scale = fraction * e.measure * f.measure;
    for (std::size_t i = 0; i < qe.size(); ++i) {
      const Bary lx = compose(pe, qe.points[i]);
      const Point x = point(e, lx);
      for (std::size_t j = 0; j < qf.size(); ++j) {
        const Bary ly = compose(pf, qf.points[j]);
        const double r = (x - point(f, ly)).norm();
        if (r < 1e-300) continue;
        visit(lx, ly, scale * qe.weights[i] * qf.weights[j] / std::pow(r, n_));
      }
    }
  }

  std::vector<Piece> children(const Piece& p) const {
    auto mid = [](const Bary& a, const Bary& b) {
      Bary m;
      for (int k = 0; k < 4; ++k) m[k] = 0.5 * (a[k] + b[k]);
      return m;
    };
    if (n_ == 2) {
      const Bary m = mid(p.v[0], p.v[1]);
      return {Piece{{p.v[0], m, {}}}, Piece{{m, p.v[1], {}}}};
    }
    const Bary ab = mid(p.v[0], p.v[1]), bc = mid(p.v[1], p.v[2]), ca = mid(p.v[2], p.v[0]);
    return {Piece{{p.v[0], ab, ca}}, Piece{{ab, p.v[1], bc}}, Piece{{ca, bc, p.v[2]}},
            Piece{{ab, bc, ca}}};
  }

  bool touch(const Facet& e, const Piece& pe, const Facet& f, const Piece& pf) const {
    const double tol = 1e-12 * std::max(e.diameter, f.diameter);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if ((point(e, pe.v[i]) - point(f, pf.v[j])).norm() <= tol) return true;
    return false;
  }

  void recurse(const Facet& e, const Piece& pe, const Facet& f, const Piece& pf, double fraction,
               int depth, const PairVisitor& visit) const {
    if (depth == kSubdivisionDepth) {
      // Mismatched rules keep nodes of the two sides apart.
      tensor(e, pe, regular_, f, pf, shifted_, fraction, visit);
      return;
    }
    const auto ce = children(pe);
    const auto cf = children(pf);
    const double sub = fraction / static_cast<double>(ce.size() * cf.size());
    for (const Piece& a : ce)
      for (const Piece& b : cf) {
        if (touch(e, a, f, b))
          recurse(e, a, f, b, sub, depth + 1, visit);
        else
          tensor(e, a, regular_, f, b, regular_, sub, visit);
      }
  }

  const FacetComplex& facets_;
  const SimplexMesh& mesh_;
  int n_;
  const QuadratureRule& regular_;
  const QuadratureRule& shifted_;
};

// Calls visit(e, f, touching) for every ordered pair of boundary facets.
template <class F>
void for_each_pair(const FacetComplex& facets, F&& visit) {
  const auto bf = facets.boundary_facets();
  for (int e : bf) {
    const auto near = facets.boundary_neighbours(e);
    for (int f : bf) {
      const bool touching = std::binary_search(near.begin(), near.end(), f);
      visit(e, f, touching);
    }
  }
}

// Seminorm Gram over boundary vertices (dense, indexed by
// boundary_vertex_index).
Eigen::MatrixXd slobodeckij_gram(const FacetComplex& facets) {
  const int n = facets.dim();
  const auto nb = static_cast<Eigen::Index>(facets.boundary_vertices().size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(nb, nb);
  const PairIntegrator integ(facets);
  std::array<int, 6> ids{};
  std::array<double, 6> d{};
  Eigen::Matrix<double, 6, 6> local;
  for_each_pair(facets, [&](int e, int f, bool touching) {
    const Facet& fe = facets.facet(e);
    const Facet& ff = facets.facet(f);
    // Union of vertex ids; basis difference phi(x) - phi(y).
    int m = 0;
    std::array<int, 3> slot_e{}, slot_f{};
    for (int k = 0; k < n; ++k) {
      ids[m] = fe.vertices[k];
      slot_e[k] = m++;
    }
    for (int k = 0; k < n; ++k) {
      int s = -1;
      for (int j = 0; j < n; ++j)
        if (ids[j] == ff.vertices[k]) s = j;
      if (s < 0) {
        ids[m] = ff.vertices[k];
        s = m++;
      }
      slot_f[k] = s;
    }
    local.setZero();
    integ.integrate(e, f, touching, [&](const Bary& lx, const Bary& ly, double w) {
      d.fill(0.0);
      for (int k = 0; k < n; ++k) {
        d[slot_e[k]] += lx[k];
        d[slot_f[k]] -= ly[k];
      }
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) local(i, j) += w * d[i] * d[j];
    });
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        S(facets.boundary_vertex_index(ids[i]), facets.boundary_vertex_index(ids[j])) += local(i, j);
  });
  return S;
}

// E_h^partial as a (boundary vertices x boundary facets) matrix.
Eigen::MatrixXd enrichment_matrix(const FacetComplex& facets) {
  const auto bv = facets.boundary_vertices();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(bv.size()),
                                            static_cast<Eigen::Index>(facets.num_boundary_facets()));
  for (std::size_t i = 0; i < bv.size(); ++i) {
    const auto at = facets.boundary_facets_at(bv[i]);
    for (int e : at) P(i, facets.facet(e).boundary_index) = 1.0 / static_cast<double>(at.size());
  }
  return P;
}

// Boundary P1 mass matrix over boundary vertices.
Eigen::MatrixXd boundary_mass(const FacetComplex& facets) {
  const int n = facets.dim();
  const auto nb = static_cast<Eigen::Index>(facets.boundary_vertices().size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nb, nb);
  // int_e lambda_i lambda_j = |e| (1 + d_ij) / (N (N + 1)) on an (N-1)-simplex.
  const double denom = n * (n + 1.0);
  for (int e : facets.boundary_facets()) {
    const Facet& f = facets.facet(e);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        M(facets.boundary_vertex_index(f.vertices[i]), facets.boundary_vertex_index(f.vertices[j])) +=
            f.measure * (i == j ? 2.0 : 1.0) / denom;
  }
  return M;
}

Eigen::VectorXd facet_measures(const FacetComplex& facets) {
  Eigen::VectorXd m(static_cast<Eigen::Index>(facets.num_boundary_facets()));
  for (std::size_t b = 0; b < facets.num_boundary_facets(); ++b)
    m[b] = facets.facet(facets.boundary_facets()[b]).measure;
  return m;
}

Eigen::VectorXd scalar_values(const FacetFunction& mu) {
  if (mu.components == 1) return mu.values;
  Eigen::VectorXd v(mu.values.size() / mu.components);
  for (Eigen::Index b = 0; b < v.size(); ++b) v[b] = mu[b];
  return v;
}

}  // namespace

Eigen::MatrixXd half_norm_gram(const FacetComplex& facets) {
  const int n = facets.dim();
  const Eigen::MatrixXd P = enrichment_matrix(facets);
  Eigen::MatrixXd G = P.transpose() * (boundary_mass(facets) + slobodeckij_gram(facets)) * P;

  const auto bf = facets.boundary_facets();
  for (int e : bf) {
    const Facet& fe = facets.facet(e);
    const double w = std::pow(fe.diameter, n - 2);
    const int i = fe.boundary_index;
    for (int f : facets.boundary_neighbours(e)) {
      if (f == e) continue;
      const int j = facets.facet(f).boundary_index;
      G(i, i) += w;
      G(j, j) += w;
      G(i, j) -= w;
      G(j, i) -= w;
    }
  }
  const double h = facets.mesh().mesh_size();
  G.diagonal() += h * facet_measures(facets);
  return G;
}

double discrete_h_half_norm(const FacetFunction& mu) {
  const Eigen::VectorXd m = scalar_values(mu);
  return std::sqrt(std::max(0.0, m.dot(half_norm_gram(*mu.facets) * m)));
}

Eigen::VectorXd dual_half_norm_argmax(const FacetFunction& mu) {
  const FacetComplex& facets = *mu.facets;
  const Eigen::MatrixXd G = half_norm_gram(facets);
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw SingularGram("discrete H^1/2 Gram matrix is not positive definite");
  const Eigen::VectorXd rhs = facet_measures(facets).cwiseProduct(scalar_values(mu));
  Eigen::VectorXd lambda = llt.solve(rhs);
  const double norm = std::sqrt(std::max(0.0, lambda.dot(G * lambda)));
  if (norm > 0.0) lambda /= norm;
  return lambda;
}

double dual_half_norm(const FacetFunction& mu) {
  const FacetComplex& facets = *mu.facets;
  const Eigen::MatrixXd G = half_norm_gram(facets);
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw SingularGram("discrete H^1/2 Gram matrix is not positive definite");
  const Eigen::VectorXd rhs = facet_measures(facets).cwiseProduct(scalar_values(mu));
  return std::sqrt(std::max(0.0, rhs.dot(llt.solve(rhs))));
}

double slobodeckij_seminorm_sq(const ConformingP1Function& w, const FacetComplex& facets) {
  const int n = facets.dim();
  const PairIntegrator integ(facets);
  double s = 0.0;
  for_each_pair(facets, [&](int e, int f, bool touching) {
    const Facet& fe = facets.facet(e);
    const Facet& ff = facets.facet(f);
    integ.integrate(e, f, touching, [&](const Bary& lx, const Bary& ly, double wt) {
      double d = 0.0;
      for (int k = 0; k < n; ++k) d += lx[k] * w.value(fe.vertices[k]) - ly[k] * w.value(ff.vertices[k]);
      s += wt * d * d;
    });
  });
  return s;
}

double h_half_norm(const ScalarField& fn, const FacetComplex& facets) {
  const SimplexMesh& mesh = facets.mesh();
  const int n = facets.dim();
  auto point = [&](const Facet& f, const Bary& l) {
    Point x = Point::Zero();
    for (int k = 0; k < n; ++k) x += l[k] * mesh.vertex(f.vertices[k]);
    return x;
  };
  const QuadratureRule& q = simplex_rule(n - 1, 8);
  double l2 = 0.0;
  for (int e : facets.boundary_facets()) {
    const Facet& f = facets.facet(e);
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double v = fn(point(f, q.points[k]));
      l2 += f.measure * q.weights[k] * v * v;
    }
  }
  const PairIntegrator integ(facets);
  double semi = 0.0;
  for_each_pair(facets, [&](int e, int f, bool touching) {
    const Facet& fe = facets.facet(e);
    const Facet& ff = facets.facet(f);
    integ.integrate(e, f, touching, [&](const Bary& lx, const Bary& ly, double wt) {
      const double d = fn(point(fe, lx)) - fn(point(ff, ly));
      semi += wt * d * d;
    });
  });
  return std::sqrt(l2 + semi);
}

}  // namespace crslip
