#include "crslip/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "crslip/errors.hpp"

namespace crslip {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 0 ? 1.0 : (n == 1 ? x : p1);
      const double pm = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);  // 2/((1-x^2)P'^2) scaled by 1/2
  }
}

namespace {

QuadratureRule make_gauss_edge(int degree) {
  QuadratureRule r;
  r.dim = 1;
  const int n = degree / 2 + 1;
  r.degree = 2 * n - 1;
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  for (int i = 0; i < n; ++i) {
    r.points.push_back({1.0 - x[i], x[i], 0.0, 0.0});
    r.weights.push_back(w[i]);
  }
  return r;
}

QuadratureRule make_six_point_triangle() {
  QuadratureRule r;
  r.dim = 2;
  r.degree = 4;
  const double a1 = 0.44594849091596488632, w1 = 0.22338158967801146570;
  const double a2 = 0.091576213509770743460, w2 = 0.10995174365532186764;
  for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
    const double b = 1.0 - 2.0 * a;
    r.points.push_back({b, a, a, 0.0});
    r.points.push_back({a, b, a, 0.0});
    r.points.push_back({a, a, b, 0.0});
    for (int k = 0; k < 3; ++k) r.weights.push_back(w);
  }
  return r;
}

QuadratureRule make_collapsed(int dim, int degree) {
  QuadratureRule r;
  r.dim = dim;
  const int n = (degree + dim) / 2 + 1;
  r.degree = degree;
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  if (dim == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double u = x[i], v = x[j] * (1.0 - x[i]);
        r.points.push_back({1.0 - u - v, u, v, 0.0});
        r.weights.push_back(2.0 * w[i] * w[j] * (1.0 - x[i]));
      }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double u = x[i];
          const double v = x[j] * (1.0 - u);
          const double s = x[k] * (1.0 - u) * (1.0 - x[j]);
          r.points.push_back({1.0 - u - v - s, u, v, s});
          r.weights.push_back(6.0 * w[i] * w[j] * w[k] * (1.0 - u) * (1.0 - u) * (1.0 - x[j]));
        }
  }
  return r;
}

}  // namespace

const QuadratureRule& simplex_rule(int dim, int degree) {
  if (dim < 1 || dim > 3) throw Error("quadrature dimension must be 1, 2 or 3");
  if (degree < 0) degree = 0;
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{dim, degree}];
  if (!slot) {
    if (dim == 1) {
      slot = std::make_unique<QuadratureRule>(make_gauss_edge(degree));
    } else if (dim == 2 && degree <= 4) {
      slot = std::make_unique<QuadratureRule>(make_six_point_triangle());
    } else {
      slot = std::make_unique<QuadratureRule>(make_collapsed(dim, degree));
    }
  }
  return *slot;
}

}  // namespace crslip
