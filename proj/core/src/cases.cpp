#include "crslip/cases.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "crslip/errors.hpp"
#include "crslip/quadrature.hpp"

namespace crslip {

namespace {

Point radial_normal(const Point& x) {
  const double r = x.norm();
  return r > 0.0 ? Point(x / r) : Point::Zero();
}

ProblemData derive_data(const AnalyticSolution& s) {
  ProblemData d;
  d.nu = s.nu;
  d.f = [s](const Point& x) -> Point { return s.u(x) - s.nu * s.laplacian_u(x) + s.grad_p(x); };
  // u.x is the normal flux on the unit sphere; as a polynomial it extends
  // to all of R^N.
  d.g = [s](const Point& x) { return s.u(x).dot(x); };
  d.tau = [s](const Point& x) -> Point {
    const Point n = radial_normal(x);
    const Point t = s.stress(x) * n;
    return t - n.dot(t) * n;
  };
  return d;
}

std::string describe(const Point& x, int dim) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << x[0] << ", " << x[1];
  if (dim == 3) os << ", " << x[2];
  os << ")";
  return os.str();
}

}  // namespace

Eigen::Matrix3d AnalyticSolution::stress(const Point& x) const {
  const Eigen::Matrix3d G = grad_u(x);
  Eigen::Matrix3d s = nu * (G + G.transpose());
  const double px = p(x);
  for (int k = 0; k < dim; ++k) s(k, k) -= px;
  return s;
}

PressureVariant parse_pressure_variant(const std::string& name) {
  if (name == "printed") return PressureVariant::printed;
  if (name == "symmetric") return PressureVariant::symmetric;
  throw ConfigError("unknown pressure variant '" + name + "' (expected printed or symmetric)");
}

ManufacturedCase case_disk2d(double nu) {
  ManufacturedCase c;
  c.name = "disk2d";
  c.domain = make_domain(DomainKind::disk2d);
  AnalyticSolution& s = c.solution;
  s.dim = 2;
  s.nu = nu;
  s.u = [](const Point& x) -> Point {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return Point(-x[1] * r2, x[0] * r2, 0.0);
  };
  s.grad_u = [](const Point& x) -> Eigen::Matrix3d {
    const double X = x[0], Y = x[1];
    Eigen::Matrix3d G = Eigen::Matrix3d::Zero();
    G(0, 0) = -2.0 * X * Y;
    G(0, 1) = -X * X - 3.0 * Y * Y;
    G(1, 0) = 3.0 * X * X + Y * Y;
    G(1, 1) = 2.0 * X * Y;
    return G;
  };
  s.laplacian_u = [](const Point& x) -> Point { return Point(-8.0 * x[1], 8.0 * x[0], 0.0); };
  s.p = [](const Point& x) { return 8.0 * x[0] * x[1]; };
  s.grad_p = [](const Point& x) -> Point { return Point(8.0 * x[1], 8.0 * x[0], 0.0); };
  c.data = derive_data(s);
  return c;
}

ManufacturedCase case_ball3d(PressureVariant variant, double nu) {
  ManufacturedCase c;
  c.name = "ball3d";
  c.domain = make_domain(DomainKind::ball3d);
  AnalyticSolution& s = c.solution;
  s.dim = 3;
  s.nu = nu;
  s.u = [](const Point& p) -> Point {
    const double x = p[0], y = p[1], z = p[2];
    return Point(10.0 * x * x * y * z * (y - z), 10.0 * x * y * y * z * (z - x),
                 10.0 * x * y * z * z * (x - y));
  };
  s.grad_u = [](const Point& p) -> Eigen::Matrix3d {
    const double x = p[0], y = p[1], z = p[2];
    Eigen::Matrix3d G;
    G(0, 0) = 10.0 * (2 * x * y * y * z - 2 * x * y * z * z);
    G(0, 1) = 10.0 * (2 * x * x * y * z - x * x * z * z);
    G(0, 2) = 10.0 * (x * x * y * y - 2 * x * x * y * z);
    G(1, 0) = 10.0 * (y * y * z * z - 2 * x * y * y * z);
    G(1, 1) = 10.0 * (2 * x * y * z * z - 2 * x * x * y * z);
    G(1, 2) = 10.0 * (2 * x * y * y * z - x * x * y * y);
    G(2, 0) = 10.0 * (2 * x * y * z * z - y * y * z * z);
    G(2, 1) = 10.0 * (x * x * z * z - 2 * x * y * z * z);
    G(2, 2) = 10.0 * (2 * x * x * y * z - 2 * x * y * y * z);
    return G;
  };
  s.laplacian_u = [](const Point& p) -> Point {
    const double x = p[0], y = p[1], z = p[2];
    return Point(20.0 * (y * y * z - y * z * z + x * x * z - x * x * y),
                 20.0 * (x * z * z - y * y * z - x * x * z + x * y * y),
                 20.0 * (y * z * z - x * z * z + x * x * y - x * y * y));
  };
  if (variant == PressureVariant::printed) {
    // 10xyz(z+y+z) = 10(xy^2z + 2xyz^2)
    s.p = [](const Point& p) { return 10.0 * p[0] * p[1] * p[2] * (p[2] + p[1] + p[2]); };
    s.grad_p = [](const Point& p) -> Point {
      const double x = p[0], y = p[1], z = p[2];
      return Point(10.0 * (y * y * z + 2 * y * z * z), 10.0 * (2 * x * y * z + 2 * x * z * z),
                   10.0 * (x * y * y + 4 * x * y * z));
    };
  } else {
    s.p = [](const Point& p) { return 10.0 * p[0] * p[1] * p[2] * (p[0] + p[1] + p[2]); };
    s.grad_p = [](const Point& p) -> Point {
      const double x = p[0], y = p[1], z = p[2];
      return Point(10.0 * (2 * x * y * z + y * y * z + y * z * z),
                   10.0 * (x * x * z + 2 * x * y * z + x * z * z),
                   10.0 * (x * x * y + x * y * y + 2 * x * y * z));
    };
  }
  c.data = derive_data(s);
  return c;
}

ManufacturedCase make_case(DomainKind kind, PressureVariant variant, double nu) {
  return kind == DomainKind::disk2d ? case_disk2d(nu) : case_ball3d(variant, nu);
}

OracleReport oracle_check(const ManufacturedCase& c, int n_points, std::uint64_t seed) {
  const AnalyticSolution& s = c.solution;
  const ProblemData& d = c.data;
  const int dim = s.dim;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  auto random_direction = [&]() {
    Point v;
    do {
      v = Point(unit(rng), unit(rng), dim == 3 ? unit(rng) : 0.0);
    } while (v.norm() < 1e-3 || v.norm() > 1.0);
    return Point(v / v.norm());
  };

  // First derivatives: central differences, step 1e-5. Second derivatives:
  // fourth-order five-point stencil, step 1e-3 (exact for quintics up to
  // rounding, which a 1e-5 second difference would not be).
  const double h1 = 1e-5, h2 = 1e-3;
  auto fd_grad_u = [&](const Point& x) {
    Eigen::Matrix3d G = Eigen::Matrix3d::Zero();
    for (int k = 0; k < dim; ++k) {
      const Point e = Point::Unit(k);
      G.col(k) = (s.u(x + h1 * e) - s.u(x - h1 * e)) / (2 * h1);
    }
    return G;
  };
  auto fd_grad_p = [&](const Point& x) {
    Point g = Point::Zero();
    for (int k = 0; k < dim; ++k) {
      const Point e = Point::Unit(k);
      g[k] = (s.p(x + h1 * e) - s.p(x - h1 * e)) / (2 * h1);
    }
    return g;
  };
  auto fd_laplacian = [&](const Point& x) {
    Point l = Point::Zero();
    for (int k = 0; k < dim; ++k) {
      const Point e = Point::Unit(k);
      l += (-s.u(x + 2 * h2 * e) + 16.0 * s.u(x + h2 * e) - 30.0 * s.u(x) + 16.0 * s.u(x - h2 * e) -
            s.u(x - 2 * h2 * e)) /
           (12.0 * h2 * h2);
    }
    return l;
  };

  auto fail = [&](const std::string& field, const Point& x, double defect) {
    std::ostringstream os;
    os << c.name << ": " << field << " mismatch " << defect << " at " << describe(x, dim);
    throw OracleMismatch(os.str());
  };

  OracleReport rep;
  rep.points = n_points;
  std::uniform_real_distribution<double> radius(0.0, 1.0);
  for (int i = 0; i < n_points; ++i) {
    const Point x = std::pow(radius(rng), 1.0 / dim) * random_direction();

    const Eigen::Matrix3d G = s.grad_u(x);
    const double div = std::abs(G.trace());
    rep.max_divergence = std::max(rep.max_divergence, div);
    if (div > 1e-12) fail("div u", x, div);

    const double gdef = (G - fd_grad_u(x)).cwiseAbs().maxCoeff() / (1.0 + G.cwiseAbs().maxCoeff());
    rep.max_gradient_defect = std::max(rep.max_gradient_defect, gdef);
    if (gdef > 1e-6) fail("grad u", x, gdef);

    const Point f = d.f(x);
    const Point f_oracle = s.u(x) - s.nu * fd_laplacian(x) + fd_grad_p(x);
    const double fdef = (f - f_oracle).cwiseAbs().maxCoeff() / (1.0 + f.cwiseAbs().maxCoeff());
    rep.max_force_defect = std::max(rep.max_force_defect, fdef);
    if (fdef > 1e-6) fail("f", x, fdef);

    const Point xb = c.domain->project_to_boundary(random_direction());
    const Point n = c.domain->outward_normal(xb);
    const double gn = std::abs(d.g(xb) - s.u(xb).dot(n));
    rep.max_normal_defect = std::max(rep.max_normal_defect, gn);
    if (gn > 1e-12) fail("g", xb, gn);

    const Point tau = d.tau(xb);
    const double tn = std::abs(tau.dot(n));
    rep.max_tangency = std::max(rep.max_tangency, tn);
    if (tn > 1e-10) fail("tau.n", xb, tn);
    // Tangential part of the stress vector, recomputed independently.
    const Point t = s.stress(xb) * n;
    const double tdef = (tau - (t - n.dot(t) * n)).norm();
    if (tdef > 1e-12) fail("tau", xb, tdef);
  }

  // Compatibility int_Gamma g = 0 by spectral (trapezoidal / Gauss) quadrature.
  double flux = 0.0;
  if (dim == 2) {
    const int m = 4096;
    for (int k = 0; k < m; ++k) {
      const double t = 2.0 * M_PI * k / m;
      flux += d.g(Point(std::cos(t), std::sin(t), 0.0)) * (2.0 * M_PI / m);
    }
  } else {
    std::vector<double> nodes, weights;
    gauss_legendre(64, nodes, weights);
    const int m = 128;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double ct = 2.0 * nodes[i] - 1.0, st = std::sqrt(1.0 - ct * ct);
      for (int k = 0; k < m; ++k) {
        const double ph = 2.0 * M_PI * k / m;
        flux += d.g(Point(st * std::cos(ph), st * std::sin(ph), ct)) * 2.0 * weights[i] * (2.0 * M_PI / m);
      }
    }
  }
  rep.flux_integral = flux;
  if (std::abs(flux) > 1e-10) fail("int g", Point::Zero(), std::abs(flux));
  return rep;
}

FluxProbe flux_probe_disk2d() {
  FluxProbe probe;
  probe.u = [](const Point& x) -> Point { return Point(1.0 + x[0], 0.5 - x[1], 0.0); };
  probe.g = [u = probe.u](const Point& x) {
    const Point xb = x / x.norm();
    return u(xb).dot(xb);
  };
  return probe;
}

}  // namespace crslip
