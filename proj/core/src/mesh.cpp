#include "crslip/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include <Eigen/Dense>

#include "crslip/errors.hpp"

namespace crslip {

namespace {

double facet_measure(int dim, const Point& a, const Point& b, const Point& c) {
  if (dim == 2) return (b - a).norm();
  return 0.5 * (b - a).cross(c - a).norm();
}

double facet_diameter(int dim, const Point& a, const Point& b, const Point& c) {
  if (dim == 2) return (b - a).norm();
  return std::max({(b - a).norm(), (c - a).norm(), (c - b).norm()});
}

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

double signed_volume(int dim, std::span<const Point> v) {
  if (dim == 2) {
    const Point a = v[1] - v[0], b = v[2] - v[0];
    return 0.5 * (a.x() * b.y() - a.y() * b.x());
  }
  return (v[1] - v[0]).dot((v[2] - v[0]).cross(v[3] - v[0])) / 6.0;
}

SimplexMesh::SimplexMesh(int dim, std::vector<Point> vertices, std::vector<Cell> cells)
    : dim_(dim), vertices_(std::move(vertices)), cells_(std::move(cells)) {
  if (dim_ != 2 && dim_ != 3) throw Error("mesh dimension must be 2 or 3");
  const std::size_t nc = cells_.size();
  volume_.resize(nc);
  diameter_.resize(nc);
  inball_.resize(nc);
  grads_.resize(nc);
  h_ = 0.0;
  const int nv = dim_ + 1;
  for (std::size_t c = 0; c < nc; ++c) {
    std::array<Point, 4> p;
    for (int i = 0; i < nv; ++i) {
      const int vi = cells_[c][i];
      if (vi < 0 || static_cast<std::size_t>(vi) >= vertices_.size()) {
        throw Error("cell " + std::to_string(c) + " references a missing vertex");
      }
      p[i] = vertices_[vi];
    }
    const double vol = signed_volume(dim_, std::span<const Point>(p.data(), nv));
    if (!(vol > 0.0)) {
      throw Error("cell " + std::to_string(c) + " has non-positive volume");
    }
    volume_[c] = vol;

    double diam = 0.0;
    for (int i = 0; i < nv; ++i)
      for (int j = i + 1; j < nv; ++j) diam = std::max(diam, (p[i] - p[j]).norm());
    diameter_[c] = diam;
    h_ = std::max(h_, diam);

    double surface = 0.0;
    for (int i = 0; i < nv; ++i) {
      std::array<Point, 3> f;
      int k = 0;
      for (int j = 0; j < nv; ++j)
        if (j != i) f[k++] = p[j];
      surface += facet_measure(dim_, f[0], f[1], f[2]);
    }
    inball_[c] = 2.0 * dim_ * vol / surface;

    // Rows of J^{-1} are the gradients of lambda_1..lambda_N.
    std::array<Point, 4> g;
    g.fill(Point::Zero());
    if (dim_ == 2) {
      Eigen::Matrix2d J;
      J.col(0) = (p[1] - p[0]).head<2>();
      J.col(1) = (p[2] - p[0]).head<2>();
      const Eigen::Matrix2d Ji = J.inverse();
      for (int i = 0; i < 2; ++i) g[i + 1] << Ji(i, 0), Ji(i, 1), 0.0;
    } else {
      Eigen::Matrix3d J;
      J.col(0) = p[1] - p[0];
      J.col(1) = p[2] - p[0];
      J.col(2) = p[3] - p[0];
      const Eigen::Matrix3d Ji = J.inverse();
      for (int i = 0; i < 3; ++i) g[i + 1] = Ji.row(i).transpose();
    }
    g[0] = -(g[1] + g[2] + g[3]);
    grads_[c] = g;
  }
}

Point SimplexMesh::barycenter(std::size_t c) const {
  Point s = Point::Zero();
  for (int i = 0; i <= dim_; ++i) s += vertices_[cells_[c][i]];
  return s / (dim_ + 1);
}

std::array<double, 4> SimplexMesh::barycentric(std::size_t c, const Point& x) const {
  std::array<double, 4> lam{0, 0, 0, 0};
  const Point& p0 = vertices_[cells_[c][0]];
  double rest = 1.0;
  for (int i = 1; i <= dim_; ++i) {
    lam[i] = grads_[c][i].dot(x - p0);
    rest -= lam[i];
  }
  lam[0] = rest;
  return lam;
}

Point SimplexMesh::map_to_cell(std::size_t c, std::span<const double> lambda) const {
  Point x = Point::Zero();
  for (int i = 0; i <= dim_; ++i) x += lambda[i] * vertices_[cells_[c][i]];
  return x;
}

double SimplexMesh::total_volume() const {
  return std::accumulate(volume_.begin(), volume_.end(), 0.0);
}

double SimplexMesh::min_regularity() const {
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < cells_.size(); ++c) r = std::min(r, inball_[c] / diameter_[c]);
  return r;
}

std::span<const int> FacetComplex::boundary_facets_at(std::size_t v) const {
  const int b = boundary_vertex_index_[v];
  if (b < 0) return {};
  return std::span<const int>(vertex_facet_list_).subspan(
      vertex_facet_offsets_[b], vertex_facet_offsets_[b + 1] - vertex_facet_offsets_[b]);
}

std::vector<int> FacetComplex::boundary_neighbours(std::size_t e) const {
  std::vector<int> out;
  const Facet& f = facets_[e];
  for (int k = 0; k < dim(); ++k) {
    for (int n : boundary_facets_at(f.vertices[k])) out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double FacetComplex::boundary_measure() const {
  double s = 0.0;
  for (int e : boundary_facets_) s += facets_[e].measure;
  return s;
}

FacetComplex build_facets(const SimplexMesh& mesh) {
  FacetComplex fc;
  fc.mesh_ = &mesh;
  const int dim = mesh.dim();
  const int nv = dim + 1;
  const std::size_t nc = mesh.num_cells();
  fc.cell_facets_.assign(nc, {-1, -1, -1, -1});

  // Facet keys are the sorted vertex triples (third entry -1 in 2D).
  std::map<std::array<int, 3>, int> index;
  for (std::size_t c = 0; c < nc; ++c) {
    const Cell& cell = mesh.cell(c);
    for (int i = 0; i < nv; ++i) {
      std::array<int, 3> key{-1, -1, -1};
      int k = 0;
      for (int j = 0; j < nv; ++j)
        if (j != i) key[k++] = cell[j];
      std::sort(key.begin(), key.begin() + dim);
      auto [it, inserted] = index.try_emplace(key, static_cast<int>(fc.facets_.size()));
      if (inserted) {
        Facet f;
        f.vertices = key;
        f.cells = {static_cast<int>(c), -1};
        f.opposite = {i, -1};
        fc.facets_.push_back(f);
      } else {
        Facet& f = fc.facets_[it->second];
        if (f.cells[1] >= 0) {
          throw NonManifold("facet shared by more than two cells (cell " + std::to_string(c) + ")");
        }
        f.cells[1] = static_cast<int>(c);
        f.opposite[1] = i;
      }
      fc.cell_facets_[c][i] = it->second;
    }
  }

  for (std::size_t e = 0; e < fc.facets_.size(); ++e) {
    Facet& f = fc.facets_[e];
    const Point& a = mesh.vertex(f.vertices[0]);
    const Point& b = mesh.vertex(f.vertices[1]);
    const Point c = dim == 3 ? mesh.vertex(f.vertices[2]) : a;
    f.midpoint = dim == 2 ? Point(0.5 * (a + b)) : Point((a + b + c) / 3.0);
    f.measure = facet_measure(dim, a, b, c);
    f.diameter = facet_diameter(dim, a, b, c);
    Point n = dim == 2 ? Point(b.y() - a.y(), a.x() - b.x(), 0.0) : Point((b - a).cross(c - a));
    n.normalize();
    // Orient away from cells[0]: the opposite vertex of cells[0] lies behind.
    const Point& opp = mesh.vertex(mesh.cell(f.cells[0])[f.opposite[0]]);
    if (n.dot(f.midpoint - opp) < 0.0) n = -n;
    f.normal = n;
    if (f.is_boundary()) {
      f.boundary_index = static_cast<int>(fc.boundary_facets_.size());
      fc.boundary_facets_.push_back(static_cast<int>(e));
    }
  }

  fc.boundary_vertex_index_.assign(mesh.num_vertices(), -1);
  for (int e : fc.boundary_facets_)
    for (int k = 0; k < dim; ++k) fc.boundary_vertex_index_[fc.facets_[e].vertices[k]] = 0;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (fc.boundary_vertex_index_[v] >= 0) {
      fc.boundary_vertex_index_[v] = static_cast<int>(fc.boundary_vertices_.size());
      fc.boundary_vertices_.push_back(static_cast<int>(v));
    }
  }
  const std::size_t nb = fc.boundary_vertices_.size();
  std::vector<int> counts(nb + 1, 0);
  for (int e : fc.boundary_facets_)
    for (int k = 0; k < dim; ++k) ++counts[fc.boundary_vertex_index_[fc.facets_[e].vertices[k]] + 1];
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  fc.vertex_facet_offsets_ = counts;
  fc.vertex_facet_list_.assign(counts.back(), -1);
  std::vector<int> fill(counts.begin(), counts.end() - 1);
  for (int e : fc.boundary_facets_)
    for (int k = 0; k < dim; ++k)
      fc.vertex_facet_list_[fill[fc.boundary_vertex_index_[fc.facets_[e].vertices[k]]]++] = e;
  return fc;
}

SimplexMesh coarse_mesh(const SmoothDomain& domain) {
  std::vector<Point> verts;
  std::vector<Cell> cells;
  verts.push_back(Point::Zero());
  if (domain.dim() == 2) {
    for (int k = 0; k < 6; ++k) {
      const double t = M_PI * k / 3.0;
      verts.push_back(domain.project_to_boundary(Point(std::cos(t), std::sin(t), 0.0)));
    }
    for (int k = 0; k < 6; ++k) cells.push_back({0, k + 1, (k + 1) % 6 + 1, -1});
  } else {
    for (int axis = 0; axis < 3; ++axis) {
      for (double s : {1.0, -1.0}) {
        Point p = Point::Zero();
        p[axis] = s;
        verts.push_back(domain.project_to_boundary(p));
      }
    }
    // verts: 1:+x 2:-x 3:+y 4:-y 5:+z 6:-z
    for (int sx : {1, 2})
      for (int sy : {3, 4})
        for (int sz : {5, 6}) {
          Cell c{0, sx, sy, sz};
          std::array<Point, 4> p{verts[0], verts[sx], verts[sy], verts[sz]};
          if (signed_volume(3, p) < 0) std::swap(c[2], c[3]);
          cells.push_back(c);
        }
  }
  return SimplexMesh(domain.dim(), std::move(verts), std::move(cells));
}

SimplexMesh refine(const SimplexMesh& mesh, const SmoothDomain& domain, double min_regularity) {
  const int dim = mesh.dim();
  const FacetComplex facets = build_facets(mesh);

  std::unordered_map<std::uint64_t, bool> boundary_edge;
  for (int e : facets.boundary_facets()) {
    const Facet& f = facets.facet(e);
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) boundary_edge[edge_key(f.vertices[i], f.vertices[j])] = true;
  }

  std::vector<Point> verts(mesh.vertices().begin(), mesh.vertices().end());
  std::unordered_map<std::uint64_t, int> midpoint_of;
  auto midpoint = [&](int a, int b) {
    const std::uint64_t key = edge_key(a, b);
    if (auto it = midpoint_of.find(key); it != midpoint_of.end()) return it->second;
    Point m = 0.5 * (verts[a] + verts[b]);
    if (boundary_edge.count(key)) m = domain.project_to_boundary(m);
    const int id = static_cast<int>(verts.size());
    verts.push_back(m);
    midpoint_of.emplace(key, id);
    return id;
  };

  std::vector<Cell> cells;
  cells.reserve(mesh.num_cells() * (dim == 2 ? 4 : 8));
  for (const Cell& c : mesh.cells()) {
    if (dim == 2) {
      const int a = c[0], b = c[1], d = c[2];
      const int ab = midpoint(a, b), bd = midpoint(b, d), da = midpoint(d, a);
      cells.push_back({a, ab, da, -1});
      cells.push_back({ab, b, bd, -1});
      cells.push_back({da, bd, d, -1});
      cells.push_back({ab, bd, da, -1});
    } else {
      const int v0 = c[0], v1 = c[1], v2 = c[2], v3 = c[3];
      const int m01 = midpoint(v0, v1), m02 = midpoint(v0, v2), m03 = midpoint(v0, v3);
      const int m12 = midpoint(v1, v2), m13 = midpoint(v1, v3), m23 = midpoint(v2, v3);
      cells.push_back({v0, m01, m02, m03});
      cells.push_back({m01, v1, m12, m13});
      cells.push_back({m02, m12, v2, m23});
      cells.push_back({m03, m13, m23, v3});
      // Inner octahedron: split along its shortest diagonal. The remaining
      // four vertices form the equator, listed cyclically.
      const std::array<std::array<int, 6>, 3> choices{{
          {m01, m23, m02, m03, m13, m12},
          {m02, m13, m01, m12, m23, m03},
          {m03, m12, m01, m02, m23, m13},
      }};
      int best = 0;
      double best_len = std::numeric_limits<double>::infinity();
      for (int k = 0; k < 3; ++k) {
        const double len = (verts[choices[k][0]] - verts[choices[k][1]]).norm();
        if (len < best_len - 1e-14) {
          best_len = len;
          best = k;
        }
      }
      const auto& ch = choices[best];
      for (int k = 0; k < 4; ++k) {
        cells.push_back({ch[0], ch[1], ch[2 + k], ch[2 + (k + 1) % 4]});
      }
    }
  }

  const int nv = dim + 1;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::array<Point, 4> p;
    for (int i = 0; i < nv; ++i) p[i] = verts[cells[c][i]];
    const double vol = signed_volume(dim, std::span<const Point>(p.data(), nv));
    if (vol < 0) std::swap(cells[c][0], cells[c][1]);
    if (vol == 0.0) throw RegularityViolation("degenerate cell after refinement");
  }

  SimplexMesh out(dim, std::move(verts), std::move(cells));
  const double reg = out.min_regularity();
  if (reg < min_regularity) {
    throw RegularityViolation("min rho_T/h_T = " + std::to_string(reg) + " below " +
                              std::to_string(min_regularity));
  }
  return out;
}

QualityReport mesh_quality(const SimplexMesh& mesh, const FacetComplex& facets,
                           const SmoothDomain& domain) {
  QualityReport q;
  q.h = mesh.mesh_size();
  q.min_regularity = mesh.min_regularity();
  q.volume = mesh.total_volume();
  q.boundary_measure = facets.boundary_measure();
  const int dim = mesh.dim();
  constexpr int kSamples = 8;
  for (int e : facets.boundary_facets()) {
    const Facet& f = facets.facet(e);
    double worst = std::abs(domain.signed_distance(f.midpoint));
    // Barycentric lattice of step 1/kSamples on the facet.
    for (int i = 0; i <= kSamples; ++i) {
      for (int j = 0; j + i <= kSamples; ++j) {
        if (dim == 2 && j > 0) break;
        const double l1 = static_cast<double>(i) / kSamples;
        const double l2 = static_cast<double>(j) / kSamples;
        Point x = (1.0 - l1 - l2) * mesh.vertex(f.vertices[0]) + l1 * mesh.vertex(f.vertices[1]);
        if (dim == 3) x += l2 * mesh.vertex(f.vertices[2]);
        worst = std::max(worst, std::abs(domain.signed_distance(x)));
      }
    }
    q.max_skin = std::max(q.max_skin, worst);
    q.skin_constant = std::max(q.skin_constant, worst / (f.diameter * f.diameter));
  }
  return q;
}

}  // namespace crslip
