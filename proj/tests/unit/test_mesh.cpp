#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "crslip/errors.hpp"
#include "crslip/mesh.hpp"

using namespace crslip;

namespace {

const BallDomain disk(DomainKind::disk2d);
const BallDomain ball(DomainKind::ball3d);

std::vector<SimplexMesh> hierarchy(const SmoothDomain& d, int levels) {
  std::vector<SimplexMesh> out{coarse_mesh(d)};
  for (int l = 1; l < levels; ++l) out.push_back(refine(out.back(), d));
  return out;
}

// |Omega_h| from the divergence theorem: (1/N) sum_e |e| (m_e . n_h).
double volume_from_boundary(const FacetComplex& f) {
  double s = 0.0;
  for (int e : f.boundary_facets()) s += f.facet(e).measure * f.facet(e).midpoint.dot(f.facet(e).normal);
  return s / f.dim();
}

}  // namespace

TEST(CoarseMesh, HexagonFan) {
  const SimplexMesh m = coarse_mesh(disk);
  EXPECT_EQ(m.num_vertices(), 7u);
  EXPECT_EQ(m.num_cells(), 6u);
  EXPECT_NEAR(m.total_volume(), 3.0 * std::sqrt(3.0) / 2.0, 1e-14);
  const FacetComplex f = build_facets(m);
  EXPECT_EQ(f.num_facets(), 12u);
  EXPECT_EQ(f.num_boundary_facets(), 6u);
  EXPECT_EQ(f.num_interior_facets(), 6u);
  for (int v : f.boundary_vertices()) EXPECT_NEAR(m.vertex(v).norm(), 1.0, 1e-15);
  // Euler: V - E + F = 1.
  EXPECT_EQ(static_cast<long>(m.num_vertices()) - static_cast<long>(f.num_facets()) +
                static_cast<long>(m.num_cells()),
            1);
}

TEST(CoarseMesh, OctahedronFan) {
  const SimplexMesh m = coarse_mesh(ball);
  EXPECT_EQ(m.num_vertices(), 7u);
  EXPECT_EQ(m.num_cells(), 8u);
  EXPECT_NEAR(m.total_volume(), 4.0 / 3.0, 1e-14);
  const FacetComplex f = build_facets(m);
  EXPECT_EQ(f.num_boundary_facets(), 8u);
  EXPECT_EQ(f.boundary_vertices().size(), 6u);
  for (int v : f.boundary_vertices()) EXPECT_NEAR(m.vertex(v).norm(), 1.0, 1e-15);
}

TEST(Refine, CountsAndProjection) {
  for (const SmoothDomain* d : {static_cast<const SmoothDomain*>(&disk), static_cast<const SmoothDomain*>(&ball)}) {
    const auto ms = hierarchy(*d, d->dim() == 2 ? 5 : 3);
    const std::size_t factor = d->dim() == 2 ? 4 : 8;
    for (std::size_t l = 1; l < ms.size(); ++l) {
      EXPECT_EQ(ms[l].num_cells(), factor * ms[l - 1].num_cells());
      const FacetComplex f = build_facets(ms[l]);
      for (int v : f.boundary_vertices()) EXPECT_LE(std::abs(d->signed_distance(ms[l].vertex(v))), 1e-12);
      for (std::size_t c = 0; c < ms[l].num_cells(); ++c) EXPECT_GT(ms[l].volume(c), 0.0);
    }
  }
}

TEST(Refine, HexagonFanToTwentyFour) {
  EXPECT_EQ(refine(coarse_mesh(disk), disk).num_cells(), 24u);
}

TEST(Refine, MeshSizeRoughlyHalves) {
  const auto ms = hierarchy(disk, 7);
  // Projecting the boundary midpoints of the hexagon stretches the edge
  // from an interior midpoint to a projected one.
  EXPECT_NEAR(ms[1].mesh_size(), std::sqrt(1.25 - std::cos(std::numbers::pi / 6.0)), 1e-12);
  for (std::size_t l = 2; l < ms.size(); ++l) {
    const double r = ms[l].mesh_size() / ms[l - 1].mesh_size();
    EXPECT_GE(r, 0.45);
    EXPECT_LE(r, 0.60);
  }
}

TEST(Refine, RegularityDoesNotDegrade) {
  // Measured from the first mesh of a study hierarchy (3 base refinements in
  // 2D, 2 in 3D); the fans themselves lose more on the first steps.
  for (const SmoothDomain* d : {static_cast<const SmoothDomain*>(&disk), static_cast<const SmoothDomain*>(&ball)}) {
    const int base = d->dim() == 2 ? 3 : 2;
    const auto ms = hierarchy(*d, d->dim() == 2 ? 8 : 5);
    const double first = ms[base].min_regularity();
    for (std::size_t l = 0; l < ms.size(); ++l) {
      EXPECT_GE(ms[l].min_regularity(), 0.15) << "dim " << d->dim();
      if (static_cast<int>(l) >= base) {
        EXPECT_GE(ms[l].min_regularity(), 0.8 * first) << "dim " << d->dim();
      }
    }
  }
}

TEST(Refine, RedRefinementOfCornerTetrahedronLosesQuality) {
  // Inner-octahedron children of the corner tetrahedron (0, e1, e2, e3)
  // reach 0.695 of the parent quality; all three diagonals tie.
  const SimplexMesh m = refine(coarse_mesh(ball), ball);
  EXPECT_NEAR(coarse_mesh(ball).min_regularity(), 0.298858, 1e-6);
  EXPECT_LT(m.min_regularity(), 0.8 * coarse_mesh(ball).min_regularity());
}

TEST(Refine, RegularityViolationThrows) {
  EXPECT_THROW(refine(coarse_mesh(disk), disk, 0.99), RegularityViolation);
}

TEST(Facets, OrientationConventions) {
  const auto ms = hierarchy(ball, 2);
  for (const SimplexMesh& m : {coarse_mesh(disk), refine(coarse_mesh(disk), disk), ms[1]}) {
    const FacetComplex f = build_facets(m);
    std::size_t boundary = 0;
    for (std::size_t e = 0; e < f.num_facets(); ++e) {
      const Facet& fc = f.facet(e);
      EXPECT_NEAR(fc.normal.norm(), 1.0, 1e-14);
      const Point c0 = m.barycenter(fc.cells[0]);
      EXPECT_GT(fc.normal.dot(fc.midpoint - c0), 0.0);
      if (fc.is_boundary()) {
        ++boundary;
        EXPECT_EQ(f.boundary_facets()[fc.boundary_index], static_cast<int>(e));
      } else {
        EXPECT_LT(fc.cells[0], fc.cells[1]);
        EXPECT_GT(fc.normal.dot(m.barycenter(fc.cells[1]) - fc.midpoint), 0.0);
      }
      for (int s = 0; s < (fc.is_boundary() ? 1 : 2); ++s)
        EXPECT_EQ(f.cell_facet(fc.cells[s], fc.opposite[s]), static_cast<int>(e));
    }
    EXPECT_EQ(boundary, f.num_boundary_facets());
  }
}

TEST(Facets, HexagonBoundaryNormalsPointOutward) {
  const SimplexMesh m = coarse_mesh(disk);
  const FacetComplex f = build_facets(m);
  for (int e : f.boundary_facets()) {
    const Facet& fc = f.facet(e);
    EXPECT_GT(fc.normal.dot(fc.midpoint), 0.0);
    EXPECT_NEAR((fc.normal - fc.midpoint / fc.midpoint.norm()).norm(), 0.0, 1e-15);
    EXPECT_NEAR(fc.measure, 1.0, 1e-15);
  }
}

TEST(Facets, NonManifoldThrows) {
  // Three triangles sharing the edge (0, 1).
  std::vector<Point> v{Point(0, 0, 0), Point(1, 0, 0), Point(0.5, 1, 0), Point(0.5, -1, 0), Point(0.5, 2, 0)};
  std::vector<Cell> c{{0, 1, 2, -1}, {1, 0, 3, -1}, {0, 1, 4, -1}};
  const SimplexMesh m(2, v, c);
  EXPECT_THROW(build_facets(m), NonManifold);
}

TEST(Facets, BoundaryIncidence) {
  const SimplexMesh m = refine(coarse_mesh(disk), disk);
  const FacetComplex f = build_facets(m);
  for (int v : f.boundary_vertices()) EXPECT_EQ(f.boundary_facets_at(v).size(), 2u);
  for (int e : f.boundary_facets()) EXPECT_EQ(f.boundary_neighbours(e).size(), 3u);
  EXPECT_TRUE(f.boundary_facets_at(0).empty() || f.is_boundary_vertex(0));
}

TEST(Quality, EquilateralTriangle) {
  std::vector<Point> v{Point(0, 0, 0), Point(1, 0, 0), Point(0.5, std::sqrt(3.0) / 2, 0)};
  const SimplexMesh m(2, v, {{0, 1, 2, -1}});
  EXPECT_NEAR(m.min_regularity(), 1.0 / std::sqrt(3.0), 1e-15);
}

TEST(Quality, RegularTetrahedron) {
  std::vector<Point> v{Point(1, 1, 1), Point(1, -1, -1), Point(-1, 1, -1), Point(-1, -1, 1)};
  std::vector<Cell> c{{0, 1, 2, 3}};
  if (signed_volume(3, std::vector<Point>{v[0], v[1], v[2], v[3]}) < 0) c = {{1, 0, 2, 3}};
  const SimplexMesh m(3, v, c);
  // rho = edge / sqrt(6), h = edge.
  EXPECT_NEAR(m.min_regularity(), 1.0 / std::sqrt(6.0), 1e-14);
}

TEST(Quality, HexagonSag) {
  const SimplexMesh m = coarse_mesh(disk);
  const QualityReport q = mesh_quality(m, build_facets(m), disk);
  EXPECT_NEAR(q.max_skin, 1.0 - std::sqrt(0.75), 1e-15);
  EXPECT_NEAR(q.boundary_measure, 6.0, 1e-14);
  EXPECT_NEAR(q.h, 1.0, 1e-15);
}

TEST(Quality, AreaIncreasesToPi) {
  const auto ms = hierarchy(disk, 6);
  double prev = 0.0;
  for (const auto& m : ms) {
    EXPECT_GT(m.total_volume(), prev);
    EXPECT_LT(m.total_volume(), M_PI);
    prev = m.total_volume();
  }
  EXPECT_NEAR(prev, M_PI, 2e-3);
}

TEST(Quality, SkinConstantBounded) {
  const auto ms = hierarchy(disk, 6);
  double lo = 1e300, hi = 0.0;
  for (const auto& m : ms) {
    const QualityReport q = mesh_quality(m, build_facets(m), disk);
    lo = std::min(lo, q.skin_constant);
    hi = std::max(hi, q.skin_constant);
  }
  EXPECT_LT(hi, 0.2);
  EXPECT_LT(hi / lo, 1.5);
}

TEST(Quality, VolumeMatchesDivergenceTheorem) {
  for (const SimplexMesh& m : {hierarchy(disk, 4).back(), hierarchy(ball, 3).back()}) {
    const FacetComplex f = build_facets(m);
    EXPECT_NEAR(volume_from_boundary(f) / m.total_volume(), 1.0, 1e-12);
  }
}

TEST(MeshIO, RoundTrip) {
  for (const SimplexMesh& m : {refine(coarse_mesh(disk), disk), refine(coarse_mesh(ball), ball)}) {
    const std::string text = export_mesh(m);
    const SimplexMesh back = import_mesh(text);
    ASSERT_EQ(back.num_vertices(), m.num_vertices());
    ASSERT_EQ(back.num_cells(), m.num_cells());
    for (std::size_t i = 0; i < m.num_vertices(); ++i) EXPECT_EQ(back.vertex(i), m.vertex(i));
    for (std::size_t c = 0; c < m.num_cells(); ++c) EXPECT_EQ(back.cell(c), m.cell(c));
    EXPECT_FALSE(back.orientation_repaired());
    EXPECT_EQ(export_mesh(back), text);
  }
}

TEST(MeshIO, HexagonLineCounts) {
  const std::string text = export_mesh(coarse_mesh(disk));
  std::istringstream is(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(is, line))
    if (!line.empty()) lines.push_back(line);
  ASSERT_EQ(lines.size(), 2u + 7u + 1u + 6u);
  EXPECT_EQ(lines[0], "DIM 2");
  EXPECT_EQ(lines[1], "VERTICES 7");
  EXPECT_EQ(lines[9], "CELLS 6");
}

TEST(MeshIO, CommentsAndInvertedCell) {
  const std::string text =
      "# unit right triangle, listed clockwise\n"
      "DIM 2\n\nVERTICES 3\n0 0\n0 1   # top\n1 0\nCELLS 1\n0 1 2\n";
  const SimplexMesh m = import_mesh(text);
  EXPECT_TRUE(m.orientation_repaired());
  EXPECT_NEAR(m.volume(0), 0.5, 1e-15);
}

TEST(MeshIO, ParseErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& t) -> std::size_t {
    try {
      import_mesh(t);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("DIM 4\n"), 1u);
  EXPECT_EQ(line_of("DIM 2\nVERTICES x\n"), 2u);
  EXPECT_EQ(line_of("DIM 2\nVERTICES 3\n0 0\n0 1\n1 zero\n"), 5u);
  EXPECT_EQ(line_of("DIM 2\nVERTICES 3\n0 0\n0 1\n1 0\nCELLS 1\n0 1 7\n"), 7u);
  EXPECT_EQ(line_of("DIM 2\nVERTICES 3\n0 0\n0 1\n1 0\nCELLS 1\n0 1 1\n"), 7u);
  EXPECT_EQ(line_of("DIM 2\nVERTICES 3\n0 0\n0 1\n1 0\nCELLS 2\n0 1 2\n"), 8u);
  EXPECT_EQ(line_of("DIM 2\nVERTICES 3\n0 0\n0 1\n1 0\nCELLS 1\n0 1 2\n5 5\n"), 8u);
}
