#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "crslip/geometry.hpp"

namespace crslip {

/// Vertex indices of an N-simplex. Slot N+1.. is -1 for triangles.
using Cell = std::array<int, 4>;

/// Conforming simplicial mesh of a polygon / polyhedron Omega_h.
///
/// Cells are stored positively oriented; the constructor computes per-cell
/// volume, diameter h_T and inscribed-ball diameter rho_T = 2N vol / surface.
class SimplexMesh {
 public:
  SimplexMesh() = default;
  /// Throws Error when a cell has non-positive signed volume.
  SimplexMesh(int dim, std::vector<Point> vertices, std::vector<Cell> cells);

  int dim() const { return dim_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size(); }

  const Point& vertex(std::size_t i) const { return vertices_[i]; }
  const Cell& cell(std::size_t c) const { return cells_[c]; }
  std::span<const Point> vertices() const { return vertices_; }
  std::span<const Cell> cells() const { return cells_; }

  double volume(std::size_t c) const { return volume_[c]; }
  double diameter(std::size_t c) const { return diameter_[c]; }
  double inball_diameter(std::size_t c) const { return inball_[c]; }
  Point barycenter(std::size_t c) const;
  /// Gradients of the N+1 barycentric coordinates on cell c.
  const std::array<Point, 4>& barycentric_gradients(std::size_t c) const { return grads_[c]; }
  /// Barycentric coordinates of x with respect to cell c (N+1 used entries).
  std::array<double, 4> barycentric(std::size_t c, const Point& x) const;
  /// Physical point with barycentric coordinates `lambda` in cell c.
  Point map_to_cell(std::size_t c, std::span<const double> lambda) const;

  /// Mesh size h = max_T h_T.
  double mesh_size() const { return h_; }
  double total_volume() const;
  /// min_T rho_T / h_T.
  double min_regularity() const;

  /// Set by import_mesh when at least one cell was re-oriented.
  bool orientation_repaired() const { return repaired_; }
  void set_orientation_repaired(bool v) { repaired_ = v; }

 private:
  int dim_ = 0;
  std::vector<Point> vertices_;
  std::vector<Cell> cells_;
  std::vector<double> volume_, diameter_, inball_;
  std::vector<std::array<Point, 4>> grads_;
  double h_ = 0.0;
  bool repaired_ = false;
};

/// Signed volume of the simplex spanned by the given vertices (N+1 points).
double signed_volume(int dim, std::span<const Point> vertices);

/// One edge (N = 2) or triangular face (N = 3) of the mesh.
struct Facet {
  std::array<int, 3> vertices{-1, -1, -1};  ///< sorted, N entries used
  /// Adjacent cells. Interior: cells[0] < cells[1] and the normal points
  /// from cells[0] into cells[1]. Boundary: cells[1] == -1.
  std::array<int, 2> cells{-1, -1};
  /// Local index (in each adjacent cell) of the vertex opposite the facet.
  std::array<int, 2> opposite{-1, -1};
  Point midpoint = Point::Zero();
  double measure = 0.0;
  double diameter = 0.0;
  /// n_e for interior facets, outward n_h for boundary facets.
  Point normal = Point::Zero();
  int boundary_index = -1;  ///< position in boundary_facets(), -1 if interior

  bool is_boundary() const { return cells[1] < 0; }
};

/// Facet complex E_h of a mesh together with cell/facet and boundary
/// vertex incidences.
class FacetComplex {
 public:
  FacetComplex() = default;

  const SimplexMesh& mesh() const { return *mesh_; }
  int dim() const { return mesh_->dim(); }

  std::size_t num_facets() const { return facets_.size(); }
  const Facet& facet(std::size_t e) const { return facets_[e]; }
  std::span<const Facet> facets() const { return facets_; }

  /// Facet of cell c opposite its local vertex i.
  int cell_facet(std::size_t c, int i) const { return cell_facets_[c][i]; }

  /// Boundary facets E_h^partial in a fixed order.
  std::span<const int> boundary_facets() const { return boundary_facets_; }
  std::size_t num_boundary_facets() const { return boundary_facets_.size(); }
  std::size_t num_interior_facets() const { return facets_.size() - boundary_facets_.size(); }

  /// Vertices lying on Gamma_h, in increasing order.
  std::span<const int> boundary_vertices() const { return boundary_vertices_; }
  bool is_boundary_vertex(std::size_t v) const { return boundary_vertex_index_[v] >= 0; }
  /// Position of vertex v in boundary_vertices(), -1 for interior vertices.
  int boundary_vertex_index(std::size_t v) const { return boundary_vertex_index_[v]; }
  /// Boundary facets E_h^partial(p) containing boundary vertex v (facet ids).
  std::span<const int> boundary_facets_at(std::size_t v) const;
  /// Boundary facets sharing at least one vertex with boundary facet e
  /// (E_h^partial(e), e itself included).
  std::vector<int> boundary_neighbours(std::size_t e) const;

  /// |Gamma_h|.
  double boundary_measure() const;

 private:
  friend FacetComplex build_facets(const SimplexMesh& mesh);

  const SimplexMesh* mesh_ = nullptr;
  std::vector<Facet> facets_;
  std::vector<std::array<int, 4>> cell_facets_;
  std::vector<int> boundary_facets_;
  std::vector<int> boundary_vertices_;
  std::vector<int> boundary_vertex_index_;
  std::vector<int> vertex_facet_offsets_;
  std::vector<int> vertex_facet_list_;
};

/// Builds the facet complex. Throws NonManifold if a facet has more than
/// two adjacent cells. The mesh must outlive the returned complex.
FacetComplex build_facets(const SimplexMesh& mesh);

/// Hexagon fan (disk) or octahedron fan (ball) with all boundary vertices on
/// the boundary of `domain`.
SimplexMesh coarse_mesh(const SmoothDomain& domain);

/// Uniform red refinement (2^N children per cell). Midpoints of edges lying on
/// Gamma_h are projected onto Gamma. Throws RegularityViolation when the
/// refined mesh has min rho_T/h_T below `min_regularity`.
SimplexMesh refine(const SimplexMesh& mesh, const SmoothDomain& domain,
                   double min_regularity = 0.15);

struct QualityReport {
  double h = 0.0;
  double min_regularity = 0.0;   ///< min_T rho_T / h_T
  double max_skin = 0.0;         ///< max over boundary facets of max_{x in e} |d(x)|
  double skin_constant = 0.0;    ///< max_e (max_{x in e} |d(x)|) / h_e^2
  double volume = 0.0;           ///< |Omega_h|
  double boundary_measure = 0.0; ///< |Gamma_h|
};

QualityReport mesh_quality(const SimplexMesh& mesh, const FacetComplex& facets,
                           const SmoothDomain& domain);

/// Text format:
///   DIM N
///   VERTICES k      followed by k lines of N coordinates
///   CELLS m         followed by m lines of N+1 zero-based vertex indices
/// '#' starts a comment; blank lines are ignored.
std::string export_mesh(const SimplexMesh& mesh);
/// Throws ParseError with the offending line number. Negatively oriented
/// cells are flipped and flagged through orientation_repaired().
SimplexMesh import_mesh(const std::string& text);

}  // namespace crslip
