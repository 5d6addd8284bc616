#pragma once

#include <array>
#include <map>
#include <span>
#include <vector>

#include "mplg/types.hpp"

namespace mplg {

/// Axis-aligned box domain. The benchmark experiments use (-1,1)^d.
struct Domain {
  int dim = 1;
  Point lower = {-1.0, -1.0, -1.0};
  Point upper = {1.0, 1.0, 1.0};
};

/// 2D square-splitting pattern (ignored for d = 1, 3). Uniform puts every
/// diagonal in the same direction; Alternating mirrors the split on odd
/// squares (the union-jack layout), which cancels most of the composed-term
/// quadrature drift for flows aligned with the diagonal.
enum class DiagonalPattern { Uniform, Alternating };

/// Result of point location: owning cell, barycentric coordinates with
/// respect to that cell's vertex order, and whether the point lies inside the
/// cell (all coordinates >= -1e-12). Exterior points carry the extrapolated
/// barycentric coordinates of the nearest (clamped) cell.
struct CellLocation {
  int cell_index = -1;
  std::array<double, 4> barycentric{};
  bool inside = false;
};

struct BoundaryFacet {
  std::array<int, 3> vertices{};  // d entries used
  int vertex_count = 0;
  int axis = 0;  // which coordinate is pinned to the box face
  int side = 0;  // 0 = lower face, 1 = upper face
  int cell = -1; // adjacent cell
};

struct MeshStatistics {
  double h = 0.0;  // maximum cell diameter
  int cell_count = 0;
  int vertex_count = 0;
};

/// Structured simplicial triangulation of a box: N intervals per axis;
/// squares split into 2 triangles along a diagonal; cubes split by the Kuhn
/// subdivision (6 tetrahedra). Immutable after construction; all queries are
/// const and reentrant.
class Mesh {
 public:
  Mesh(const Domain& domain, int division,
       DiagonalPattern pattern = DiagonalPattern::Uniform);

  int dim() const { return domain_.dim; }
  int division() const { return division_; }
  const Domain& domain() const { return domain_; }

  /// Lattice spacing (upper-lower)/N; equals 2/N on the benchmark box. This
  /// is the "h" the experiment couplings use.
  double grid_h() const { return width_; }
  /// Maximum cell diameter (equals grid_h in 1D only).
  double h() const;

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int cell_count() const { return cell_total_; }
  int vertices_per_cell() const { return domain_.dim + 1; }

  const Point& vertex(int v) const { return vertices_[v]; }
  std::span<const int> cell_vertices(int cell) const;
  const std::array<int, 3>& vertex_lattice(int v) const {
    return vertex_lattice_[v];
  }
  double cell_volume() const;  // all cells congruent on the structured grid
  double signed_cell_volume(int cell) const;

  /// Geometric type of a cell: index into the per-type tables (shape
  /// gradients, barycentric maps). Uniform grids have one type per local
  /// sub-simplex; the alternating 2D pattern doubles them.
  int cell_type(int cell) const;
  int type_count() const { return static_cast<int>(bary_maps_.size()); }
  /// Constant gradient of the barycentric coordinate lambda_i on cells of
  /// the given type.
  Point lambda_gradient(int type, int i) const;

  const std::vector<BoundaryFacet>& boundary_facets() const {
    return boundary_facets_;
  }

  /// O(1) locator via lattice arithmetic. Total: exterior points are clamped
  /// to the box for cell selection and reported with extrapolated
  /// barycentric coordinates and inside=false.
  CellLocation locate(const Point& x) const;

  /// Barycentric coordinates of x with respect to an arbitrary cell (affine,
  /// extrapolates outside the cell).
  std::array<double, 4> barycentric(int cell, const Point& x) const;

  /// Map barycentric coordinates in a cell back to the physical point.
  Point from_barycentric(int cell, std::span<const double> bary) const;

  MeshStatistics statistics() const;

 private:
  Domain domain_;
  int division_ = 0;
  DiagonalPattern pattern_ = DiagonalPattern::Uniform;
  double width_ = 0.0;     // lattice spacing per axis
  int cells_per_cube_ = 1;
  int cell_total_ = 0;
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> vertex_lattice_;
  std::vector<int> cells_;  // (d+1) vertex ids per cell, flat
  std::vector<BoundaryFacet> boundary_facets_;
  // Barycentric-from-local-coordinate affine maps, one per cell type:
  // lambda_i = map[i][0] + sum_j map[i][1+j] * xi_j.
  std::vector<std::array<std::array<double, 4>, 4>> bary_maps_;

  int vertex_index(int i0, int i1, int i2) const;
  bool mirrored_cube(int c0, int c1, int c2) const;
  void build_vertices();
  void build_cells();
  void build_boundary_facets();
  void build_bary_maps();
  int sub_simplex(const double* local, bool mirrored) const;
};

Mesh build_box_mesh(int dim, int division,
                    DiagonalPattern pattern = DiagonalPattern::Uniform);
CellLocation locate_point(const Mesh& mesh, const Point& x);
MeshStatistics mesh_statistics(const Mesh& mesh);

/// Facet connectivity derived on demand (diagnostics and the cell-walk
/// fallback locator; the solver hot path never needs it).
class MeshTopology {
 public:
  explicit MeshTopology(const Mesh& mesh);

  int interior_facet_count() const { return interior_facets_; }
  int boundary_facet_count() const { return boundary_facets_; }
  /// true when every facet belongs to one cell (boundary) or two (interior)
  bool facet_counts_consistent() const { return consistent_; }

  /// Walk from start_cell through the facet opposite the most negative
  /// barycentric coordinate until a containing cell is found. Exterior
  /// points stop at the boundary cell nearest the walk direction.
  CellLocation walk_locate(const Point& x, int start_cell = 0) const;

 private:
  const Mesh& mesh_;
  std::vector<std::array<int, 4>> neighbors_;  // per cell, per opposite vertex
  int interior_facets_ = 0;
  int boundary_facets_ = 0;
  bool consistent_ = true;
};

}  // namespace mplg
