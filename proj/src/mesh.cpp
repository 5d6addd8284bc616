#include "mplg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mplg {

namespace {

constexpr double kInsideTol = 1e-12;

// Sub-simplex vertex offsets on the unit cube, one table per dimension.
// 2D: both triangles of the same-diagonal split, counterclockwise.
// 3D: Kuhn tetrahedra indexed by the lexicographic permutation list; odd
// permutations have their last two vertices swapped to keep the signed
// volume positive.
const std::array<std::array<std::array<int, 3>, 4>, 1> kOffsets1d = {{
    {{{0, 0, 0}, {1, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
}};

const std::array<std::array<std::array<int, 3>, 4>, 2> kOffsets2d = {{
    {{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 0, 0}}},  // xi >= eta
    {{{0, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 0}}},  // eta >= xi
}};

// mirrored split (diagonal from (1,0) to (0,1)), used on odd squares of the
// alternating pattern; both counterclockwise
const std::array<std::array<std::array<int, 3>, 4>, 2> kOffsets2dMirrored = {{
    {{{1, 0, 0}, {0, 1, 0}, {0, 0, 0}, {0, 0, 0}}},  // xi + eta <= 1
    {{{1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 0}}},  // xi + eta >= 1
}};

constexpr std::array<std::array<int, 3>, 6> kPermutations = {{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

int permutation_sign(const std::array<int, 3>& p) {
  int inversions = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (p[i] > p[j]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

std::array<std::array<std::array<int, 3>, 4>, 6> make_offsets_3d() {
  std::array<std::array<std::array<int, 3>, 4>, 6> out{};
  for (int t = 0; t < 6; ++t) {
    const auto& perm = kPermutations[t];
    std::array<int, 3> pos = {0, 0, 0};
    out[t][0] = pos;
    for (int step = 0; step < 3; ++step) {
      pos[perm[step]] += 1;
      out[t][1 + step] = pos;
    }
    if (permutation_sign(perm) < 0) std::swap(out[t][2], out[t][3]);
  }
  return out;
}

const auto kOffsets3d = make_offsets_3d();

const std::array<int, 3>* type_offsets(int dim, int type) {
  switch (dim) {
    case 1:
      return kOffsets1d[0].data();
    case 2:
      return type < 2 ? kOffsets2d[type].data()
                      : kOffsets2dMirrored[type - 2].data();
    default:
      return kOffsets3d[type].data();
  }
}

// Invert the (d+1)x(d+1) node matrix [1 | xi] to get the affine barycentric
// map of one sub-simplex type. Entries are small integers; plain Gauss
// elimination with partial pivoting is exact enough.
std::array<std::array<double, 4>, 4> invert_node_matrix(
    int dim, const std::array<int, 3>* offsets) {
  const int n = dim + 1;
  double a[4][8] = {};
  for (int i = 0; i < n; ++i) {
    a[i][0] = 1.0;
    for (int j = 0; j < dim; ++j) a[i][1 + j] = offsets[i][j];
    a[i][n + i] = 1.0;
  }
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    for (int c = 0; c < 2 * n; ++c) std::swap(a[col][c], a[pivot][c]);
    const double inv = 1.0 / a[col][col];
    for (int c = 0; c < 2 * n; ++c) a[col][c] *= inv;
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (int c = 0; c < 2 * n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  // lambda = inv(node_matrix)^T [1, xi]; store row i of the map as the
  // coefficients of lambda_i.
  std::array<std::array<double, 4>, 4> map{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) map[i][j] = a[j][n + i];
  return map;
}

}  // namespace

Mesh::Mesh(const Domain& domain, int division, DiagonalPattern pattern)
    : domain_(domain), division_(division), pattern_(pattern) {
  if (domain.dim < 1 || domain.dim > 3)
    throw std::invalid_argument("Mesh: dim must be 1, 2 or 3");
  if (division < 1) throw std::invalid_argument("Mesh: division must be >= 1");
  for (int i = 0; i < domain.dim; ++i)
    if (!(domain.lower[i] < domain.upper[i]))
      throw std::invalid_argument("Mesh: lower must be below upper");
  for (int i = 1; i < domain.dim; ++i)
    if (domain.upper[i] - domain.lower[i] !=
        domain.upper[0] - domain.lower[0])
      throw std::invalid_argument("Mesh: box must have equal extents");

  width_ = (domain.upper[0] - domain.lower[0]) / division;
  cells_per_cube_ = domain.dim == 1 ? 1 : (domain.dim == 2 ? 2 : 6);
  int cubes = 1;
  for (int i = 0; i < domain.dim; ++i) cubes *= division;
  cell_total_ = cubes * cells_per_cube_;

  build_vertices();
  build_cells();
  build_bary_maps();
  build_boundary_facets();
}

int Mesh::vertex_index(int i0, int i1, int i2) const {
  const int m = division_ + 1;
  return i0 + m * (i1 + m * i2);
}

void Mesh::build_vertices() {
  const int d = domain_.dim;
  const int m = division_ + 1;
  int count = 1;
  for (int i = 0; i < d; ++i) count *= m;
  vertices_.resize(count);
  vertex_lattice_.resize(count);
  const int n1 = d >= 2 ? m : 1;
  const int n2 = d >= 3 ? m : 1;
  for (int i2 = 0; i2 < n2; ++i2)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i0 = 0; i0 < m; ++i0) {
        const int v = vertex_index(i0, i1, i2);
        vertex_lattice_[v] = {i0, i1, i2};
        Point p = origin();
        p[0] = domain_.lower[0] + width_ * i0;
        if (d >= 2) p[1] = domain_.lower[1] + width_ * i1;
        if (d >= 3) p[2] = domain_.lower[2] + width_ * i2;
        vertices_[v] = p;
      }
}

bool Mesh::mirrored_cube(int c0, int c1, int c2) const {
  if (domain_.dim != 2 || pattern_ != DiagonalPattern::Alternating)
    return false;
  return ((c0 + c1 + c2) & 1) != 0;
}

void Mesh::build_cells() {
  const int d = domain_.dim;
  const int n = division_;
  cells_.reserve(static_cast<std::size_t>(cell_total_) * (d + 1));
  const int n1 = d >= 2 ? n : 1;
  const int n2 = d >= 3 ? n : 1;
  for (int i2 = 0; i2 < n2; ++i2)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i0 = 0; i0 < n; ++i0) {
        const int base = mirrored_cube(i0, i1, i2) ? 2 : 0;
        for (int t = 0; t < cells_per_cube_; ++t) {
          const auto* offsets = type_offsets(d, base + t);
          for (int v = 0; v < d + 1; ++v)
            cells_.push_back(vertex_index(i0 + offsets[v][0],
                                          i1 + offsets[v][1],
                                          i2 + offsets[v][2]));
        }
      }
}

void Mesh::build_bary_maps() {
  int types = cells_per_cube_;
  if (domain_.dim == 2 && pattern_ == DiagonalPattern::Alternating)
    types = 4;
  bary_maps_.resize(types);
  for (int t = 0; t < types; ++t)
    bary_maps_[t] =
        invert_node_matrix(domain_.dim, type_offsets(domain_.dim, t));
}

int Mesh::cell_type(int cell) const {
  const int local = cell % cells_per_cube_;
  if (type_count() == cells_per_cube_) return local;
  const int cube = cell / cells_per_cube_;
  const int n = division_;
  const int c0 = cube % n;
  const int c1 = (cube / n) % n;
  return mirrored_cube(c0, c1, 0) ? 2 + local : local;
}

Point Mesh::lambda_gradient(int type, int i) const {
  Point g = origin();
  for (int j = 0; j < domain_.dim; ++j)
    g[j] = bary_maps_[type][i][1 + j] / width_;
  return g;
}

void Mesh::build_boundary_facets() {
  const int d = domain_.dim;
  const double tol = 1e-12 * width_;
  for (int cell = 0; cell < cell_total_; ++cell) {
    auto verts = cell_vertices(cell);
    for (int opposite = 0; opposite < d + 1; ++opposite) {
      for (int axis = 0; axis < d; ++axis) {
        for (int side = 0; side < 2; ++side) {
          const double plane =
              side == 0 ? domain_.lower[axis] : domain_.upper[axis];
          bool on_face = true;
          for (int v = 0; v < d + 1; ++v) {
            if (v == opposite) continue;
            if (std::abs(vertices_[verts[v]][axis] - plane) > tol) {
              on_face = false;
              break;
            }
          }
          if (!on_face) continue;
          BoundaryFacet facet;
          facet.vertex_count = d;
          int k = 0;
          for (int v = 0; v < d + 1; ++v)
            if (v != opposite) facet.vertices[k++] = verts[v];
          facet.axis = axis;
          facet.side = side;
          facet.cell = cell;
          boundary_facets_.push_back(facet);
        }
      }
    }
  }
}

std::span<const int> Mesh::cell_vertices(int cell) const {
  const int n = domain_.dim + 1;
  return {cells_.data() + static_cast<std::size_t>(cell) * n,
          static_cast<std::size_t>(n)};
}

double Mesh::cell_volume() const {
  double cube = 1.0;
  for (int i = 0; i < domain_.dim; ++i) cube *= width_;
  return cube / cells_per_cube_;
}

double Mesh::signed_cell_volume(int cell) const {
  const int d = domain_.dim;
  auto verts = cell_vertices(cell);
  const Point& p0 = vertices_[verts[0]];
  double b[3][3] = {};
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) b[i][j] = vertices_[verts[j + 1]][i] - p0[i];
  double det;
  if (d == 1) {
    det = b[0][0];
  } else if (d == 2) {
    det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
  } else {
    det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
          b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
          b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  }
  double factorial = d == 3 ? 6.0 : (d == 2 ? 2.0 : 1.0);
  return det / factorial;
}

double Mesh::h() const {
  switch (domain_.dim) {
    case 1: return width_;
    case 2: return width_ * std::sqrt(2.0);   // same-diagonal split
    default: return width_ * std::sqrt(3.0);  // Kuhn main diagonal
  }
}

int Mesh::sub_simplex(const double* local, bool mirrored) const {
  const int d = domain_.dim;
  if (d == 1) return 0;
  if (d == 2) {
    if (mirrored) return local[0] + local[1] <= 1.0 ? 0 : 1;
    return local[0] >= local[1] ? 0 : 1;
  }
  for (int t = 0; t < 6; ++t) {
    const auto& p = kPermutations[t];
    if (local[p[0]] >= local[p[1]] && local[p[1]] >= local[p[2]]) return t;
  }
  return 0;  // unreachable for finite input
}

CellLocation Mesh::locate(const Point& x) const {
  const int d = domain_.dim;
  const int n = division_;
  int lattice[3] = {0, 0, 0};
  double local[3] = {0.0, 0.0, 0.0};
  double clamped_local[3] = {0.0, 0.0, 0.0};
  for (int i = 0; i < d; ++i) {
    const double clamped =
        std::min(std::max(x[i], domain_.lower[i]), domain_.upper[i]);
    int idx = static_cast<int>((clamped - domain_.lower[i]) / width_);
    idx = std::min(std::max(idx, 0), n - 1);
    lattice[i] = idx;
    const double corner = domain_.lower[i] + width_ * idx;
    local[i] = (x[i] - corner) / width_;
    clamped_local[i] = (clamped - corner) / width_;
  }
  const bool mirrored = mirrored_cube(lattice[0], lattice[1], lattice[2]);
  const int local_idx = sub_simplex(clamped_local, mirrored);
  const int type = mirrored ? 2 + local_idx : local_idx;
  int cube = lattice[0];
  if (d >= 2) cube = cube + n * lattice[1];
  if (d >= 3) cube = lattice[0] + n * (lattice[1] + n * lattice[2]);

  CellLocation loc;
  loc.cell_index = cube * cells_per_cube_ + local_idx;
  const auto& map = bary_maps_[type];
  loc.inside = true;
  for (int i = 0; i < d + 1; ++i) {
    double lambda = map[i][0];
    for (int j = 0; j < d; ++j) lambda += map[i][1 + j] * local[j];
    loc.barycentric[i] = lambda;
    if (lambda < -kInsideTol) loc.inside = false;
  }
  return loc;
}

std::array<double, 4> Mesh::barycentric(int cell, const Point& x) const {
  const int d = domain_.dim;
  auto verts = cell_vertices(cell);
  // Express x in the cell's cube-local coordinates, then reuse the affine map
  // of the cell's type.
  const int type = cell_type(cell);
  const Point& anchor = vertices_[verts[0]];
  const auto* offsets = type_offsets(d, type);
  double local[3] = {0.0, 0.0, 0.0};
  for (int i = 0; i < d; ++i) {
    const double corner = anchor[i] - width_ * offsets[0][i];
    local[i] = (x[i] - corner) / width_;
  }
  const auto& map = bary_maps_[type];
  std::array<double, 4> bary{};
  for (int i = 0; i < d + 1; ++i) {
    double lambda = map[i][0];
    for (int j = 0; j < d; ++j) lambda += map[i][1 + j] * local[j];
    bary[i] = lambda;
  }
  return bary;
}

Point Mesh::from_barycentric(int cell, std::span<const double> bary) const {
  auto verts = cell_vertices(cell);
  Point p = origin();
  for (int v = 0; v < static_cast<int>(verts.size()); ++v)
    for (int i = 0; i < domain_.dim; ++i)
      p[i] += bary[v] * vertices_[verts[v]][i];
  return p;
}

MeshStatistics Mesh::statistics() const {
  return {h(), cell_count(), vertex_count()};
}

Mesh build_box_mesh(int dim, int division, DiagonalPattern pattern) {
  Domain domain;
  domain.dim = dim;
  return Mesh(domain, division, pattern);
}

CellLocation locate_point(const Mesh& mesh, const Point& x) {
  return mesh.locate(x);
}

MeshStatistics mesh_statistics(const Mesh& mesh) { return mesh.statistics(); }

MeshTopology::MeshTopology(const Mesh& mesh) : mesh_(mesh) {
  const int d = mesh.dim();
  neighbors_.assign(mesh.cell_count(), {-1, -1, -1, -1});
  // facet key: sorted vertex ids of the facet opposite a local vertex
  std::map<std::array<int, 3>, std::pair<int, int>> facets;
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    auto verts = mesh.cell_vertices(cell);
    for (int opposite = 0; opposite < d + 1; ++opposite) {
      std::array<int, 3> key = {-1, -1, -1};
      int k = 0;
      for (int v = 0; v < d + 1; ++v)
        if (v != opposite) key[k++] = verts[v];
      std::sort(key.begin(), key.begin() + d);
      auto [it, inserted] = facets.try_emplace(key, cell, opposite);
      if (!inserted) {
        const auto [other_cell, other_opposite] = it->second;
        if (other_cell < 0) {
          consistent_ = false;  // facet shared by three cells
          continue;
        }
        neighbors_[cell][opposite] = other_cell;
        neighbors_[other_cell][other_opposite] = cell;
        it->second = {-1, -1};
        ++interior_facets_;
      }
    }
  }
  for (const auto& [key, value] : facets)
    if (value.first >= 0) ++boundary_facets_;
  consistent_ = consistent_ &&
                boundary_facets_ ==
                    static_cast<int>(mesh.boundary_facets().size());
}

CellLocation MeshTopology::walk_locate(const Point& x, int start_cell) const {
  const int d = mesh_.dim();
  int cell = start_cell;
  int previous = -1;
  for (int step = 0; step < 4 * mesh_.cell_count() + 4; ++step) {
    auto bary = mesh_.barycentric(cell, x);
    int worst = 0;
    for (int i = 1; i < d + 1; ++i)
      if (bary[i] < bary[worst]) worst = i;
    if (bary[worst] >= -1e-12) {
      CellLocation loc;
      loc.cell_index = cell;
      loc.barycentric = bary;
      loc.inside = true;
      return loc;
    }
    const int next = neighbors_[cell][worst];
    if (next < 0 || next == previous) {
      CellLocation loc;
      loc.cell_index = cell;
      loc.barycentric = bary;
      loc.inside = false;
      return loc;
    }
    previous = cell;
    cell = next;
  }
  throw std::runtime_error("walk_locate: walk did not terminate");
}

}  // namespace mplg
