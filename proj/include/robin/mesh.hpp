#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "robin/geometry.hpp"

namespace robin::mesh {

using geometry::BoundaryTag;
using geometry::TagSet;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

using Triangle = std::array<int, 3>;

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  BoundaryTag tag = BoundaryTag::RobinTop;
};

/// Conforming triangulation. Triangles are counterclockwise; boundary edges are
/// stored as one counterclockwise loop.
struct TriangleMesh {
  std::vector<Point> vertices;
  std::vector<Triangle> triangles;
  std::vector<BoundaryEdge> boundary_edges;

  /// Throws DegenerateGeometry if a triangle has non-positive area or the
  /// boundary is not a single closed loop of edges each owned by one triangle.
  void validate() const;

  double signed_area(const Triangle& t) const;
  double area() const;
  double boundary_length(TagSet tags) const;
  /// Number of distinct edges (interior and boundary).
  std::size_t edge_count() const;

  /// Copy with every coordinate multiplied by c; connectivity unchanged.
  TriangleMesh scaled(double c) const;
};

/// Horizontal refinement: cells inside [x0, x1] are `factor` times narrower.
struct RefineInterval {
  double x0 = 0.0;
  double x1 = 0.0;
  double factor = 1.0;
};

struct MeshPolicy {
  int nx = 32;
  /// Minimum number of layers; raised automatically so the top layer is at most first_layer.
  int ny = 8;
  double grading_ratio = 1.1;
  double first_layer = 0.25;
  std::vector<RefineInterval> local_refine;

  void validate() const;
};

/// Structured mapped mesh of a subgraph domain: vertical fibers, geometric
/// grading toward the top curve, each quad split along its shorter diagonal.
/// Vertices are numbered fiber-major from the left, bottom to top.
TriangleMesh generate_mapped_mesh(const geometry::PlanarDomain& domain, const MeshPolicy& policy);

/// Abscissas of the vertical fibers `generate_mapped_mesh` would use.
std::vector<double> fiber_abscissas(const geometry::PlanarDomain& domain, const MeshPolicy& policy);

/// Layer count actually used for a domain: max(policy.ny, layers needed for first_layer).
int layer_count(const geometry::PlanarDomain& domain, const MeshPolicy& policy);

/// Every triangle split into four by its edge midpoints. Parent vertices keep
/// their indices and coordinates; boundary tags are inherited.
TriangleMesh refine_uniform(const TriangleMesh& mesh);

/// Regular n-gon inscribed in the circle of the given radius, meshed with
/// `rings` concentric rings of n vertices around a centre fan. Every boundary
/// edge is tagged RobinTop.
TriangleMesh generate_polygon_disk_mesh(double radius, int n_sides, int rings);

struct MeshQuality {
  double min_angle_deg = 0.0;
  double max_aspect = 0.0;
  std::size_t n_vertices = 0;
  std::size_t n_triangles = 0;
};

/// Aspect ratio is longest edge over smallest altitude.
MeshQuality mesh_quality(const TriangleMesh& mesh);

/// `mesh v1` text dump: `v x y`, `t i j k`, `b i j TAG` lines, 0-based indices.
void write_mesh(std::ostream& out, const TriangleMesh& mesh);
TriangleMesh read_mesh(std::istream& in);

}  // namespace robin::mesh
