#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "hsurf/curvature.hpp"
#include "hsurf/parallel.hpp"

namespace hsurf {

struct GraphSolution;

/// Oriented triangle mesh with per-face area/normal caches, barycentric
/// lumped vertex areas, and the boundary edge list. Construction validates
/// that every interior edge is shared by exactly two faces with opposite
/// traversal. Immutable afterwards.
class TriMesh {
 public:
  static TriMesh create(std::vector<Eigen::Vector3d> vertices,
                        std::vector<std::array<int, 3>> faces);

  const std::vector<Eigen::Vector3d>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& faces() const { return faces_; }
  const std::vector<Eigen::Vector3d>& face_normals() const { return face_normals_; }
  const std::vector<double>& face_areas() const { return face_areas_; }
  const std::vector<double>& vertex_areas() const { return vertex_areas_; }
  /// Directed boundary edges (tail, head) in face traversal order.
  const std::vector<std::array<int, 2>>& boundary_edges() const { return boundary_edges_; }
  /// Faces adjacent to each vertex, sorted by face index.
  const std::vector<std::vector<int>>& vertex_faces() const { return vertex_faces_; }

  bool closed() const { return boundary_edges_.empty(); }
  bool is_boundary_vertex(int v) const { return boundary_vertex_[static_cast<std::size_t>(v)]; }
  int boundary_loop_count() const;
  double total_area() const;

  /// Area-weighted average of incident face normals, normalized.
  Eigen::Vector3d vertex_normal(int v) const;

 private:
  TriMesh() = default;
  std::vector<Eigen::Vector3d> vertices_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<Eigen::Vector3d> face_normals_;
  std::vector<double> face_areas_;
  std::vector<double> vertex_areas_;
  std::vector<std::vector<int>> vertex_faces_;
  std::vector<std::array<int, 2>> boundary_edges_;
  std::vector<char> boundary_vertex_;
};

/// Integral of the unit normal: sum of area * normal over faces,
/// deterministic pairwise reduction.
Eigen::Vector3d vector_area(const TriMesh& mesh, Exec exec = Exec::Parallel);

/// Sum over faces of f(N) <N, v> area, with f evaluated at face normals so
/// the discrete divergence identities stay exact.
double flux_integral(const TriMesh& mesh, const std::function<double(const Eigen::Vector3d&)>& f,
                     const Eigen::Vector3d& v, Exec exec = Exec::Parallel);
double flux_integral(const TriMesh& mesh, const PrescribedFunction& f, const Eigen::Vector3d& v,
                     Exec exec = Exec::Parallel);

/// Mean curvature per vertex from the cotangent Laplacian of the positions,
/// H = <L p, n> / (2 A), under the convention that the unit sphere with
/// inward normal has H = +1. Boundary vertices are NaN. Throws
/// DegenerateTriangle when a cotangent exceeds 1e8.
std::vector<double> discrete_mean_curvature(const TriMesh& mesh, Exec exec = Exec::Parallel);

struct ResidualField {
  std::vector<double> per_vertex;  // NaN at boundary vertices
  double sup_norm = 0;
};

/// Per-vertex residual H - H(N) over interior vertices.
ResidualField hsurface_residual(const TriMesh& mesh, const PrescribedFunction& f,
                                Exec exec = Exec::Parallel);

/// Triangulates a graph solution: two triangles per fully interior cell, cut
/// cells clipped against the boundary crossings, upward orientation.
TriMesh graph_to_mesh(const GraphSolution& sol);

// mesh builders used by tests and the CLI
enum class Orientation { Outward, Inward };
TriMesh make_icosphere(double radius, int subdivisions, Orientation orient);
TriMesh make_torus(double major_radius, double minor_radius, int major_segments,
                   int minor_segments);
TriMesh make_disc_mesh(double radius, int rings, int sectors);

// OBJ interchange: v/f records, counterclockwise = stored orientation
void save_obj(const TriMesh& mesh, const std::string& path);
TriMesh load_obj(const std::string& path);

}  // namespace hsurf
