#pragma once

#include <Eigen/Dense>
#include <memory>
#include <variant>
#include <vector>

namespace hsurf {

struct Disc {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0;
};

/// Simple polygon, positively oriented (counterclockwise).
struct PolygonShape {
  std::vector<Eigen::Vector2d> vertices;
};

using Shape = std::variant<Disc, PolygonShape>;

/// Planar domain with a uniform Cartesian grid, equal spacing in both
/// directions.
struct PlanarDomain {
  Shape shape;
  double spacing = 0;
};

double shape_area(const Shape& s);
double shape_perimeter(const Shape& s);
bool shape_inside(const Shape& s, const Eigen::Vector2d& p);
/// n points along the boundary, uniform in parameter (angle / arc length).
std::vector<Eigen::Vector2d> shape_boundary_points(const Shape& s, int n);
/// Signed-ish distance to the boundary (positive inside), exact for discs,
/// min edge distance for polygons.
double shape_boundary_distance(const Shape& s, const Eigen::Vector2d& p);
bool polygon_is_simple(const PolygonShape& poly);
bool polygon_is_convex(const PolygonShape& poly);

/// Value of a non-interior grid node expressed as an affine function of
/// interior unknowns plus the Dirichlet value at the boundary crossing:
///   u(ghost) = boundary_coeff * g(crossing) + sum_k coeff[k] * u[unknown[k]]
struct GhostStencil {
  Eigen::Vector2d crossing;
  double boundary_coeff = 0;
  int nterms = 0;
  int unknown[3] = {-1, -1, -1};
  double coeff[3] = {0, 0, 0};
};

/// Masked uniform grid over a planar domain. The mask marks a node interior
/// iff it lies strictly inside the shape; every non-interior node referenced
/// by an interior 9-point stencil carries a ghost stencil built by 1-D
/// extrapolation through the exact boundary crossing along a grid line
/// (axis preferred, falling back to diagonals), Shortley-Weller style.
/// Extrapolation order adapts (cubic -> quadratic -> linear) to keep all
/// coefficients bounded independently of how close the crossing sits to a
/// node.
class GridMask {
 public:
  static std::shared_ptr<const GridMask> build(const PlanarDomain& domain);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double spacing() const { return h_; }
  const PlanarDomain& domain() const { return domain_; }

  double node_x(int i) const { return x0_ + i * h_; }
  double node_y(int j) const { return y0_ + j * h_; }
  int node_id(int i, int j) const { return j * nx_ + i; }

  bool is_interior(int i, int j) const {
    return i >= 0 && i < nx_ && j >= 0 && j < ny_ && interior_[static_cast<std::size_t>(node_id(i, j))];
  }
  /// Unknown index of an interior node, -1 otherwise.
  int unknown_index(int node) const { return unknown_[static_cast<std::size_t>(node)]; }

  /// Interior nodes in unknown order (lexicographic by (j, i)).
  const std::vector<int>& interior_nodes() const { return interior_nodes_; }
  int num_unknowns() const { return static_cast<int>(interior_nodes_.size()); }

  /// Ghost stencil of a non-interior node, nullptr if the node is not in the
  /// ghost ring.
  const GhostStencil* ghost(int node) const;

  /// Node ids of the ghost ring, in construction order.
  const std::vector<int>& ghost_nodes() const { return ghost_nodes_; }

  /// Area of cell(i,j) ∩ domain where cell(i,j) is the h×h square centered at
  /// the node. Exact circle/polygon-rectangle overlap.
  double cell_overlap(int i, int j) const;

  bool inside(const Eigen::Vector2d& p) const { return shape_inside(domain_.shape, p); }

 private:
  GridMask() = default;
  void build_mask();
  void build_ghosts();

  PlanarDomain domain_;
  int nx_ = 0, ny_ = 0;
  double x0_ = 0, y0_ = 0, h_ = 0;
  std::vector<char> interior_;
  std::vector<int> unknown_;
  std::vector<int> interior_nodes_;
  std::vector<int> ghost_slot_;  // node -> index into ghosts_, -1 otherwise
  std::vector<GhostStencil> ghosts_;
  std::vector<int> ghost_nodes_;
};

/// First boundary crossing walking from a (strictly inside) toward b
/// (outside); returns t in (0,1] with crossing = a + t (b - a).
double boundary_crossing(const Shape& s, const Eigen::Vector2d& a, const Eigen::Vector2d& b);

/// Area of the intersection of a circle with a convex polygon (used for the
/// exact cut-cell weights).
double circle_polygon_area(const Eigen::Vector2d& center, double radius,
                           const std::vector<Eigen::Vector2d>& poly);

/// Area of polygon ∩ axis-aligned rectangle (Sutherland-Hodgman clip).
double polygon_rect_area(const std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& lo,
                         const Eigen::Vector2d& hi);

}  // namespace hsurf
