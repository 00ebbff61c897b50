#include "hsurf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "hsurf/errors.hpp"

namespace hsurf {

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

}  // namespace

double shape_area(const Shape& s) {
  if (const Disc* d = std::get_if<Disc>(&s)) return M_PI * d->radius * d->radius;
  const auto& v = std::get<PolygonShape>(s).vertices;
  double a = 0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross2(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

double shape_perimeter(const Shape& s) {
  if (const Disc* d = std::get_if<Disc>(&s)) return 2.0 * M_PI * d->radius;
  const auto& v = std::get<PolygonShape>(s).vertices;
  double L = 0;
  for (std::size_t i = 0; i < v.size(); ++i) L += (v[(i + 1) % v.size()] - v[i]).norm();
  return L;
}

bool shape_inside(const Shape& s, const Eigen::Vector2d& p) {
  if (const Disc* d = std::get_if<Disc>(&s))
    return (p - d->center).squaredNorm() < d->radius * d->radius;
  // even-odd rule
  const auto& v = std::get<PolygonShape>(s).vertices;
  bool in = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y() > p.y()) != (v[j].y() > p.y())) {
      const double xi =
          v[i].x() + (p.y() - v[i].y()) / (v[j].y() - v[i].y()) * (v[j].x() - v[i].x());
      if (p.x() < xi) in = !in;
    }
  }
  return in;
}

std::vector<Eigen::Vector2d> shape_boundary_points(const Shape& s, int n) {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(static_cast<std::size_t>(n));
  if (const Disc* d = std::get_if<Disc>(&s)) {
    for (int k = 0; k < n; ++k) {
      const double a = 2.0 * M_PI * k / n;
      pts.emplace_back(d->center + d->radius * Eigen::Vector2d(std::cos(a), std::sin(a)));
    }
    return pts;
  }
  const auto& v = std::get<PolygonShape>(s).vertices;
  const double total = shape_perimeter(s);
  double want = 0;
  const double step = total / n;
  double walked = 0;
  for (std::size_t i = 0; i < v.size() && static_cast<int>(pts.size()) < n; ++i) {
    const Eigen::Vector2d a = v[i], b = v[(i + 1) % v.size()];
    const double len = (b - a).norm();
    while (want <= walked + len && static_cast<int>(pts.size()) < n) {
      pts.emplace_back(a + (want - walked) / len * (b - a));
      want += step;
    }
    walked += len;
  }
  return pts;
}

double shape_boundary_distance(const Shape& s, const Eigen::Vector2d& p) {
  if (const Disc* d = std::get_if<Disc>(&s)) return d->radius - (p - d->center).norm();
  const auto& v = std::get<PolygonShape>(s).vertices;
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Eigen::Vector2d a = v[i], b = v[(i + 1) % v.size()];
    const Eigen::Vector2d ab = b - a;
    const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    dmin = std::min(dmin, (p - (a + t * ab)).norm());
  }
  return shape_inside(s, p) ? dmin : -dmin;
}

bool polygon_is_simple(const PolygonShape& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) return false;
  auto segs_intersect = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                           const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
    const double d1 = cross2(b - a, c - a), d2 = cross2(b - a, d - a);
    const double d3 = cross2(d - c, a - c), d4 = cross2(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;  // shared endpoint
      if (segs_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool polygon_is_convex(const PolygonShape& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = cross2(v[(i + 1) % n] - v[i], v[(i + 2) % n] - v[(i + 1) % n]);
    if (std::abs(c) < 1e-14) continue;
    const int s = c > 0 ? 1 : -1;
    if (sign == 0)
      sign = s;
    else if (s != sign)
      return false;
  }
  return true;
}

double boundary_crossing(const Shape& s, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  if (const Disc* d = std::get_if<Disc>(&s)) {
    // |a + t(b-a) - c|^2 = R^2, a strictly inside: exactly one root in (0,1]
    const Eigen::Vector2d u = b - a, w = a - d->center;
    const double qa = u.squaredNorm();
    const double qb = w.dot(u);
    const double qc = w.squaredNorm() - d->radius * d->radius;  // < 0
    const double disc = qb * qb - qa * qc;
    const double sq = std::sqrt(std::max(0.0, disc));
    const double t = qb > 0 ? -qc / (qb + sq) : (sq - qb) / qa;  // stable positive root
    return std::clamp(t, 1e-14, 1.0);
  }
  const auto& v = std::get<PolygonShape>(s).vertices;
  double tmin = std::numeric_limits<double>::infinity();
  const Eigen::Vector2d u = b - a;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Eigen::Vector2d c = v[i], e = v[(i + 1) % v.size()] - v[i];
    const double denom = cross2(u, e);
    if (std::abs(denom) < 1e-300) continue;
    const double t = cross2(c - a, e) / denom;
    const double s2 = cross2(c - a, u) / denom;
    if (t > 1e-14 && t <= 1.0 + 1e-14 && s2 >= -1e-12 && s2 <= 1.0 + 1e-12)
      tmin = std::min(tmin, t);
  }
  if (!std::isfinite(tmin)) throw InvalidDomain("no boundary crossing found along grid segment");
  return std::clamp(tmin, 1e-14, 1.0);
}

double circle_polygon_area(const Eigen::Vector2d& center, double radius,
                           const std::vector<Eigen::Vector2d>& poly) {
  // Sum per-edge contributions: chords inside the circle contribute triangle
  // areas relative to the center, portions outside contribute circular
  // sectors. Valid while no single edge subtends an angle >= pi, which holds
  // for the small convex cells used here.
  const double r2 = radius * radius;
  double area = 0;
  const std::size_t n = poly.size();
  auto sector = [&](const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
    double dth = std::atan2(q.y(), q.x()) - std::atan2(p.y(), p.x());
    if (dth > M_PI) dth -= 2 * M_PI;
    if (dth < -M_PI) dth += 2 * M_PI;
    return 0.5 * r2 * dth;
  };
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Vector2d a = poly[i] - center, b = poly[(i + 1) % n] - center;
    const bool ain = a.squaredNorm() <= r2, bin = b.squaredNorm() <= r2;
    // segment-circle intersection parameters
    const Eigen::Vector2d d = b - a;
    const double qa = d.squaredNorm();
    if (qa < 1e-300) continue;
    const double qb = a.dot(d), qc = a.squaredNorm() - r2;
    const double disc = qb * qb - qa * qc;
    double t1 = 2, t2 = -1;
    if (disc > 0) {
      const double sq = std::sqrt(disc);
      t1 = (-qb - sq) / qa;
      t2 = (-qb + sq) / qa;
    }
    if (ain && bin) {
      area += 0.5 * cross2(a, b);
    } else if (ain && !bin) {
      const Eigen::Vector2d m = a + std::clamp(t2, 0.0, 1.0) * d;
      area += 0.5 * cross2(a, m) + sector(m, b);
    } else if (!ain && bin) {
      const Eigen::Vector2d m = a + std::clamp(t1, 0.0, 1.0) * d;
      area += sector(a, m) + 0.5 * cross2(m, b);
    } else {
      if (t1 > 0 && t1 < 1 && t2 > t1 && t2 < 1) {
        const Eigen::Vector2d m1 = a + t1 * d, m2 = a + t2 * d;
        area += sector(a, m1) + 0.5 * cross2(m1, m2) + sector(m2, b);
      } else {
        area += sector(a, b);
      }
    }
  }
  return area;
}

double polygon_rect_area(const std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& lo,
                         const Eigen::Vector2d& hi) {
  // Sutherland-Hodgman clip against the four half-planes of the rectangle
  std::vector<Eigen::Vector2d> cur = poly, next;
  auto clip = [&](auto keep, auto intersect) {
    next.clear();
    const std::size_t n = cur.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector2d a = cur[i], b = cur[(i + 1) % n];
      const bool ka = keep(a), kb = keep(b);
      if (ka) next.push_back(a);
      if (ka != kb) next.push_back(intersect(a, b));
    }
    cur.swap(next);
  };
  clip([&](const Eigen::Vector2d& p) { return p.x() >= lo.x(); },
       [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
         const double t = (lo.x() - a.x()) / (b.x() - a.x());
         return Eigen::Vector2d(lo.x(), a.y() + t * (b.y() - a.y()));
       });
  clip([&](const Eigen::Vector2d& p) { return p.x() <= hi.x(); },
       [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
         const double t = (hi.x() - a.x()) / (b.x() - a.x());
         return Eigen::Vector2d(hi.x(), a.y() + t * (b.y() - a.y()));
       });
  clip([&](const Eigen::Vector2d& p) { return p.y() >= lo.y(); },
       [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
         const double t = (lo.y() - a.y()) / (b.y() - a.y());
         return Eigen::Vector2d(a.x() + t * (b.x() - a.x()), lo.y());
       });
  clip([&](const Eigen::Vector2d& p) { return p.y() <= hi.y(); },
       [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
         const double t = (hi.y() - a.y()) / (b.y() - a.y());
         return Eigen::Vector2d(a.x() + t * (b.x() - a.x()), hi.y());
       });
  if (cur.size() < 3) return 0;
  double a = 0;
  for (std::size_t i = 0; i < cur.size(); ++i) a += cross2(cur[i], cur[(i + 1) % cur.size()]);
  return 0.5 * a;
}

std::shared_ptr<const GridMask> GridMask::build(const PlanarDomain& domain) {
  if (domain.spacing <= 0) throw InvalidDomain("grid spacing must be positive");
  if (const Disc* d = std::get_if<Disc>(&domain.shape)) {
    if (d->radius <= 0) throw InvalidDomain("disc radius must be positive");
  } else {
    const auto& poly = std::get<PolygonShape>(domain.shape);
    if (poly.vertices.size() < 3) throw InvalidDomain("polygon needs at least 3 vertices");
    if (!polygon_is_simple(poly)) throw InvalidDomain("polygon must be simple");
    if (shape_area(domain.shape) <= 0)
      throw InvalidDomain("polygon must be positively oriented");
  }

  auto grid = std::shared_ptr<GridMask>(new GridMask());
  grid->domain_ = domain;
  grid->h_ = domain.spacing;

  double minx, maxx, miny, maxy;
  if (const Disc* d = std::get_if<Disc>(&domain.shape)) {
    minx = d->center.x() - d->radius;
    maxx = d->center.x() + d->radius;
    miny = d->center.y() - d->radius;
    maxy = d->center.y() + d->radius;
    // center the grid on the disc center so symmetric domains get exactly
    // symmetric masks
    const double h = grid->h_;
    const int m = static_cast<int>(std::ceil(d->radius / h)) + 3;
    grid->x0_ = d->center.x() - m * h;
    grid->y0_ = d->center.y() - m * h;
    grid->nx_ = 2 * m + 1;
    grid->ny_ = 2 * m + 1;
  } else {
    const auto& v = std::get<PolygonShape>(domain.shape).vertices;
    minx = maxx = v[0].x();
    miny = maxy = v[0].y();
    for (const auto& p : v) {
      minx = std::min(minx, p.x());
      maxx = std::max(maxx, p.x());
      miny = std::min(miny, p.y());
      maxy = std::max(maxy, p.y());
    }
    const double h = grid->h_;
    grid->x0_ = std::floor(minx / h) * h - 3 * h;
    grid->y0_ = std::floor(miny / h) * h - 3 * h;
    grid->nx_ = static_cast<int>(std::ceil((maxx - grid->x0_) / h)) + 4;
    grid->ny_ = static_cast<int>(std::ceil((maxy - grid->y0_) / h)) + 4;
  }

  grid->build_mask();
  grid->build_ghosts();
  return grid;
}

void GridMask::build_mask() {
  const std::size_t total = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
  interior_.assign(total, 0);
  unknown_.assign(total, -1);
  interior_nodes_.clear();

  if (const Disc* d = std::get_if<Disc>(&domain_.shape)) {
    // offsets from the center are exact multiples of h, so the mask is
    // exactly symmetric under the grid reflections of the disc
    const int m = (nx_ - 1) / 2;
    const double r2 = d->radius * d->radius;
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i) {
        const double dx = (i - m) * h_, dy = (j - m) * h_;
        if (dx * dx + dy * dy < r2) interior_[static_cast<std::size_t>(node_id(i, j))] = 1;
      }
  } else {
    // nodes on or numerically touching an edge count as exterior, so every
    // interior node admits a genuine boundary crossing
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i) {
        const Eigen::Vector2d p(node_x(i), node_y(j));
        if (shape_inside(domain_.shape, p) && shape_boundary_distance(domain_.shape, p) > 1e-12)
          interior_[static_cast<std::size_t>(node_id(i, j))] = 1;
      }
  }

  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i)
      if (interior_[static_cast<std::size_t>(node_id(i, j))]) {
        unknown_[static_cast<std::size_t>(node_id(i, j))] =
            static_cast<int>(interior_nodes_.size());
        interior_nodes_.push_back(node_id(i, j));
      }

  if (interior_nodes_.size() < 2)
    throw InvalidDomain("interior mask is empty or a single node; refine the grid");

  // edge-connectivity (4-neighborhood)
  std::vector<char> seen(total, 0);
  std::deque<int> queue{interior_nodes_[0]};
  seen[static_cast<std::size_t>(interior_nodes_[0])] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const int node = queue.front();
    queue.pop_front();
    const int i = node % nx_, j = node / nx_;
    const int nbs[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
    for (const auto& nb : nbs) {
      if (!is_interior(nb[0], nb[1])) continue;
      const int id = node_id(nb[0], nb[1]);
      if (!seen[static_cast<std::size_t>(id)]) {
        seen[static_cast<std::size_t>(id)] = 1;
        ++reached;
        queue.push_back(id);
      }
    }
  }
  if (reached != interior_nodes_.size())
    throw InvalidDomain("interior mask is not edge-connected; refine the grid");

  // each interior node must see interior neighbors in both axes; a mask one
  // node wide cannot support the transverse stencil terms
  for (const int node : interior_nodes_) {
    const int i = node % nx_, j = node / nx_;
    const bool horiz = is_interior(i + 1, j) || is_interior(i - 1, j);
    const bool vert = is_interior(i, j + 1) || is_interior(i, j - 1);
    if (!horiz || !vert)
      throw MaskTooThin("interior mask too thin for the 9-point stencil; refine the grid");
  }
}

void GridMask::build_ghosts() {
  const std::size_t total = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
  ghost_slot_.assign(total, -1);
  ghosts_.clear();

  // directions from a ghost toward the interior, axis lines first
  const int dirs[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};

  for (const int node : interior_nodes_) {
    const int i = node % nx_, j = node / nx_;
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0) continue;
        const int gi = i + di, gj = j + dj;
        if (is_interior(gi, gj)) continue;
        const int gid = node_id(gi, gj);
        if (ghost_slot_[static_cast<std::size_t>(gid)] >= 0) continue;

        // candidate extrapolation lines: pick the highest order achievable,
        // then the crossing closest to the ghost, then the fixed direction
        // priority
        GhostStencil best;
        int best_order = -1;
        double best_b = 2;
        bool best_axis = false;
        const Eigen::Vector2d gp(node_x(gi), node_y(gj));
        for (int d = 0; d < 8; ++d) {
          const int ui = dirs[d][0], uj = dirs[d][1];
          if (!is_interior(gi + ui, gj + uj)) continue;
          const bool axis = d < 4;
          const Eigen::Vector2d ip(node_x(gi + ui), node_y(gj + uj));
          const double t = boundary_crossing(domain_.shape, ip, gp);
          const double b = 1.0 - t;  // crossing offset from the ghost, in steps

          // interior depth along the line
          int depth = 1;
          while (depth < 4 && is_interior(gi + (depth + 1) * ui, gj + (depth + 1) * uj)) ++depth;

          // choose sample offsets (in units of the step) with the nearest
          // interior node dropped when the crossing crowds it
          double offs[4];
          int n = 0;
          offs[n++] = b;
          const int first = b > 0.5 ? 2 : 1;
          for (int k = first; k <= depth && n < 4; ++k) offs[n++] = static_cast<double>(k);
          if (n < 2) continue;
          const int order = n - 1;

          const bool better =
              order > best_order ||
              (order == best_order && (b < best_b - 1e-15 ||
                                       (std::abs(b - best_b) <= 1e-15 && axis && !best_axis)));
          if (!better) continue;

          GhostStencil gs;
          gs.crossing = ip + t * (gp - ip);
          gs.nterms = n - 1;
          // Lagrange coefficients evaluated at offset 0 (the ghost)
          for (int a = 0; a < n; ++a) {
            double c = 1;
            for (int b2 = 0; b2 < n; ++b2) {
              if (a == b2) continue;
              c *= (0.0 - offs[b2]) / (offs[a] - offs[b2]);
            }
            if (a == 0) {
              gs.boundary_coeff = c;
            } else {
              const int k = static_cast<int>(offs[a]);
              gs.unknown[a - 1] = unknown_index(node_id(gi + k * ui, gj + k * uj));
              gs.coeff[a - 1] = c;
            }
          }
          best = gs;
          best_order = order;
          best_b = b;
          best_axis = axis;
        }
        if (best_order < 1)
          throw MaskTooThin("cannot build a ghost stencil; interior mask too thin");
        ghost_slot_[static_cast<std::size_t>(gid)] = static_cast<int>(ghosts_.size());
        ghosts_.push_back(best);
        ghost_nodes_.push_back(gid);
      }
  }
}

const GhostStencil* GridMask::ghost(int node) const {
  const int slot = ghost_slot_[static_cast<std::size_t>(node)];
  return slot >= 0 ? &ghosts_[static_cast<std::size_t>(slot)] : nullptr;
}

double GridMask::cell_overlap(int i, int j) const {
  const Eigen::Vector2d lo(node_x(i) - 0.5 * h_, node_y(j) - 0.5 * h_);
  const Eigen::Vector2d hi(node_x(i) + 0.5 * h_, node_y(j) + 0.5 * h_);
  if (const Disc* d = std::get_if<Disc>(&domain_.shape)) {
    const std::vector<Eigen::Vector2d> rect = {
        lo, {hi.x(), lo.y()}, hi, {lo.x(), hi.y()}};
    return circle_polygon_area(d->center, d->radius, rect);
  }
  return polygon_rect_area(std::get<PolygonShape>(domain_.shape).vertices, lo, hi);
}

}  // namespace hsurf
