#include "hsurf/meshgeom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "hsurf/errors.hpp"
#include "hsurf/graph_solver.hpp"
#include "hsurf/io.hpp"

namespace hsurf {

TriMesh TriMesh::create(std::vector<Eigen::Vector3d> vertices,
                        std::vector<std::array<int, 3>> faces) {
  TriMesh m;
  m.vertices_ = std::move(vertices);
  m.faces_ = std::move(faces);
  const int nv = static_cast<int>(m.vertices_.size());
  const std::size_t nf = m.faces_.size();
  if (nv < 3 || nf < 1) throw MeshTopologyError("mesh needs at least one triangle");

  m.face_normals_.resize(nf);
  m.face_areas_.resize(nf);
  for (std::size_t fi = 0; fi < nf; ++fi) {
    const auto& f = m.faces_[fi];
    for (const int v : f)
      if (v < 0 || v >= nv) throw MeshTopologyError("face index out of range");
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
      throw MeshTopologyError("degenerate face with repeated vertices");
    const Eigen::Vector3d n = (m.vertices_[static_cast<std::size_t>(f[1])] -
                               m.vertices_[static_cast<std::size_t>(f[0])])
                                  .cross(m.vertices_[static_cast<std::size_t>(f[2])] -
                                         m.vertices_[static_cast<std::size_t>(f[0])]);
    const double a2 = n.norm();
    if (a2 <= 0) throw DegenerateTriangle("zero-area face");
    m.face_normals_[fi] = n / a2;
    m.face_areas_[fi] = 0.5 * a2;
  }

  // orientability: each undirected edge in at most 2 faces, opposite traversal
  std::map<std::pair<int, int>, std::pair<int, int>> edges;  // (min,max) -> (fwd,bwd) counts
  for (std::size_t fi = 0; fi < nf; ++fi) {
    const auto& f = m.faces_[fi];
    for (int e = 0; e < 3; ++e) {
      const int a = f[static_cast<std::size_t>(e)], b = f[static_cast<std::size_t>((e + 1) % 3)];
      auto& rec = edges[{std::min(a, b), std::max(a, b)}];
      (a < b ? rec.first : rec.second) += 1;
    }
  }
  m.boundary_vertex_.assign(static_cast<std::size_t>(nv), 0);
  for (const auto& [key, rec] : edges) {
    const int total = rec.first + rec.second;
    if (total > 2 || rec.first > 1 || rec.second > 1)
      throw MeshTopologyError("non-manifold or inconsistently oriented edge");
    if (total == 1) {
      m.boundary_vertex_[static_cast<std::size_t>(key.first)] = 1;
      m.boundary_vertex_[static_cast<std::size_t>(key.second)] = 1;
    }
  }
  // directed boundary edges in traversal order
  for (std::size_t fi = 0; fi < nf; ++fi) {
    const auto& f = m.faces_[fi];
    for (int e = 0; e < 3; ++e) {
      const int a = f[static_cast<std::size_t>(e)], b = f[static_cast<std::size_t>((e + 1) % 3)];
      const auto& rec = edges[{std::min(a, b), std::max(a, b)}];
      if (rec.first + rec.second == 1) m.boundary_edges_.push_back({a, b});
    }
  }

  m.vertex_areas_.assign(static_cast<std::size_t>(nv), 0.0);
  m.vertex_faces_.assign(static_cast<std::size_t>(nv), {});
  for (std::size_t fi = 0; fi < nf; ++fi) {
    for (const int v : m.faces_[fi]) {
      m.vertex_areas_[static_cast<std::size_t>(v)] += m.face_areas_[fi] / 3.0;
      m.vertex_faces_[static_cast<std::size_t>(v)].push_back(static_cast<int>(fi));
    }
  }
  return m;
}

int TriMesh::boundary_loop_count() const {
  std::map<int, int> next;
  for (const auto& e : boundary_edges_) next[e[0]] = e[1];
  int loops = 0;
  std::map<int, bool> seen;
  for (const auto& [tail, head] : next) {
    if (seen[tail]) continue;
    ++loops;
    int v = tail;
    while (!seen[v]) {
      seen[v] = true;
      auto it = next.find(v);
      if (it == next.end()) break;  // open chain, still counted once
      v = it->second;
    }
  }
  return loops;
}

double TriMesh::total_area() const {
  std::vector<double> terms = face_areas_;
  return pairwise_sum(terms);
}

Eigen::Vector3d TriMesh::vertex_normal(int v) const {
  Eigen::Vector3d n = Eigen::Vector3d::Zero();
  for (const int fi : vertex_faces_[static_cast<std::size_t>(v)])
    n += face_areas_[static_cast<std::size_t>(fi)] * face_normals_[static_cast<std::size_t>(fi)];
  const double len = n.norm();
  if (len <= 0) throw DegenerateTriangle("zero vertex normal");
  return n / len;
}

Eigen::Vector3d vector_area(const TriMesh& mesh, Exec exec) {
  const std::ptrdiff_t nf = static_cast<std::ptrdiff_t>(mesh.faces().size());
  std::vector<Eigen::Vector3d> terms(static_cast<std::size_t>(nf), Eigen::Vector3d::Zero());
  for_each_index(nf, exec, [&](std::ptrdiff_t fi) {
    terms[static_cast<std::size_t>(fi)] = mesh.face_areas()[static_cast<std::size_t>(fi)] *
                                          mesh.face_normals()[static_cast<std::size_t>(fi)];
  });
  return pairwise_sum(terms);
}

double flux_integral(const TriMesh& mesh, const std::function<double(const Eigen::Vector3d&)>& f,
                     const Eigen::Vector3d& v, Exec exec) {
  const std::ptrdiff_t nf = static_cast<std::ptrdiff_t>(mesh.faces().size());
  std::vector<double> terms(static_cast<std::size_t>(nf), 0.0);
  for_each_index(nf, exec, [&](std::ptrdiff_t fi) {
    const Eigen::Vector3d& n = mesh.face_normals()[static_cast<std::size_t>(fi)];
    terms[static_cast<std::size_t>(fi)] =
        f(n) * n.dot(v) * mesh.face_areas()[static_cast<std::size_t>(fi)];
  });
  return pairwise_sum(terms);
}

double flux_integral(const TriMesh& mesh, const PrescribedFunction& f, const Eigen::Vector3d& v,
                     Exec exec) {
  return flux_integral(
      mesh, [&f](const Eigen::Vector3d& n) { return f.eval(n); }, v, exec);
}

std::vector<double> discrete_mean_curvature(const TriMesh& mesh, Exec exec) {
  const auto& verts = mesh.vertices();
  const auto& faces = mesh.faces();
  const std::ptrdiff_t nv = static_cast<std::ptrdiff_t>(verts.size());
  std::vector<double> H(static_cast<std::size_t>(nv),
                        std::numeric_limits<double>::quiet_NaN());

  // cotangents per face corner, then a per-vertex pass over sorted adjacency
  // so serial and parallel paths sum in the same order
  std::vector<std::array<double, 3>> cot(faces.size());
  for_each_index(static_cast<std::ptrdiff_t>(faces.size()), exec, [&](std::ptrdiff_t fi) {
    const auto& f = faces[static_cast<std::size_t>(fi)];
    for (int c = 0; c < 3; ++c) {
      const Eigen::Vector3d& p = verts[static_cast<std::size_t>(f[static_cast<std::size_t>(c)])];
      const Eigen::Vector3d e1 =
          verts[static_cast<std::size_t>(f[static_cast<std::size_t>((c + 1) % 3)])] - p;
      const Eigen::Vector3d e2 =
          verts[static_cast<std::size_t>(f[static_cast<std::size_t>((c + 2) % 3)])] - p;
      cot[static_cast<std::size_t>(fi)][static_cast<std::size_t>(c)] =
          e1.dot(e2) / e1.cross(e2).norm();
    }
  });
  for (const auto& c3 : cot)
    for (const double c : c3)
      if (!std::isfinite(c) || std::abs(c) > 1e8)
        throw DegenerateTriangle("cotangent exceeds 1e8");

  for_each_index(nv, exec, [&](std::ptrdiff_t vi) {
    if (mesh.is_boundary_vertex(static_cast<int>(vi))) return;
    Eigen::Vector3d lap = Eigen::Vector3d::Zero();
    double area = 0;  // mixed Voronoi cell, consistent with the cotangent operator
    for (const int fi : mesh.vertex_faces()[static_cast<std::size_t>(vi)]) {
      const auto& f = faces[static_cast<std::size_t>(fi)];
      int c = 0;
      while (f[static_cast<std::size_t>(c)] != static_cast<int>(vi)) ++c;
      const int vb = f[static_cast<std::size_t>((c + 1) % 3)];
      const int vc = f[static_cast<std::size_t>((c + 2) % 3)];
      const double cot_b = cot[static_cast<std::size_t>(fi)][static_cast<std::size_t>((c + 1) % 3)];
      const double cot_c = cot[static_cast<std::size_t>(fi)][static_cast<std::size_t>((c + 2) % 3)];
      const double cot_a = cot[static_cast<std::size_t>(fi)][static_cast<std::size_t>(c)];
      const Eigen::Vector3d eb = verts[static_cast<std::size_t>(vb)] - verts[static_cast<std::size_t>(vi)];
      const Eigen::Vector3d ec = verts[static_cast<std::size_t>(vc)] - verts[static_cast<std::size_t>(vi)];
      // edge (vi, vb) sees the angle at vc; edge (vi, vc) the angle at vb
      lap += 0.5 * cot_c * eb + 0.5 * cot_b * ec;
      const double face_area = mesh.face_areas()[static_cast<std::size_t>(fi)];
      if (cot_a < 0)
        area += 0.5 * face_area;  // obtuse at this corner
      else if (cot_b < 0 || cot_c < 0)
        area += 0.25 * face_area;
      else
        area += 0.125 * (eb.squaredNorm() * cot_c + ec.squaredNorm() * cot_b);
    }
    H[static_cast<std::size_t>(vi)] =
        lap.dot(mesh.vertex_normal(static_cast<int>(vi))) / (2.0 * area);
  });
  return H;
}

ResidualField hsurface_residual(const TriMesh& mesh, const PrescribedFunction& f, Exec exec) {
  ResidualField out;
  out.per_vertex = discrete_mean_curvature(mesh, exec);
  const std::ptrdiff_t nv = static_cast<std::ptrdiff_t>(out.per_vertex.size());
  for_each_index(nv, exec, [&](std::ptrdiff_t vi) {
    if (mesh.is_boundary_vertex(static_cast<int>(vi))) return;
    out.per_vertex[static_cast<std::size_t>(vi)] -=
        f.eval(mesh.vertex_normal(static_cast<int>(vi)));
  });
  double sup = 0;
  for (std::ptrdiff_t vi = 0; vi < nv; ++vi)
    if (!mesh.is_boundary_vertex(static_cast<int>(vi)))
      sup = std::max(sup, std::abs(out.per_vertex[static_cast<std::size_t>(vi)]));
  out.sup_norm = sup;
  return out;
}

TriMesh graph_to_mesh(const GraphSolution& sol) {
  const GridMask& grid = *sol.grid;
  const int nx = grid.nx(), ny = grid.ny();
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<int> node_vertex(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), -1);
  std::map<std::pair<int, int>, int> crossing_vertex;  // grid edge (a,b), a<b

  auto node_vtx = [&](int i, int j) {
    const int id = grid.node_id(i, j);
    int& slot = node_vertex[static_cast<std::size_t>(id)];
    if (slot < 0) {
      slot = static_cast<int>(vertices.size());
      vertices.emplace_back(grid.node_x(i), grid.node_y(j), sol.node_value(i, j));
    }
    return slot;
  };
  auto crossing_vtx = [&](int ii, int ij, int oi, int oj) {
    const int a = grid.node_id(ii, ij), b = grid.node_id(oi, oj);
    const auto key = std::minmax(a, b);
    auto it = crossing_vertex.find(key);
    if (it != crossing_vertex.end()) return it->second;
    const Eigen::Vector2d in(grid.node_x(ii), grid.node_y(ij)),
        out(grid.node_x(oi), grid.node_y(oj));
    const double t = boundary_crossing(grid.domain().shape, in, out);
    const Eigen::Vector2d p = in + t * (out - in);
    const int v = static_cast<int>(vertices.size());
    vertices.emplace_back(p.x(), p.y(), sol.g.eval(p));
    crossing_vertex[key] = v;
    return v;
  };

  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const int ci[4] = {i, i + 1, i + 1, i};
      const int cj[4] = {j, j, j + 1, j + 1};
      bool in[4];
      int count = 0;
      for (int c = 0; c < 4; ++c) {
        in[c] = grid.is_interior(ci[c], cj[c]);
        count += in[c];
      }
      if (count == 0) continue;
      if (count == 4) {
        const int v00 = node_vtx(i, j), v10 = node_vtx(i + 1, j);
        const int v11 = node_vtx(i + 1, j + 1), v01 = node_vtx(i, j + 1);
        faces.push_back({v00, v10, v11});
        faces.push_back({v00, v11, v01});
        continue;
      }
      // clipped cell: walk corners in CCW order, inserting crossings
      std::vector<int> poly;
      for (int c = 0; c < 4; ++c) {
        const int cn = (c + 1) % 4;
        if (in[c]) poly.push_back(node_vtx(ci[c], cj[c]));
        if (in[c] != in[cn]) {
          if (in[c])
            poly.push_back(crossing_vtx(ci[c], cj[c], ci[cn], cj[cn]));
          else
            poly.push_back(crossing_vtx(ci[cn], cj[cn], ci[c], cj[c]));
        }
      }
      for (std::size_t k = 1; k + 1 < poly.size(); ++k)
        faces.push_back({poly[0], poly[k], poly[k + 1]});
    }
  }
  return TriMesh::create(std::move(vertices), std::move(faces));
}

TriMesh make_icosphere(double radius, int subdivisions, Orientation orient) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int v = static_cast<int>(verts.size());
      verts.push_back((verts[static_cast<std::size_t>(a)] + verts[static_cast<std::size_t>(b)])
                          .normalized());
      midpoint[key] = v;
      return v;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces.swap(next);
  }
  for (auto& v : verts) v *= radius;
  if (orient == Orientation::Inward)
    for (auto& f : faces) std::swap(f[1], f[2]);
  return TriMesh::create(std::move(verts), std::move(faces));
}

TriMesh make_torus(double major_radius, double minor_radius, int major_segments,
                   int minor_segments) {
  std::vector<Eigen::Vector3d> verts;
  verts.reserve(static_cast<std::size_t>(major_segments) * static_cast<std::size_t>(minor_segments));
  for (int a = 0; a < major_segments; ++a) {
    const double phi = 2.0 * M_PI * a / major_segments;
    for (int b = 0; b < minor_segments; ++b) {
      const double psi = 2.0 * M_PI * b / minor_segments;
      const double w = major_radius + minor_radius * std::cos(psi);
      verts.emplace_back(w * std::cos(phi), w * std::sin(phi), minor_radius * std::sin(psi));
    }
  }
  std::vector<std::array<int, 3>> faces;
  faces.reserve(2u * static_cast<std::size_t>(major_segments) *
                static_cast<std::size_t>(minor_segments));
  auto vid = [&](int a, int b) {
    return ((a % major_segments + major_segments) % major_segments) * minor_segments +
           ((b % minor_segments + minor_segments) % minor_segments);
  };
  for (int a = 0; a < major_segments; ++a)
    for (int b = 0; b < minor_segments; ++b) {
      // outward orientation
      faces.push_back({vid(a, b), vid(a + 1, b), vid(a + 1, b + 1)});
      faces.push_back({vid(a, b), vid(a + 1, b + 1), vid(a, b + 1)});
    }
  return TriMesh::create(std::move(verts), std::move(faces));
}

TriMesh make_disc_mesh(double radius, int rings, int sectors) {
  std::vector<Eigen::Vector3d> verts;
  verts.emplace_back(0, 0, 0);
  for (int r = 1; r <= rings; ++r) {
    const double rho = radius * r / rings;
    for (int a = 0; a < sectors; ++a) {
      const double phi = 2.0 * M_PI * a / sectors;
      verts.emplace_back(rho * std::cos(phi), rho * std::sin(phi), 0.0);
    }
  }
  auto vid = [&](int r, int a) { return 1 + (r - 1) * sectors + (a % sectors); };
  std::vector<std::array<int, 3>> faces;
  for (int a = 0; a < sectors; ++a) faces.push_back({0, vid(1, a), vid(1, a + 1)});
  for (int r = 1; r < rings; ++r)
    for (int a = 0; a < sectors; ++a) {
      faces.push_back({vid(r, a), vid(r + 1, a), vid(r + 1, a + 1)});
      faces.push_back({vid(r, a), vid(r + 1, a + 1), vid(r, a + 1)});
    }
  return TriMesh::create(std::move(verts), std::move(faces));
}

void save_obj(const TriMesh& mesh, const std::string& path) {
  std::string out;
  out.reserve(mesh.vertices().size() * 60 + mesh.faces().size() * 30);
  char line[128];
  for (const auto& v : mesh.vertices()) {
    std::snprintf(line, sizeof(line), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out += line;
  }
  for (const auto& f : mesh.faces()) {
    std::snprintf(line, sizeof(line), "f %d %d %d\n", f[0] + 1, f[1] + 1, f[2] + 1);
    out += line;
  }
  atomic_write(path, out);
}

TriMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open OBJ file: " + path);
  std::vector<Eigen::Vector3d> verts;
  std::vector<std::array<int, 3>> faces;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      double x, y, z;
      ss >> x >> y >> z;
      verts.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::array<int, 3> f{};
      for (int k = 0; k < 3; ++k) {
        std::string tok;
        ss >> tok;
        f[static_cast<std::size_t>(k)] = std::stoi(tok.substr(0, tok.find('/'))) - 1;
      }
      faces.push_back(f);
      std::string extra;
      if (ss >> extra) throw MeshTopologyError("only triangle faces are supported");
    }
  }
  return TriMesh::create(std::move(verts), std::move(faces));
}

}  // namespace hsurf
