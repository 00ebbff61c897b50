#include "hsurf/checks.hpp"

#include <algorithm>
#include <cmath>

#include "hsurf/errors.hpp"

namespace hsurf {

namespace {

constexpr double kPoleTol = 1e-9;
constexpr double kSignTol = 1e-8;  // algebraic sign statements on u

const char* status_name(HypothesisStatus s) {
  switch (s) {
    case HypothesisStatus::Satisfied:
      return "satisfied";
    case HypothesisStatus::Violated:
      return "violated";
    case HypothesisStatus::NotVerified:
      return "not-verified";
  }
  return "";
}

Hypothesis hyp(std::string name, bool ok, std::map<std::string, double> measured = {}) {
  return {std::move(name), ok ? HypothesisStatus::Satisfied : HypothesisStatus::Violated,
          std::move(measured)};
}

Hypothesis hyp_unverified(std::string name) {
  return {std::move(name), HypothesisStatus::NotVerified, {}};
}

/// Marks the report vacuous if any verified hypothesis is violated.
bool finalize_hypotheses(CheckReport& r) {
  for (const auto& h : r.hypotheses)
    if (h.status == HypothesisStatus::Violated) {
      r.pass = false;
      r.conclusion = "vacuous";
      return false;
    }
  return true;
}

void conclude(CheckReport& r, bool ok) {
  r.pass = ok;
  r.conclusion = ok ? "verified" : "violated";
}

bool graph_axis(const Eigen::Vector3d& v) {
  return (v - Eigen::Vector3d::UnitZ()).norm() <= 1e-12;
}

Eigen::Vector2d domain_center(const Shape& s) {
  if (const Disc* d = std::get_if<Disc>(&s)) return d->center;
  const auto& verts = std::get<PolygonShape>(s).vertices;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& p : verts) c += p;
  return c / static_cast<double>(verts.size());
}

}  // namespace

bool CheckReport::vacuous() const { return conclusion == "vacuous"; }

nlohmann::ordered_json CheckReport::to_json() const {
  nlohmann::ordered_json j;
  j["theorem"] = theorem;
  nlohmann::ordered_json hs = nlohmann::ordered_json::array();
  for (const auto& h : hypotheses) {
    nlohmann::ordered_json hj;
    hj["name"] = h.name;
    hj["status"] = status_name(h.status);
    hj["measured"] = h.measured;
    hs.push_back(hj);
  }
  j["hypotheses"] = hs;
  j["measured"] = measured;
  j["bound"] = bound;
  j["margin"] = margin;
  j["pass"] = pass;
  j["conclusion"] = conclusion;
  j["tolerances"] = tolerances;
  return j;
}

const std::vector<std::string>& check_ids() {
  static const std::vector<std::string> ids = {
      "flux-necessary",      "slab",          "height-area",
      "one-side",            "lambda-one-side", "reflection-symmetry",
      "rotational-symmetry", "cylinder-containment", "closed-obstruction"};
  return ids;
}

CheckReport check_flux_necessary(const Shape& boundary, const PrescribedFunction& f) {
  if (const PolygonShape* poly = std::get_if<PolygonShape>(&boundary)) {
    if (!polygon_is_simple(*poly)) throw NonSimpleBoundary("boundary polygon is not simple");
  }
  CheckReport r;
  r.theorem = "flux-necessary";
  const double L = shape_perimeter(boundary);
  const double area = shape_area(boundary);
  const auto [hmin, hmax] = f.extrema();
  r.hypotheses.push_back(hyp("curvature-positive", hmin > 0, {{"H_min", hmin}}));
  r.measured = {{"H_min", hmin}, {"perimeter", L}, {"area", area}};
  r.bound = L / (2.0 * area);
  r.margin = r.bound - hmin;
  r.tolerances = {{"relative", 1e-12}};
  if (!finalize_hypotheses(r)) return r;
  conclude(r, hmin <= r.bound * (1.0 + 1e-12));
  return r;
}

CheckReport check_slab(const GraphSolution& sol, const Eigen::Vector3d& v,
                       const PrescribedFunction& f) {
  CheckReport r;
  r.theorem = "slab";
  const Eigen::Vector3d vu = v.normalized();
  const double fp = f.eval(vu), fm = f.eval(-vu);
  r.hypotheses.push_back(
      hyp("curvature-vanishes-at-poles", std::abs(fp) <= kPoleTol && std::abs(fm) <= kPoleTol,
          {{"H_plus_v", fp}, {"H_minus_v", fm}}));
  r.hypotheses.push_back(hyp_unverified("embeddedness"));
  const double h = sol.grid->spacing();
  const double tol = 10.0 * h * h;
  r.tolerances = {{"slab", tol}, {"pole", kPoleTol}};
  if (!finalize_hypotheses(r)) return r;

  double mu1 = std::numeric_limits<double>::infinity(), mu2 = -mu1;
  for (const Eigen::Vector2d& b : shape_boundary_points(sol.grid->domain().shape, 4096)) {
    const double s = vu.dot(Eigen::Vector3d(b.x(), b.y(), sol.g.eval(b)));
    mu1 = std::min(mu1, s);
    mu2 = std::max(mu2, s);
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  const GridMask& grid = *sol.grid;
  for (const int node : grid.interior_nodes()) {
    const int i = node % grid.nx(), j = node / grid.nx();
    const double s =
        vu.dot(Eigen::Vector3d(grid.node_x(i), grid.node_y(j), sol.node_value(i, j)));
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  r.measured = {{"mu1", mu1}, {"mu2", mu2}, {"surface_min", lo}, {"surface_max", hi}};
  r.bound = mu2 + tol;
  r.margin = std::min(lo - (mu1 - tol), (mu2 + tol) - hi);
  conclude(r, lo >= mu1 - tol && hi <= mu2 + tol);
  return r;
}

CheckReport check_height_area(const GraphSolution& sol, const PrescribedFunction& f) {
  CheckReport r;
  r.theorem = "height-area";
  const auto [hmin, hmax] = f.extrema();
  r.hypotheses.push_back(hyp("curvature-positive", hmin > 0, {{"H_min", hmin}}));
  r.hypotheses.push_back(hyp("planar-boundary", sol.boundary_is_planar()));
  r.tolerances = {{"relative", 1e-2}};
  if (!finalize_hypotheses(r)) return r;

  const HeightStats hs = height(sol);
  const double area = surface_area(sol);
  r.bound = hmax * area / (2.0 * M_PI);
  r.measured = {{"height", hs.height},
                {"area", area},
                {"H_max", hmax},
                {"ratio", hs.height / r.bound}};
  r.margin = r.bound - hs.height;
  conclude(r, hs.height <= r.bound * (1.0 + 1e-2));
  return r;
}

CheckReport check_one_side(const GraphSolution& sol, const PrescribedFunction& f,
                           const Eigen::Vector3d& v) {
  CheckReport r;
  r.theorem = "one-side";
  const Eigen::Vector3d vu = v.normalized();
  const double fp = f.eval(vu), fm = f.eval(-vu);
  r.hypotheses.push_back(
      hyp("opposite-pole-signs", fp * fm < 0, {{"H_plus_v", fp}, {"H_minus_v", fm}}));
  r.hypotheses.push_back(hyp("planar-boundary", sol.boundary_is_planar()));
  const double h = sol.grid->spacing();
  r.tolerances = {{"sign", kSignTol}, {"boundary_layer", 2.0 * h}};
  if (!finalize_hypotheses(r)) return r;
  if (!graph_axis(vu)) throw Error("check_one_side on graph solutions requires v = e3");

  const GridMask& grid = *sol.grid;
  double max_u = -std::numeric_limits<double>::infinity();
  double min_u = std::numeric_limits<double>::infinity();
  double worst_interior = 0;  // sign-adjusted max over nodes away from the boundary layer
  const double sign = fp > 0 ? 1.0 : -1.0;
  bool strict = true;
  for (const int node : grid.interior_nodes()) {
    const int i = node % grid.nx(), j = node / grid.nx();
    const double u = sol.node_value(i, j);
    max_u = std::max(max_u, u);
    min_u = std::min(min_u, u);
    const double dist = shape_boundary_distance(grid.domain().shape,
                                                {grid.node_x(i), grid.node_y(j)});
    if (dist > 2.0 * h && sign * u >= 0) {
      strict = false;
      worst_interior = std::max(worst_interior, sign * u);
    }
  }
  r.measured = {{"max_u", max_u}, {"min_u", min_u}, {"H_plus_v", fp}};
  const double near_side = sign > 0 ? max_u : -min_u;
  r.bound = kSignTol;
  r.margin = kSignTol - near_side;
  conclude(r, near_side < kSignTol && strict);
  return r;
}

CheckReport check_lambda_one_side(const GraphSolution& sol, const Eigen::Vector3d& w,
                                  double lambda, const Eigen::Vector3d& v) {
  CheckReport r;
  r.theorem = "lambda-one-side";
  const double vw = v.normalized().dot(w.normalized());
  r.hypotheses.push_back(hyp("lambda-in-range", lambda >= 0 && lambda <= 1, {{"lambda", lambda}}));
  r.hypotheses.push_back(
      hyp("density-alignment", std::abs(vw) >= lambda - 1e-12, {{"v_dot_w", vw}}));
  r.hypotheses.push_back(hyp("planar-boundary", sol.boundary_is_planar()));
  r.tolerances = {{"sign", kSignTol}, {"rigidity", 1e-6}};
  if (!finalize_hypotheses(r)) return r;
  if (!graph_axis(v.normalized()))
    throw Error("check_lambda_one_side on graph solutions requires v = e3");

  const double sign = vw >= 0 ? 1.0 : -1.0;
  double side_max = -std::numeric_limits<double>::infinity();
  double touch = std::numeric_limits<double>::infinity();  // min |u|
  double abs_max = 0;
  for (const double u : sol.u) {
    side_max = std::max(side_max, sign * u);
    touch = std::min(touch, std::abs(u));
    abs_max = std::max(abs_max, std::abs(u));
  }
  r.measured = {{"side_max", side_max}, {"min_abs_u", touch}, {"max_abs_u", abs_max},
                {"v_dot_w", vw}};
  r.bound = kSignTol;
  r.margin = kSignTol - side_max;
  bool ok = side_max <= kSignTol;
  if (ok && touch <= kSignTol) {
    // rigidity: touching the boundary plane forces |<v,w>| = lambda and a
    // planar solution
    ok = std::abs(std::abs(vw) - lambda) <= 1e-6 && abs_max <= 1e-6;
    r.measured["rigidity_gap"] = std::abs(std::abs(vw) - lambda);
  }
  conclude(r, ok);
  return r;
}

CheckReport check_reflection_symmetry(const GraphSolution& sol, const PrescribedFunction& f,
                                      const Eigen::Vector2d& plane_normal,
                                      double solver_tolerance) {
  CheckReport r;
  r.theorem = "reflection-symmetry";
  const Eigen::Vector2d n = plane_normal.normalized();
  const GridMask& grid = *sol.grid;
  const Eigen::Vector2d center = domain_center(grid.domain().shape);

  // boundary symmetric about the plane through the domain center
  if (const PolygonShape* poly = std::get_if<PolygonShape>(&grid.domain().shape)) {
    for (const auto& p : poly->vertices) {
      const Eigen::Vector2d q = p - 2.0 * n.dot(p - center) * n;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& other : poly->vertices) best = std::min(best, (q - other).norm());
      if (best > 1e-9) throw AsymmetricDomain("boundary is not symmetric about the plane");
    }
  }

  const Eigen::Vector3d n3(n.x(), n.y(), 0.0);
  r.hypotheses.push_back(
      hyp("curvature-reflection-invariant", f.respects_reflection(n3)));
  const bool is_disc = std::holds_alternative<Disc>(grid.domain().shape);
  r.hypotheses.push_back(hyp("boundary-symmetric", true));
  if (is_disc)
    r.hypotheses.push_back(hyp("boundary-splits-into-graphs", true));
  else
    r.hypotheses.push_back(hyp_unverified("boundary-splits-into-graphs"));

  double max_u = -std::numeric_limits<double>::infinity();
  double min_u = std::numeric_limits<double>::infinity();
  for (const double u : sol.u) {
    max_u = std::max(max_u, u);
    min_u = std::min(min_u, u);
  }
  r.hypotheses.push_back(hyp("one-sided", max_u <= kSignTol || min_u >= -kSignTol,
                             {{"max_u", max_u}, {"min_u", min_u}}));

  const double h = grid.spacing();
  // grid-aligned reflections map nodes to nodes exactly
  const bool axis_aligned = std::abs(std::abs(n.x()) - 1.0) <= 1e-12 ||
                            std::abs(std::abs(n.y()) - 1.0) <= 1e-12;
  const double tol = axis_aligned ? 10.0 * solver_tolerance : 10.0 * h * h;
  r.tolerances = {{"deviation", tol}};

  double dev = 0;
  for (const int node : grid.interior_nodes()) {
    const int i = node % grid.nx(), j = node / grid.nx();
    const Eigen::Vector2d p(grid.node_x(i), grid.node_y(j));
    const Eigen::Vector2d q = p - 2.0 * n.dot(p - center) * n;
    const double fx = (q.x() - grid.node_x(0)) / h;
    const double fy = (q.y() - grid.node_y(0)) / h;
    const int qi = static_cast<int>(std::lround(fx));
    const int qj = static_cast<int>(std::lround(fy));
    double uq;
    if (std::abs(fx - qi) <= 1e-9 && std::abs(fy - qj) <= 1e-9) {
      if (!grid.is_interior(qi, qj)) continue;
      uq = sol.node_value(qi, qj);
    } else if (!sol.interpolate(q, uq)) {
      continue;
    }
    dev = std::max(dev, std::abs(sol.node_value(i, j) - uq));
  }
  r.measured = {{"deviation", dev}};
  r.bound = tol;
  r.margin = tol - dev;
  if (!finalize_hypotheses(r)) return r;
  conclude(r, dev <= tol);
  return r;
}

CheckReport check_rotational_symmetry(const GraphSolution& sol, const PrescribedFunction& f) {
  if (!std::holds_alternative<Disc>(sol.grid->domain().shape))
    throw NotCircularBoundary("rotational symmetry check requires a circular boundary");
  CheckReport r;
  r.theorem = "rotational-symmetry";
  r.hypotheses.push_back(
      hyp("curvature-rotational", f.is_rotational_about(Eigen::Vector3d::UnitZ())));
  const double h = sol.grid->spacing();
  const double tol = 20.0 * h * h;
  r.tolerances = {{"angular_spread", tol}};
  if (!finalize_hypotheses(r)) return r;

  const RingProfile rings = ring_profile(sol);
  double dev = 0;
  for (const double s : rings.spread) dev = std::max(dev, s);
  r.measured = {{"angular_spread", dev}, {"rings", static_cast<double>(rings.radius.size())}};
  r.bound = tol;
  r.margin = tol - dev;
  conclude(r, dev <= tol);
  return r;
}

CheckReport check_cylinder_containment(const GraphSolution& sol, const PrescribedFunction& f,
                                       const Eigen::Vector3d& v) {
  if (!graph_axis(v.normalized())) throw Error("cylinder check on graphs requires v = e3");
  CheckReport r;
  r.theorem = "cylinder-containment";
  double equator_max = 0;
  for (int k = 0; k < 64; ++k) {
    const double a = 2.0 * M_PI * k / 64;
    equator_max = std::max(equator_max,
                           std::abs(f.eval(Eigen::Vector3d(std::cos(a), std::sin(a), 0.0))));
  }
  const bool convex = std::holds_alternative<Disc>(sol.grid->domain().shape) ||
                      polygon_is_convex(std::get<PolygonShape>(sol.grid->domain().shape));
  r.hypotheses.push_back(
      hyp("curvature-vanishes-on-equator", equator_max <= kPoleTol, {{"max", equator_max}}));
  r.hypotheses.push_back(hyp("curvature-odd", f.is_odd()));
  r.hypotheses.push_back(hyp("domain-convex", convex));
  const double h = sol.grid->spacing();
  const double tol = 2.0 * h;
  r.tolerances = {{"dilation", tol}};
  if (!finalize_hypotheses(r)) return r;

  // graph points project onto their own grid nodes; measure the worst
  // signed distance outside the domain
  double worst = -std::numeric_limits<double>::infinity();
  const GridMask& grid = *sol.grid;
  for (const int node : grid.interior_nodes()) {
    const int i = node % grid.nx(), j = node / grid.nx();
    worst = std::max(worst, -shape_boundary_distance(grid.domain().shape,
                                                     {grid.node_x(i), grid.node_y(j)}));
  }
  r.measured = {{"max_outside_distance", std::max(worst, 0.0)}};
  r.bound = tol;
  r.margin = tol - std::max(worst, 0.0);
  conclude(r, worst <= tol);
  return r;
}

CheckReport check_cylinder_containment(const TriMesh& mesh, const Shape& omega,
                                       const PrescribedFunction& f, const Eigen::Vector3d& v,
                                       double spacing) {
  if (!graph_axis(v.normalized())) throw Error("cylinder check requires v = e3");
  CheckReport r;
  r.theorem = "cylinder-containment";
  double equator_max = 0;
  for (int k = 0; k < 64; ++k) {
    const double a = 2.0 * M_PI * k / 64;
    equator_max = std::max(equator_max,
                           std::abs(f.eval(Eigen::Vector3d(std::cos(a), std::sin(a), 0.0))));
  }
  const bool convex = std::holds_alternative<Disc>(omega) ||
                      polygon_is_convex(std::get<PolygonShape>(omega));
  r.hypotheses.push_back(
      hyp("curvature-vanishes-on-equator", equator_max <= kPoleTol, {{"max", equator_max}}));
  r.hypotheses.push_back(hyp("curvature-odd", f.is_odd()));
  r.hypotheses.push_back(hyp("domain-convex", convex));
  const double tol = 2.0 * spacing;
  r.tolerances = {{"dilation", tol}};
  if (!finalize_hypotheses(r)) return r;

  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& p : mesh.vertices())
    worst = std::max(worst, -shape_boundary_distance(omega, {p.x(), p.y()}));
  r.measured = {{"max_outside_distance", std::max(worst, 0.0)}};
  r.bound = tol;
  r.margin = tol - std::max(worst, 0.0);
  conclude(r, worst <= tol);
  return r;
}

CheckReport check_closed_obstruction(const TriMesh& mesh, const PrescribedFunction& h0,
                                     double lambda, const Eigen::Vector3d& v,
                                     double residual_tolerance) {
  if (!mesh.closed()) throw hsurf::OpenMesh("closed-surface obstruction requires a closed mesh");
  CheckReport r;
  r.theorem = "closed-obstruction";
  const Eigen::Vector3d vu = v.normalized();

  double sign_min = std::numeric_limits<double>::infinity();
  double h0_max = 0;
  for (std::size_t fi = 0; fi < mesh.faces().size(); ++fi) {
    const Eigen::Vector3d& n = mesh.face_normals()[fi];
    const double val = h0.eval(n);
    sign_min = std::min(sign_min, val * n.dot(vu));
    h0_max = std::max(h0_max, std::abs(val));
  }
  r.hypotheses.push_back(hyp("sign-condition", sign_min >= -1e-12, {{"min", sign_min}}));
  r.tolerances = {{"residual", residual_tolerance}, {"sign", 1e-12}};

  const double flux = flux_integral(mesh, h0, vu);
  const Eigen::Vector3d va = vector_area(mesh);
  const double area = mesh.total_area();

  // residual sup-norm of H - (h0(N) + lambda) over the vertices
  const std::vector<double> H = discrete_mean_curvature(mesh);
  double res_sup = 0;
  for (std::size_t vi = 0; vi < H.size(); ++vi)
    if (std::isfinite(H[vi]))
      res_sup = std::max(res_sup,
                         std::abs(H[vi] - (h0.eval(mesh.vertex_normal(static_cast<int>(vi))) +
                                           lambda)));

  r.measured = {{"flux", flux},
                {"vector_area_norm", va.norm()},
                {"area", area},
                {"residual_sup", res_sup},
                {"h0_max_on_normals", h0_max}};
  if (!finalize_hypotheses(r)) return r;
  if (h0_max <= 1e-12) {
    // the obstruction argument needs h0 not identically zero on the normals
    r.pass = false;
    r.conclusion = "inconclusive";
    return r;
  }
  r.bound = residual_tolerance * area;
  r.margin = flux - r.bound;
  conclude(r, flux > r.bound);
  return r;
}

RingProfile ring_profile(const GraphSolution& sol, int angular_samples) {
  const Disc* disc = std::get_if<Disc>(&sol.grid->domain().shape);
  if (!disc) throw NotCircularBoundary("ring resampling requires a disc domain");
  RingProfile out;
  const double h = sol.grid->spacing();
  for (double rho = h; rho <= disc->radius - 2.0 * h; rho += h) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0;
    int count = 0;
    for (int a = 0; a < angular_samples; ++a) {
      const double phi = 2.0 * M_PI * a / angular_samples;
      const Eigen::Vector2d p =
          disc->center + rho * Eigen::Vector2d(std::cos(phi), std::sin(phi));
      double u;
      if (!sol.interpolate(p, u)) continue;
      lo = std::min(lo, u);
      hi = std::max(hi, u);
      sum += u;
      ++count;
    }
    if (count < angular_samples / 4) continue;
    out.radius.push_back(rho);
    out.mean.push_back(sum / count);
    out.spread.push_back(hi - lo);
  }
  return out;
}

}  // namespace hsurf
