#include "hsurf/graph_solver.hpp"

#include <Eigen/SparseLU>
#include <cmath>

#include "hsurf/errors.hpp"
#include "hsurf/log.hpp"

namespace hsurf {

namespace {

const std::vector<std::string> kPlaneVars = {"x", "y"};

/// Per-node Dirichlet constants for the ghost ring.
std::vector<double> ghost_constants(const GridMask& grid, const DirichletData& g) {
  std::vector<double> gc(static_cast<std::size_t>(grid.nx()) * static_cast<std::size_t>(grid.ny()),
                         0.0);
  for (const int node : grid.ghost_nodes()) {
    const GhostStencil* gs = grid.ghost(node);
    gc[static_cast<std::size_t>(node)] = gs->boundary_coeff * g.eval(gs->crossing);
  }
  return gc;
}

struct Stencil {
  // values at the 9 stencil positions around (i,j):
  // c, e, w, n, s, ne, nw, se, sw
  double v[9];
};

constexpr int kDi[9] = {0, 1, -1, 0, 0, 1, -1, 1, -1};
constexpr int kDj[9] = {0, 0, 0, 1, -1, 1, 1, -1, -1};

inline double fetch(const GridMask& grid, const std::vector<double>& gconst,
                    const std::vector<double>& u, int i, int j) {
  const int id = grid.node_id(i, j);
  const int k = grid.unknown_index(id);
  if (k >= 0) return u[static_cast<std::size_t>(k)];
  const GhostStencil* gs = grid.ghost(id);
  if (!gs) return 0.0;
  double v = gconst[static_cast<std::size_t>(id)];
  for (int a = 0; a < gs->nterms; ++a)
    v += gs->coeff[a] * u[static_cast<std::size_t>(gs->unknown[a])];
  return v;
}

inline Stencil fetch_stencil(const GridMask& grid, const std::vector<double>& gconst,
                             const std::vector<double>& u, int i, int j) {
  Stencil s;
  for (int k = 0; k < 9; ++k) s.v[k] = fetch(grid, gconst, u, i + kDi[k], j + kDj[k]);
  return s;
}

enum { C = 0, E, W, N, S, NE, NW, SE, SW };

/// F(u) at one interior node, plus optionally the 9 stencil derivatives.
double node_residual(const PrescribedFunction& f, double scale, double h, const Stencil& st,
                     double* deriv) {
  const double* v = st.v;
  const double inv_h = 1.0 / h;
  const double inv_4h = 0.25 * inv_h;

  struct Face {
    double a, b;      // gradient components at the face midpoint
    double flux;      // a / W
    double pa, pb;    // d flux / d a, d flux / d b
  };
  auto face = [&](double a, double b) {
    Face fc;
    fc.a = a;
    fc.b = b;
    const double w2 = 1.0 + a * a + b * b;
    const double w = std::sqrt(w2);
    fc.flux = a / w;
    const double w3 = w2 * w;
    fc.pa = (1.0 + b * b) / w3;
    fc.pb = -a * b / w3;
    return fc;
  };

  const Face fe = face((v[E] - v[C]) * inv_h, (v[NE] + v[N] - v[SE] - v[S]) * inv_4h);
  const Face fw = face((v[C] - v[W]) * inv_h, (v[N] + v[NW] - v[S] - v[SW]) * inv_4h);
  const Face fn = face((v[N] - v[C]) * inv_h, (v[NE] + v[E] - v[NW] - v[W]) * inv_4h);
  const Face fs = face((v[C] - v[S]) * inv_h, (v[E] + v[SE] - v[W] - v[SW]) * inv_4h);

  const double div = (fe.flux - fw.flux + fn.flux - fs.flux) * inv_h;

  const Eigen::Vector2d p((v[E] - v[W]) * 0.5 * inv_h, (v[N] - v[S]) * 0.5 * inv_h);
  const double rhs = 2.0 * scale * f.eval_from_gradient(p);

  if (deriv) {
    for (int k = 0; k < 9; ++k) deriv[k] = 0;
    // east face, + sign in the divergence
    {
      const double ca = fe.pa * inv_h * inv_h;       // d/d(a_E) through div
      const double cb = fe.pb * inv_h * inv_4h;
      deriv[E] += ca;
      deriv[C] -= ca;
      deriv[NE] += cb;
      deriv[N] += cb;
      deriv[SE] -= cb;
      deriv[S] -= cb;
    }
    // west face, - sign
    {
      const double ca = fw.pa * inv_h * inv_h;
      const double cb = fw.pb * inv_h * inv_4h;
      deriv[C] -= ca;
      deriv[W] += ca;
      deriv[N] -= cb;
      deriv[NW] -= cb;
      deriv[S] += cb;
      deriv[SW] += cb;
    }
    // north face, + sign
    {
      const double ca = fn.pa * inv_h * inv_h;
      const double cb = fn.pb * inv_h * inv_4h;
      deriv[N] += ca;
      deriv[C] -= ca;
      deriv[NE] += cb;
      deriv[E] += cb;
      deriv[NW] -= cb;
      deriv[W] -= cb;
    }
    // south face, - sign
    {
      const double ca = fs.pa * inv_h * inv_h;
      const double cb = fs.pb * inv_h * inv_4h;
      deriv[C] -= ca;
      deriv[S] += ca;
      deriv[E] -= cb;
      deriv[SE] -= cb;
      deriv[W] += cb;
      deriv[SW] += cb;
    }
    // curvature term: -2 scale d/dp H(N(p)) with N = (-p, 1)/W
    {
      const double w2 = 1.0 + p.squaredNorm();
      const double w = std::sqrt(w2);
      const double w3 = w2 * w;
      const Eigen::Vector3d nrm(-p.x() / w, -p.y() / w, 1.0 / w);
      const Eigen::Vector3d grad = f.differential(nrm);
      const Eigen::Vector3d dn_dp1(-1.0 / w + p.x() * p.x() / w3, p.x() * p.y() / w3,
                                   -p.x() / w3);
      const Eigen::Vector3d dn_dp2(p.x() * p.y() / w3, -1.0 / w + p.y() * p.y() / w3,
                                   -p.y() / w3);
      const double q1 = 2.0 * scale * grad.dot(dn_dp1);
      const double q2 = 2.0 * scale * grad.dot(dn_dp2);
      deriv[E] -= q1 * 0.5 * inv_h;
      deriv[W] += q1 * 0.5 * inv_h;
      deriv[N] -= q2 * 0.5 * inv_h;
      deriv[S] += q2 * 0.5 * inv_h;
    }
  }
  return div - rhs;
}

std::vector<double> residual_impl(const GridMask& grid, const std::vector<double>& gconst,
                                  const PrescribedFunction& f, const std::vector<double>& u,
                                  double scale, Exec exec) {
  const auto& nodes = grid.interior_nodes();
  std::vector<double> out(nodes.size());
  for_each_index(static_cast<std::ptrdiff_t>(nodes.size()), exec, [&](std::ptrdiff_t k) {
    const int node = nodes[static_cast<std::size_t>(k)];
    const int i = node % grid.nx(), j = node / grid.nx();
    const Stencil st = fetch_stencil(grid, gconst, u, i, j);
    out[static_cast<std::size_t>(k)] =
        node_residual(f, scale, grid.spacing(), st, nullptr);
  });
  return out;
}

struct Triplet {
  int row = -1, col = -1;
  double value = 0;
};

Eigen::SparseMatrix<double> jacobian_impl(const GridMask& grid,
                                          const std::vector<double>& gconst,
                                          const PrescribedFunction& f,
                                          const std::vector<double>& u, double scale,
                                          Exec exec) {
  const auto& nodes = grid.interior_nodes();
  const int nunk = grid.num_unknowns();
  // 9 stencil positions, each resolving to at most 3 unknowns through a ghost
  constexpr int kSlots = 27;
  std::vector<Triplet> trips(static_cast<std::size_t>(nunk) * kSlots);

  for_each_index(static_cast<std::ptrdiff_t>(nodes.size()), exec, [&](std::ptrdiff_t k) {
    const int node = nodes[static_cast<std::size_t>(k)];
    const int i = node % grid.nx(), j = node / grid.nx();
    const Stencil st = fetch_stencil(grid, gconst, u, i, j);
    double deriv[9];
    node_residual(f, scale, grid.spacing(), st, deriv);
    Triplet* slot = &trips[static_cast<std::size_t>(k) * kSlots];
    int used = 0;
    for (int m = 0; m < 9; ++m) {
      const int id = grid.node_id(i + kDi[m], j + kDj[m]);
      const int unk = grid.unknown_index(id);
      if (unk >= 0) {
        slot[used++] = {static_cast<int>(k), unk, deriv[m]};
      } else if (const GhostStencil* gs = grid.ghost(id)) {
        for (int a = 0; a < gs->nterms; ++a)
          slot[used++] = {static_cast<int>(k), gs->unknown[a], deriv[m] * gs->coeff[a]};
      }
    }
  });

  // keep structural zeros so the sparsity pattern depends on geometry only
  std::vector<Eigen::Triplet<double>> list;
  list.reserve(trips.size());
  for (const Triplet& t : trips)
    if (t.col >= 0) list.emplace_back(t.row, t.col, t.value);
  Eigen::SparseMatrix<double> A(nunk, nunk);
  A.setFromTriplets(list.begin(), list.end());
  return A;
}

double max_norm(const std::vector<double>& v) {
  double m = 0;
  for (const double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_gradient_impl(const GridMask& grid, const std::vector<double>& gconst,
                         const std::vector<double>& u) {
  double m = 0;
  const double inv_2h = 0.5 / grid.spacing();
  for (const int node : grid.interior_nodes()) {
    const int i = node % grid.nx(), j = node / grid.nx();
    const double px = (fetch(grid, gconst, u, i + 1, j) - fetch(grid, gconst, u, i - 1, j)) * inv_2h;
    const double py = (fetch(grid, gconst, u, i, j + 1) - fetch(grid, gconst, u, i, j - 1)) * inv_2h;
    m = std::max(m, std::max(std::abs(px), std::abs(py)));
  }
  return m;
}

/// Discrete harmonic extension of g: 5-point Laplace with the same ghost maps.
std::vector<double> harmonic_extension(const GridMask& grid, const std::vector<double>& gconst) {
  const auto& nodes = grid.interior_nodes();
  const int nunk = grid.num_unknowns();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(nunk) * 16);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nunk);
  for (int k = 0; k < nunk; ++k) {
    const int node = nodes[static_cast<std::size_t>(k)];
    const int i = node % grid.nx(), j = node / grid.nx();
    const int axis[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
    auto add = [&](int ii, int jj, double c) {
      const int id = grid.node_id(ii, jj);
      const int unk = grid.unknown_index(id);
      if (unk >= 0) {
        trips.emplace_back(k, unk, c);
      } else if (const GhostStencil* gs = grid.ghost(id)) {
        for (int a = 0; a < gs->nterms; ++a) trips.emplace_back(k, gs->unknown[a], c * gs->coeff[a]);
        rhs[k] -= c * gconst[static_cast<std::size_t>(id)];
      }
    };
    add(i, j, -4.0);
    for (const auto& nb : axis) add(nb[0], nb[1], 1.0);
  }
  Eigen::SparseMatrix<double> A(nunk, nunk);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  if (lu.info() != Eigen::Success) throw SolveFailure("harmonic extension factorization failed");
  Eigen::VectorXd x = lu.solve(rhs);
  return std::vector<double>(x.data(), x.data() + x.size());
}

}  // namespace

DirichletData DirichletData::constant(double c) {
  DirichletData d;
  d.data_ = c;
  return d;
}

DirichletData DirichletData::expression(const std::string& expr) {
  DirichletData d;
  d.data_ = Expression::parse(expr, kPlaneVars);
  return d;
}

double DirichletData::eval(const Eigen::Vector2d& p) const {
  if (const double* c = std::get_if<double>(&data_)) return *c;
  const double vars[2] = {p.x(), p.y()};
  return std::get<Expression>(data_).eval(vars);
}

bool DirichletData::is_constant_zero() const {
  const double* c = std::get_if<double>(&data_);
  return c && *c == 0.0;
}

double GraphSolution::node_value(int i, int j) const {
  return fetch(*grid, ghost_g, u, i, j);
}

Eigen::Vector2d GraphSolution::gradient(int i, int j) const {
  const double inv_2h = 0.5 / grid->spacing();
  return {(node_value(i + 1, j) - node_value(i - 1, j)) * inv_2h,
          (node_value(i, j + 1) - node_value(i, j - 1)) * inv_2h};
}

bool GraphSolution::interpolate(const Eigen::Vector2d& p, double& out) const {
  const GridMask& m = *grid;
  const double fx = (p.x() - m.node_x(0)) / m.spacing();
  const double fy = (p.y() - m.node_y(0)) / m.spacing();
  const int i = static_cast<int>(std::floor(fx));
  const int j = static_cast<int>(std::floor(fy));
  if (!m.is_interior(i, j) || !m.is_interior(i + 1, j) || !m.is_interior(i, j + 1) ||
      !m.is_interior(i + 1, j + 1))
    return false;
  const double sx = fx - i, sy = fy - j;
  out = (1 - sx) * (1 - sy) * node_value(i, j) + sx * (1 - sy) * node_value(i + 1, j) +
        (1 - sx) * sy * node_value(i, j + 1) + sx * sy * node_value(i + 1, j + 1);
  return true;
}

std::vector<std::pair<Eigen::Vector2d, double>> GraphSolution::boundary_trace() const {
  std::vector<std::pair<Eigen::Vector2d, double>> trace;
  trace.reserve(grid->ghost_nodes().size());
  for (const int node : grid->ghost_nodes()) {
    const GhostStencil* gs = grid->ghost(node);
    trace.emplace_back(gs->crossing, g.eval(gs->crossing));
  }
  return trace;
}

bool GraphSolution::boundary_is_planar(double tol) const {
  if (g.is_constant_zero()) return true;
  for (const auto& [p, v] : boundary_trace())
    if (std::abs(v) > tol) return false;
  return true;
}

std::vector<double> residual(const GridMask& grid, const DirichletData& g,
                             const PrescribedFunction& f, const std::vector<double>& u,
                             double scale, Exec exec) {
  return residual_impl(grid, ghost_constants(grid, g), f, u, scale, exec);
}

std::vector<double> residual(const PlanarDomain& domain, const DirichletData& g,
                             const PrescribedFunction& f, const std::vector<double>& u,
                             double scale, Exec exec) {
  const auto grid = GridMask::build(domain);
  return residual(*grid, g, f, u, scale, exec);
}

Eigen::SparseMatrix<double> assemble_jacobian(const GridMask& grid, const DirichletData& g,
                                              const PrescribedFunction& f,
                                              const std::vector<double>& u, double scale,
                                              Exec exec) {
  return jacobian_impl(grid, ghost_constants(grid, g), f, u, scale, exec);
}

GraphSolution solve_dirichlet(const PlanarDomain& domain, const DirichletData& g,
                              const PrescribedFunction& f, const SolverConfig& cfg) {
  const auto grid = GridMask::build(domain);
  const std::vector<double> gconst = ghost_constants(*grid, g);

  GraphSolution sol;
  sol.grid = grid;
  sol.g = g;
  sol.ghost_g = gconst;
  sol.u = harmonic_extension(*grid, gconst);

  if (max_gradient_impl(*grid, gconst, sol.u) > cfg.gradient_blowup)
    throw GradientBlowup("gradient blowup in the initial iterate", 0.0);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;
  std::vector<double> history;

  // damped Newton at fixed continuation parameter t; returns success
  auto newton = [&](double t, int& iters_out) {
    std::vector<double> r = residual_impl(*grid, gconst, f, sol.u, t, cfg.exec);
    double rnorm = max_norm(r);
    history.push_back(rnorm);
    int iters = 0;
    while (rnorm > cfg.tolerance) {
      if (iters >= cfg.max_newton_iterations) return false;
      Eigen::SparseMatrix<double> J = jacobian_impl(*grid, gconst, f, sol.u, t, cfg.exec);
      if (!analyzed) {
        lu.analyzePattern(J);
        analyzed = true;
      }
      lu.factorize(J);
      if (lu.info() != Eigen::Success) return false;
      Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(r.size()));
      Eigen::VectorXd d = lu.solve(-rv);

      // Armijo backtracking, halving down to the minimum step
      double alpha = 1.0;
      std::vector<double> u_try(sol.u.size());
      std::vector<double> r_try;
      double rnorm_try = 0;
      for (;;) {
        for (std::size_t m = 0; m < sol.u.size(); ++m)
          u_try[m] = sol.u[m] + alpha * d[static_cast<Eigen::Index>(m)];
        r_try = residual_impl(*grid, gconst, f, u_try, t, cfg.exec);
        rnorm_try = max_norm(r_try);
        if (rnorm_try <= (1.0 - 1e-4 * alpha) * rnorm) break;
        alpha *= 0.5;
        if (alpha < cfg.min_line_search_step) return false;
      }
      sol.u.swap(u_try);
      r.swap(r_try);
      rnorm = rnorm_try;
      history.push_back(rnorm);
      ++iters;
      if (max_gradient_impl(*grid, gconst, sol.u) > cfg.gradient_blowup)
        throw GradientBlowup("gradient blowup during Newton iteration", t);
    }
    iters_out = iters;
    sol.final_residual = rnorm;
    return true;
  };

  const auto [hmin, hmax] = f.extrema();
  const bool zero_curvature = hmin == 0.0 && hmax == 0.0;
  const int steps = zero_curvature ? 1 : std::max(1, cfg.continuation_steps);

  double t = 0;
  double dt = 1.0 / steps;
  std::vector<double> u_accepted = sol.u;
  while (t < 1.0 - 1e-14) {
    const double t_next = std::min(1.0, t + dt);
    history.clear();
    int iters = 0;
    bool ok = false;
    try {
      ok = newton(t_next, iters);
    } catch (const GradientBlowup&) {
      throw;
    }
    if (ok) {
      t = t_next;
      u_accepted = sol.u;
      sol.continuation.push_back({t, iters, sol.final_residual});
      sol.total_newton_iterations += iters;
      HSURF_LOG_DEBUG("continuation t=%g converged in %d iterations", t, iters);
    } else {
      sol.u = u_accepted;  // restart from the last converged state
      dt *= 0.5;
      HSURF_LOG_INFO("continuation step failed, halving to dt=%g", dt);
      if (dt < cfg.min_continuation_step - 1e-15)
        throw NonConvergence("continuation failed; the problem may have no solution", t,
                             history);
    }
  }
  return sol;
}

double surface_area(const GraphSolution& sol, Exec exec) {
  const GridMask& grid = *sol.grid;
  const int nx = grid.nx(), ny = grid.ny();
  const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(nx) * ny;
  std::vector<double> terms(static_cast<std::size_t>(total), 0.0);
  constexpr int kNbi[8] = {1, -1, 0, 0, 1, -1, 1, -1};
  constexpr int kNbj[8] = {0, 0, 1, -1, 1, 1, -1, -1};
  for_each_index(total, exec, [&](std::ptrdiff_t id) {
    const int i = static_cast<int>(id) % nx, j = static_cast<int>(id) / nx;
    const double w = grid.cell_overlap(i, j);
    if (w <= 0) return;
    int ri = i, rj = j;
    if (!grid.is_interior(i, j)) {
      bool found = false;
      for (int d = 0; d < 8; ++d) {
        if (grid.is_interior(i + kNbi[d], j + kNbj[d])) {
          ri = i + kNbi[d];
          rj = j + kNbj[d];
          found = true;
          break;
        }
      }
      if (!found) return;  // detached sliver, area O(h^3)
    }
    const Eigen::Vector2d p = sol.gradient(ri, rj);
    terms[static_cast<std::size_t>(id)] = w * std::hypot(1.0, p.x(), p.y());
  });
  return pairwise_sum(terms);
}

HeightStats height(const GraphSolution& sol) {
  if (!sol.boundary_is_planar())
    throw BoundaryNotPlanar("height requires zero boundary data");
  HeightStats hs{0, 0, 0};
  bool first = true;
  for (const double v : sol.u) {
    if (first) {
      hs.min_u = hs.max_u = v;
      first = false;
    } else {
      hs.min_u = std::min(hs.min_u, v);
      hs.max_u = std::max(hs.max_u, v);
    }
  }
  hs.height = std::max(std::abs(hs.min_u), std::abs(hs.max_u));
  return hs;
}

double max_gradient(const GraphSolution& sol) {
  return max_gradient_impl(*sol.grid, sol.ghost_g, sol.u);
}

}  // namespace hsurf
