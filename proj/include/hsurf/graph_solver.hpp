#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <variant>
#include <vector>

#include "hsurf/curvature.hpp"
#include "hsurf/expr.hpp"
#include "hsurf/grid.hpp"
#include "hsurf/parallel.hpp"

namespace hsurf {

/// Dirichlet boundary values, a constant or a closed-form expression in x, y.
class DirichletData {
 public:
  DirichletData() : data_(0.0) {}
  static DirichletData constant(double c);
  static DirichletData expression(const std::string& expr);

  double eval(const Eigen::Vector2d& p) const;
  bool is_constant_zero() const;

 private:
  std::variant<double, Expression> data_;
};

struct SolverConfig {
  double tolerance = 1e-10;           // residual max-norm at acceptance
  int max_newton_iterations = 50;
  int continuation_steps = 10;
  double min_continuation_step = 1.0 / 160.0;
  double min_line_search_step = 1.0 / 1048576.0;  // 2^-20
  double gradient_blowup = 1e6;       // max |Du| before boundary verticality
  Exec exec = Exec::Parallel;
};

struct ContinuationRecord {
  double t;
  int newton_iterations;
  double residual;
};

/// Discrete solution of the prescribed-curvature graph Dirichlet problem.
struct GraphSolution {
  std::shared_ptr<const GridMask> grid;
  std::vector<double> u;        // interior values, unknown order
  DirichletData g;
  std::vector<double> ghost_g;  // per node id: boundary_coeff * g(crossing)
  std::vector<ContinuationRecord> continuation;
  double final_residual = 0;
  int total_newton_iterations = 0;

  /// Value at any node of the mask or its ghost ring.
  double node_value(int i, int j) const;
  /// Central-difference gradient at an interior node.
  Eigen::Vector2d gradient(int i, int j) const;
  /// Bilinear interpolation; false if a stencil corner is not interior.
  bool interpolate(const Eigen::Vector2d& p, double& out) const;
  /// Boundary crossings with their Dirichlet values.
  std::vector<std::pair<Eigen::Vector2d, double>> boundary_trace() const;
  bool boundary_is_planar(double tol = 1e-12) const;
};

/// Discrete residual F(u) = div_h(Du/W) - 2 scale H(N(Du)) at the interior
/// nodes, conservative flux form with half-node midpoint gradients.
std::vector<double> residual(const GridMask& grid, const DirichletData& g,
                             const PrescribedFunction& f, const std::vector<double>& u,
                             double scale = 1.0, Exec exec = Exec::Parallel);
std::vector<double> residual(const PlanarDomain& domain, const DirichletData& g,
                             const PrescribedFunction& f, const std::vector<double>& u,
                             double scale = 1.0, Exec exec = Exec::Parallel);

/// Newton matrix dF/du including the curvature differential term.
Eigen::SparseMatrix<double> assemble_jacobian(const GridMask& grid, const DirichletData& g,
                                              const PrescribedFunction& f,
                                              const std::vector<double>& u, double scale = 1.0,
                                              Exec exec = Exec::Parallel);

/// Solves the Dirichlet problem by damped Newton with linear continuation in
/// scale * H from the discrete harmonic extension of g. Throws NonConvergence
/// (with the last continuation parameter reached) or GradientBlowup.
GraphSolution solve_dirichlet(const PlanarDomain& domain, const DirichletData& g,
                              const PrescribedFunction& f, const SolverConfig& cfg = {});

/// Composite midpoint quadrature of sqrt(1+|Du|^2) with exact cut-cell area
/// weights.
double surface_area(const GraphSolution& sol, Exec exec = Exec::Parallel);

struct HeightStats {
  double min_u;
  double max_u;
  double height;  // max |u|
};

/// Height relative to the boundary plane; requires g = 0 (BoundaryNotPlanar).
HeightStats height(const GraphSolution& sol);

/// Max |Du| over interior nodes.
double max_gradient(const GraphSolution& sol);

}  // namespace hsurf
