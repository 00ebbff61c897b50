#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "hsurf/curvature.hpp"
#include "hsurf/graph_solver.hpp"
#include "hsurf/grid.hpp"
#include "hsurf/meshgeom.hpp"

#include "json.hpp"

namespace hsurf {

enum class HypothesisStatus { Satisfied, Violated, NotVerified };

struct Hypothesis {
  std::string name;
  HypothesisStatus status = HypothesisStatus::NotVerified;
  std::map<std::string, double> measured;
};

/// Structured pass/fail record for one theorem instance. A violated verified
/// hypothesis forces pass = false with the conclusion marked vacuous; no
/// check asserts a conclusion under failed hypotheses.
struct CheckReport {
  std::string theorem;
  std::vector<Hypothesis> hypotheses;
  std::map<std::string, double> measured;
  double bound = 0;
  double margin = 0;
  bool pass = false;
  std::string conclusion;  // verified | violated | vacuous | inconclusive
  std::map<std::string, double> tolerances;

  bool vacuous() const;
  nlohmann::ordered_json to_json() const;
};

/// Known theorem ids accepted by the CLI.
const std::vector<std::string>& check_ids();

/// Necessary solvability bound H_min <= L / (2 area) for a positive
/// prescribed function over a simple closed planar boundary.
CheckReport check_flux_necessary(const Shape& boundary, const PrescribedFunction& f);

/// Slab containment between the extreme boundary heights along v when the
/// prescribed function vanishes at both poles +-v.
CheckReport check_slab(const GraphSolution& sol, const Eigen::Vector3d& v,
                       const PrescribedFunction& f);

/// Height bounded by H_max area / (2 pi) for positive prescribed functions
/// and planar boundary; also reports the sharpness ratio.
CheckReport check_height_area(const GraphSolution& sol, const PrescribedFunction& f);

/// Strict one-sidedness of the interior when H(v) H(-v) < 0.
CheckReport check_one_side(const GraphSolution& sol, const PrescribedFunction& f,
                           const Eigen::Vector3d& v);

/// One-sidedness for translator-type functions with |<v,w>| >= lambda,
/// including the rigidity clause when the interior touches the plane.
CheckReport check_lambda_one_side(const GraphSolution& sol, const Eigen::Vector3d& w,
                                  double lambda, const Eigen::Vector3d& v);

/// Reflection symmetry of the solution about a vertical plane through the
/// domain center with the given in-plane normal.
CheckReport check_reflection_symmetry(const GraphSolution& sol, const PrescribedFunction& f,
                                      const Eigen::Vector2d& plane_normal,
                                      double solver_tolerance = 1e-10);

/// Angular spread of the solution over polar rings for rotational prescribed
/// functions on circular boundaries.
CheckReport check_rotational_symmetry(const GraphSolution& sol, const PrescribedFunction& f);

/// Projection of the surface into the solid cylinder over the convex domain
/// when the function vanishes on the equator and is odd.
CheckReport check_cylinder_containment(const GraphSolution& sol, const PrescribedFunction& f,
                                       const Eigen::Vector3d& v);
CheckReport check_cylinder_containment(const TriMesh& mesh, const Shape& omega,
                                       const PrescribedFunction& f, const Eigen::Vector3d& v,
                                       double spacing);

/// Closed-surface obstruction: positive flux integral of the odd part
/// certifies that no closed mesh can satisfy H = h0(N) + lambda.
CheckReport check_closed_obstruction(const TriMesh& mesh, const PrescribedFunction& h0,
                                     double lambda, const Eigen::Vector3d& v,
                                     double residual_tolerance = 0.02);

/// Polar ring resampling of a graph solution (bilinear), used by the
/// rotational checks and the profile cross-oracle.
struct RingProfile {
  std::vector<double> radius;
  std::vector<double> mean;
  std::vector<double> spread;  // max - min over angles
};
RingProfile ring_profile(const GraphSolution& sol, int angular_samples = 256);

}  // namespace hsurf
