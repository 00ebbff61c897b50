#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hsurf {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// curvature
struct NonUnitInput : Error {
  explicit NonUnitInput(const std::string& msg) : Error(msg) {}
};

// grid / domain
struct InvalidDomain : Error {
  explicit InvalidDomain(const std::string& msg) : Error(msg) {}
};
struct MaskTooThin : Error {
  explicit MaskTooThin(const std::string& msg) : Error(msg) {}
};

// graph solver
struct SolveFailure : Error {
  explicit SolveFailure(const std::string& msg) : Error(msg) {}
};
struct NonConvergence : SolveFailure {
  NonConvergence(const std::string& msg, double t, std::vector<double> history)
      : SolveFailure(msg), last_t(t), residual_history(std::move(history)) {}
  double last_t;                         // last continuation parameter reached
  std::vector<double> residual_history;  // residual norms of the failed step
};
struct GradientBlowup : SolveFailure {
  GradientBlowup(const std::string& msg, double t) : SolveFailure(msg), last_t(t) {}
  double last_t;
};
struct BoundaryNotPlanar : Error {
  explicit BoundaryNotPlanar(const std::string& msg) : Error(msg) {}
};

// rotational
struct AxisSingularity : Error {
  explicit AxisSingularity(const std::string& msg) : Error(msg) {}
};
struct StiffnessFailure : Error {
  explicit StiffnessFailure(const std::string& msg) : Error(msg) {}
};
struct DegenerateCurve : Error {
  explicit DegenerateCurve(const std::string& msg) : Error(msg) {}
};

// meshgeom
struct MeshTopologyError : Error {
  explicit MeshTopologyError(const std::string& msg) : Error(msg) {}
};
struct DegenerateTriangle : Error {
  explicit DegenerateTriangle(const std::string& msg) : Error(msg) {}
};
struct OpenMesh : Error {
  explicit OpenMesh(const std::string& msg) : Error(msg) {}
};

// checks
struct NonSimpleBoundary : Error {
  explicit NonSimpleBoundary(const std::string& msg) : Error(msg) {}
};
struct AsymmetricDomain : Error {
  explicit AsymmetricDomain(const std::string& msg) : Error(msg) {}
};
struct NotCircularBoundary : Error {
  explicit NotCircularBoundary(const std::string& msg) : Error(msg) {}
};

// config / CLI
struct ConfigError : Error {
  ConfigError(const std::string& msg, int line_, int column_)
      : Error(msg), line(line_), column(column_) {}
  int line;
  int column;
};

}  // namespace hsurf
