#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hsurf/curvature.hpp"
#include "hsurf/graph_solver.hpp"
#include "hsurf/grid.hpp"

namespace hsurf {

/// Value of a config key: scalar, string, or homogeneous array.
using TomlValue = std::variant<double, bool, std::string, std::vector<double>,
                               std::vector<std::string>>;

struct TomlKey {
  TomlValue value;
  int line = 0;
};

/// Minimal TOML-style document: [section] headers over key = value lines,
/// values being numbers, booleans, quoted strings, or flat arrays.
class TomlDoc {
 public:
  static TomlDoc parse_file(const std::string& path);
  static TomlDoc parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  const std::map<std::string, TomlKey>* section(const std::string& name) const;

  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;
  std::string str(const std::string& section, const std::string& key) const;
  std::string str_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  std::vector<double> numbers(const std::string& section, const std::string& key) const;
  std::vector<std::string> strings(const std::string& section, const std::string& key) const;

 private:
  std::map<std::string, std::map<std::string, TomlKey>> sections_;
};

struct SweepSpec {
  std::string parameter;  // h0 | lambda | radius
  double lo = 0, hi = 0;
  int steps = 0;
};

struct RotationalSpec {
  int sigma = +1;
  std::optional<double> target_radius;
  std::optional<double> max_arc_length;
  int angular_resolution = 256;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
};

/// Parsed run configuration driving the CLI subcommands.
struct RunConfig {
  PrescribedFunction curvature = PrescribedFunction::constant(0);
  PlanarDomain domain;
  DirichletData boundary;
  SolverConfig solver;
  std::vector<std::string> requested_checks;
  std::string output_dir = "out";
  std::optional<SweepSpec> sweep;
  RotationalSpec rotational;
  Eigen::Vector3d slab_v = Eigen::Vector3d::UnitZ();
  Eigen::Vector2d reflection_normal = Eigen::Vector2d::UnitX();
  // mesh-analyze inputs
  std::string mesh_path;
  Eigen::Vector3d analyze_v = Eigen::Vector3d::UnitZ();
  std::optional<PrescribedFunction> analyze_h0;
  double analyze_lambda = 0;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_toml(const TomlDoc& doc);
};

}  // namespace hsurf
