#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "hsurf/expr.hpp"

namespace hsurf {

/// Symmetries the caller asserts about a prescribed function. Declared
/// symmetries short-circuit the sampled tests.
struct DeclaredSymmetries {
  std::vector<Eigen::Vector3d> reflection_normals;  // planes through the origin
  std::optional<Eigen::Vector3d> rotation_axis;
  bool odd = false;
};

/// Scalar profile on [-1,1] with a derivative; used by the rotational kind
/// and by the profile ODE.
struct ProfileFunction {
  std::function<double(double)> f;
  std::function<double(double)> df;  // optional; central differences if empty

  double operator()(double t) const { return f(t); }
  double derivative(double t) const;
};

/// A C^1 function on the unit sphere prescribing the mean curvature through
/// the Gauss map. Immutable after construction and safe to share across
/// concurrent evaluations.
class PrescribedFunction {
 public:
  enum class Kind { Constant, Translator, Rotational, Expr };

  static PrescribedFunction constant(double h0);
  static PrescribedFunction translator(const Eigen::Vector3d& w, double lambda);
  static PrescribedFunction rotational(const Eigen::Vector3d& v, ProfileFunction profile);
  /// Rotational kind with the profile given as an expression in t.
  static PrescribedFunction rotational(const Eigen::Vector3d& v, const std::string& profile_expr);
  /// Free-form expression in the coordinates x, y, z of a unit vector.
  static PrescribedFunction expression(const std::string& expr);

  Kind kind() const { return kind_; }

  /// Value at a unit vector. Inputs with | |x|-1 | <= 1e-12 are normalized;
  /// anything farther off the sphere throws NonUnitInput.
  double eval(const Eigen::Vector3d& x) const;

  /// Value at the upward graph normal (-p, 1)/sqrt(1+|p|^2). Overflow-safe
  /// for huge |p| (the normal saturates toward the equator).
  double eval_from_gradient(const Eigen::Vector2d& p) const;

  /// Tangential gradient on the sphere. Closed-form for the structured kinds,
  /// central differences (step 1e-6 along two tangent directions) for Expr.
  Eigen::Vector3d differential(const Eigen::Vector3d& x) const;

  /// (min, max) over the sphere. Structured kinds reduce to 1-D on [-1,1];
  /// Expr samples an icosphere at subdivision 6 and refines locally.
  std::pair<double, double> extrema() const;

  /// Invariance under the reflection about the plane through the origin with
  /// the given normal. Sampled on a 2000-point spherical Fibonacci lattice
  /// (tolerance 1e-9) unless a closed form or declaration decides it.
  bool respects_reflection(const Eigen::Vector3d& plane_normal) const;

  /// Whether eval(-x) = -eval(x).
  bool is_odd() const;

  /// Intrinsic rotation axis for the structured kinds; declared axis for Expr.
  std::optional<Eigen::Vector3d> rotational_axis() const;

  /// Invariance under all rotations fixing the given axis.
  bool is_rotational_about(const Eigen::Vector3d& axis) const;

  /// Profile h with eval(x) = h(<x, axis>); requires is_rotational_about(axis).
  ProfileFunction profile_about(const Eigen::Vector3d& axis) const;

  void declare(DeclaredSymmetries s) { declared_ = std::move(s); }
  const DeclaredSymmetries& declared() const { return declared_; }

  // kind accessors
  double constant_value() const { return h0_; }
  const Eigen::Vector3d& direction() const { return w_; }  // Translator w / Rotational v
  double lambda() const { return lambda_; }
  const ProfileFunction& profile() const { return profile_; }

 private:
  PrescribedFunction() = default;
  double eval_unit(const Eigen::Vector3d& x) const;  // assumes |x| = 1

  Kind kind_ = Kind::Constant;
  double h0_ = 0;
  Eigen::Vector3d w_ = Eigen::Vector3d::UnitZ();
  double lambda_ = 0;
  ProfileFunction profile_;
  Expression expr_;
  DeclaredSymmetries declared_;
};

/// Deterministic spherical Fibonacci lattice used by the sampled symmetry
/// tests and property tests.
std::vector<Eigen::Vector3d> fibonacci_sphere(int n);

}  // namespace hsurf
