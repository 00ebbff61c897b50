#pragma once

#include <array>
#include <optional>
#include <vector>

#include "hsurf/curvature.hpp"

namespace hsurf {

class TriMesh;

/// Arc-length state of a profile curve of a rotational surface about the
/// z-axis: r distance to the axis, z height, theta tangent angle, so that
/// (r', z') = (cos theta, sin theta).
struct ProfileState {
  double s = 0;
  double r = 0;
  double z = 0;
  double theta = 0;
};

enum class ProfileTermination { TargetRadius, VerticalPoint, MaxArcLength };

/// Sampled profile of a rotational cap meeting the axis orthogonally.
/// sigma = +1: unit normal +e3 at the axis (the M+ cap); sigma = -1: normal
/// -e3 (the M- cap).
struct ProfileCurve {
  std::vector<ProfileState> samples;
  int sigma = +1;
  ProfileTermination termination = ProfileTermination::MaxArcLength;

  double total_arc_length() const { return samples.empty() ? 0.0 : samples.back().s; }
  /// Height at a given radius by monotone cubic Hermite interpolation;
  /// requires the profile to be radius-monotone (true up to a vertical point).
  double z_at_radius(double r) const;
};

struct StopCondition {
  std::optional<double> target_radius;
  std::optional<double> max_arc_length;
};

struct StepControl {
  double local_tolerance = 1e-10;  // RK4 step-doubling error estimate
  double max_step = 0.01;
  double min_step = 1e-14;
  double series_start = 1e-4;  // switch from the axis series to the ODE
  double event_tolerance = 1e-12;
};

/// (r', z', theta') of the profile ODE: theta' = 2 h_sigma(cos theta) -
/// sin(theta)/r, where h_{+1} = h and h_{-1}(t) = -h(-t). Throws
/// AxisSingularity at r <= 0 (the series start covers the axis).
std::array<double, 3> profile_rhs(const ProfileState& state, const ProfileFunction& h, int sigma);

/// Integrates from the axis with a second-order series start followed by
/// adaptive classical RK4 with step doubling; stops at the target radius, a
/// vertical point |theta| = pi/2, or the arc-length cap, with the stopping
/// point localized by bisection.
ProfileCurve integrate_from_axis(const ProfileFunction& h, int sigma, const StopCondition& stop,
                                 const StepControl& ctrl = {});

/// Surface of revolution about the z-axis. Ring radii carry the polygonal
/// area compensation r / sqrt(sinc(2 pi / n)) so flat profiles reproduce disc
/// areas exactly; caps at r = 0 get triangle fans. Orientation follows sigma.
TriMesh revolve(const ProfileCurve& curve, int angular_resolution);

}  // namespace hsurf
