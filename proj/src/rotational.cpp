#include "hsurf/rotational.hpp"

#include <algorithm>
#include <cmath>

#include "hsurf/errors.hpp"
#include "hsurf/meshgeom.hpp"

namespace hsurf {

namespace {

ProfileFunction effective_profile(const ProfileFunction& h, int sigma) {
  if (sigma >= 0) return h;
  ProfileFunction r;
  r.f = [h](double t) { return -h.f(-t); };
  r.df = [h](double t) { return h.derivative(-t); };
  return r;
}

using State3 = std::array<double, 3>;  // (r, z, theta)

State3 rhs(const State3& y, const ProfileFunction& h) {
  const double r = y[0], theta = y[2];
  if (r <= 0) throw AxisSingularity("profile ODE evaluated at r <= 0");
  const double c = std::cos(theta), s = std::sin(theta);
  return {c, s, 2.0 * h.f(std::clamp(c, -1.0, 1.0)) - s / r};
}

State3 rk4(const State3& y, double hstep, const ProfileFunction& h) {
  auto axpy = [](const State3& a, double c, const State3& b) {
    return State3{a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]};
  };
  const State3 k1 = rhs(y, h);
  const State3 k2 = rhs(axpy(y, 0.5 * hstep, k1), h);
  const State3 k3 = rhs(axpy(y, 0.5 * hstep, k2), h);
  const State3 k4 = rhs(axpy(y, hstep, k3), h);
  State3 out = y;
  for (int i = 0; i < 3; ++i)
    out[i] += hstep / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}

/// Axis series r = s - a^2 s^3/6, z = (a/2) s^2 + ..., theta = a s + b s^3
/// with a = h(1), b = -h'(1) a^2 / 4.
State3 series_state(double s, const ProfileFunction& h) {
  const double a = h.f(1.0);
  const double b = -h.derivative(1.0) * a * a / 4.0;
  const double s2 = s * s, s3 = s2 * s;
  return {s - a * a * s3 / 6.0, 0.5 * a * s2 + 0.25 * (b - a * a * a / 6.0) * s2 * s2,
          a * s + b * s3};
}

}  // namespace

std::array<double, 3> profile_rhs(const ProfileState& state, const ProfileFunction& h,
                                  int sigma) {
  const ProfileFunction he = effective_profile(h, sigma);
  return rhs({state.r, state.z, state.theta}, he);
}

ProfileCurve integrate_from_axis(const ProfileFunction& h, int sigma, const StopCondition& stop,
                                 const StepControl& ctrl) {
  const ProfileFunction he = effective_profile(h, sigma);

  ProfileCurve curve;
  curve.sigma = sigma >= 0 ? +1 : -1;
  curve.samples.push_back({0.0, 0.0, 0.0, 0.0});

  double s = ctrl.series_start;
  State3 y = series_state(s, he);
  curve.samples.push_back({s, y[0], y[1], y[2]});

  const double s_max = stop.max_arc_length.value_or(1e6);
  const double r_target = stop.target_radius.value_or(-1.0);

  auto hit_radius = [&](const State3& st) { return r_target > 0 && st[0] >= r_target; };
  auto hit_vertical = [&](const State3& st) { return std::abs(st[2]) >= M_PI / 2; };

  // localize an event in (0, hstep] by bisection on re-integration from y
  auto localize = [&](const State3& from, double hstep, auto&& crossed) {
    double lo = 0, hi = hstep;
    State3 at_hi = rk4(from, hstep, he);
    while (hi - lo > ctrl.event_tolerance) {
      const double mid = 0.5 * (lo + hi);
      const State3 at_mid = rk4(from, mid, he);
      if (crossed(at_mid)) {
        hi = mid;
        at_hi = at_mid;
      } else {
        lo = mid;
      }
    }
    return std::pair<double, State3>(hi, at_hi);
  };

  double hstep = 1e-3;
  curve.termination = ProfileTermination::MaxArcLength;
  while (s < s_max - 1e-15) {
    const double lead = s_max - s;
    if (lead <= ctrl.min_step) break;  // landed on the arc-length cap
    hstep = std::min(hstep, std::min(ctrl.max_step, lead));
    if (hstep < ctrl.min_step)
      throw StiffnessFailure("profile integration step underflow");

    const State3 big = rk4(y, hstep, he);
    const State3 half = rk4(rk4(y, 0.5 * hstep, he), 0.5 * hstep, he);
    double err = 0;
    for (int i = 0; i < 3; ++i) err = std::max(err, std::abs(big[i] - half[i]));
    if (err > ctrl.local_tolerance) {
      hstep *= std::max(0.2, 0.9 * std::pow(ctrl.local_tolerance / err, 0.2));
      continue;
    }

    State3 next = half;
    for (int i = 0; i < 3; ++i) next[i] += (half[i] - big[i]) / 15.0;  // Richardson

    if (hit_vertical(next)) {
      const auto [ds, at] = localize(y, hstep, hit_vertical);
      s += ds;
      curve.samples.push_back({s, at[0], at[1], at[2]});
      curve.termination = ProfileTermination::VerticalPoint;
      return curve;
    }
    if (hit_radius(next)) {
      const auto [ds, at] = localize(y, hstep, hit_radius);
      s += ds;
      curve.samples.push_back({s, at[0], at[1], at[2]});
      curve.termination = ProfileTermination::TargetRadius;
      return curve;
    }

    y = next;
    s += hstep;
    curve.samples.push_back({s, y[0], y[1], y[2]});
    if (err > 0) hstep *= std::min(5.0, 0.9 * std::pow(ctrl.local_tolerance / err, 0.2));
  }
  curve.samples.back().s = s_max;
  return curve;
}

double ProfileCurve::z_at_radius(double r) const {
  if (samples.size() < 2) throw DegenerateCurve("profile too short for interpolation");
  if (r <= samples.front().r) return samples.front().z;
  if (r >= samples.back().r) return samples.back().z;
  // radius-monotone bracket
  std::size_t lo = 0, hi = samples.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (samples[mid].r <= r)
      lo = mid;
    else
      hi = mid;
  }
  const ProfileState& a = samples[lo];
  const ProfileState& b = samples[hi];
  const double ds = b.s - a.s;
  if (ds <= 0) return a.z;
  // cubic Hermite in s using r' = cos theta, z' = sin theta; solve r(s) = r
  auto hermite = [&](double ya, double da, double yb, double db, double t) {
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * ya + (t3 - 2 * t2 + t) * ds * da +
           (-2 * t3 + 3 * t2) * yb + (t3 - t2) * ds * db;
  };
  double t = (r - a.r) / (b.r - a.r);
  for (int iter = 0; iter < 8; ++iter) {
    const double rr = hermite(a.r, std::cos(a.theta), b.r, std::cos(b.theta), t);
    const double eps = 1e-9;
    const double drdt = (hermite(a.r, std::cos(a.theta), b.r, std::cos(b.theta),
                                 std::min(1.0, t + eps)) -
                         hermite(a.r, std::cos(a.theta), b.r, std::cos(b.theta),
                                 std::max(0.0, t - eps))) /
                        (std::min(1.0, t + eps) - std::max(0.0, t - eps));
    if (std::abs(drdt) < 1e-300) break;
    t = std::clamp(t - (rr - r) / drdt, 0.0, 1.0);
  }
  return hermite(a.z, std::sin(a.theta), b.z, std::sin(b.theta), t);
}

TriMesh revolve(const ProfileCurve& curve, int n) {
  if (curve.samples.empty()) throw DegenerateCurve("empty profile");
  if (n < 8) throw Error("angular resolution must be at least 8");
  if (curve.total_arc_length() < 10 * 1e-14)
    throw DegenerateCurve("profile arc length below the step floor");

  // resample stations roughly matching the azimuthal spacing at the rim
  double r_max = 0;
  for (const auto& st : curve.samples) r_max = std::max(r_max, st.r);
  const double total = curve.total_arc_length();
  const double target = std::max(2.0 * M_PI * r_max / n, total / 4000.0);
  const int m = std::max(2, static_cast<int>(std::ceil(total / target)));

  std::vector<ProfileState> stations;
  stations.reserve(static_cast<std::size_t>(m) + 1);
  std::size_t cursor = 0;
  for (int k = 0; k <= m; ++k) {
    const double s = total * k / m;
    while (cursor + 1 < curve.samples.size() && curve.samples[cursor + 1].s < s) ++cursor;
    const ProfileState& a = curve.samples[cursor];
    const ProfileState& b = curve.samples[std::min(cursor + 1, curve.samples.size() - 1)];
    const double ds = b.s - a.s;
    double t = ds > 0 ? std::clamp((s - a.s) / ds, 0.0, 1.0) : 0.0;
    ProfileState st;
    st.s = s;
    st.r = a.r + t * (b.r - a.r);
    st.z = a.z + t * (b.z - a.z);
    st.theta = a.theta + t * (b.theta - a.theta);
    stations.push_back(st);
  }

  // polygonal area compensation: a regular n-gon at radius rho has area
  // pi rho^2 sinc(2 pi/n); dividing by sqrt(sinc) makes ring areas exact
  const double sinc = std::sin(2.0 * M_PI / n) / (2.0 * M_PI / n);
  const double rho_scale = 1.0 / std::sqrt(sinc);

  const double axis_eps = 1e-9;
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<int> ring_start(stations.size(), -1);  // -1: axis point

  for (std::size_t k = 0; k < stations.size(); ++k) {
    if (stations[k].r <= axis_eps) {
      if (k == 0 || k + 1 == stations.size()) continue;  // true cap point
      ring_start[k] = -2;                                // degenerate interior station
      continue;
    }
    ring_start[k] = static_cast<int>(vertices.size());
    const double rho = stations[k].r * rho_scale;
    for (int a = 0; a < n; ++a) {
      const double phi = 2.0 * M_PI * a / n;
      vertices.emplace_back(rho * std::cos(phi), rho * std::sin(phi), stations[k].z);
    }
  }

  // desired normal along the revolved surface, sigma-consistent
  auto desired_normal = [&](const ProfileState& st, double phi) {
    const double sgn = curve.sigma >= 0 ? 1.0 : -1.0;
    return Eigen::Vector3d(-sgn * std::sin(st.theta) * std::cos(phi),
                           -sgn * std::sin(st.theta) * std::sin(phi),
                           sgn * std::cos(st.theta));
  };
  auto push_face = [&](int a, int b, int c, const Eigen::Vector3d& want) {
    const Eigen::Vector3d nrm =
        (vertices[static_cast<std::size_t>(b)] - vertices[static_cast<std::size_t>(a)])
            .cross(vertices[static_cast<std::size_t>(c)] - vertices[static_cast<std::size_t>(a)]);
    if (nrm.dot(want) >= 0)
      faces.push_back({a, b, c});
    else
      faces.push_back({a, c, b});
  };

  // axis caps
  auto add_cap = [&](std::size_t cap_idx, std::size_t ring_idx) {
    const int apex = static_cast<int>(vertices.size());
    vertices.emplace_back(0.0, 0.0, stations[cap_idx].z);
    const int base = ring_start[ring_idx];
    for (int a = 0; a < n; ++a) {
      const int b = base + a, c = base + (a + 1) % n;
      push_face(apex, b, c, desired_normal(stations[cap_idx], 0.0));
    }
  };

  // locate first and last real rings
  std::size_t first_ring = 0;
  while (first_ring < stations.size() && ring_start[first_ring] < 0) ++first_ring;
  std::size_t last_ring = stations.size();
  while (last_ring > 0 && ring_start[last_ring - 1] < 0) --last_ring;
  if (first_ring >= last_ring) throw DegenerateCurve("profile never leaves the axis");
  --last_ring;

  if (stations.front().r <= axis_eps) add_cap(0, first_ring);
  // bands between consecutive rings
  for (std::size_t k = first_ring; k < last_ring; ++k) {
    if (ring_start[k] < 0 || ring_start[k + 1] < 0) continue;
    const int lo = ring_start[k], hi = ring_start[k + 1];
    for (int a = 0; a < n; ++a) {
      const int a1 = (a + 1) % n;
      const double phi = 2.0 * M_PI * (a + 0.5) / n;
      ProfileState mid;
      mid.theta = 0.5 * (stations[k].theta + stations[k + 1].theta);
      const Eigen::Vector3d want = desired_normal(mid, phi);
      push_face(lo + a, hi + a, hi + a1, want);
      push_face(lo + a, hi + a1, lo + a1, want);
    }
  }
  if (stations.back().r <= axis_eps) add_cap(stations.size() - 1, last_ring);

  return TriMesh::create(std::move(vertices), std::move(faces));
}

}  // namespace hsurf
