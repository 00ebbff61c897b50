#include "hsurf/curvature.hpp"

#include <array>
#include <cmath>
#include <string>

#include "hsurf/errors.hpp"

namespace hsurf {

namespace {

constexpr double kUnitTol = 1e-12;
constexpr double kSymmetryTol = 1e-9;
constexpr double kParallelTol = 1e-12;

const std::vector<std::string> kSphereVars = {"x", "y", "z"};
const std::vector<std::string> kProfileVars = {"t"};

Eigen::Vector3d reflect(const Eigen::Vector3d& x, const Eigen::Vector3d& unit_normal) {
  return x - 2.0 * unit_normal.dot(x) * unit_normal;
}

bool parallel(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double tol) {
  return a.cross(b).norm() <= tol;
}

// orthonormal tangent basis at a unit vector, deterministic choice
std::array<Eigen::Vector3d, 2> tangent_basis(const Eigen::Vector3d& x) {
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(x[i]) < std::abs(x[k])) k = i;
  Eigen::Vector3d e = Eigen::Vector3d::Unit(k);
  Eigen::Vector3d t1 = (e - e.dot(x) * x).normalized();
  Eigen::Vector3d t2 = x.cross(t1);
  return {t1, t2};
}

}  // namespace

double ProfileFunction::derivative(double t) const {
  if (df) return df(t);
  const double h = 1e-6;
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

std::vector<Eigen::Vector3d> fibonacci_sphere(int n) {
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(static_cast<std::size_t>(n));
  const double ga = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = ga * i;
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

PrescribedFunction PrescribedFunction::constant(double h0) {
  PrescribedFunction f;
  f.kind_ = Kind::Constant;
  f.h0_ = h0;
  return f;
}

PrescribedFunction PrescribedFunction::translator(const Eigen::Vector3d& w, double lambda) {
  if (std::abs(w.norm() - 1.0) > 1e-9)
    throw NonUnitInput("translator density vector must be a unit vector");
  PrescribedFunction f;
  f.kind_ = Kind::Translator;
  f.w_ = w.normalized();
  f.lambda_ = lambda;
  return f;
}

PrescribedFunction PrescribedFunction::rotational(const Eigen::Vector3d& v,
                                                  ProfileFunction profile) {
  if (std::abs(v.norm() - 1.0) > 1e-9)
    throw NonUnitInput("rotation axis must be a unit vector");
  PrescribedFunction f;
  f.kind_ = Kind::Rotational;
  f.w_ = v.normalized();
  f.profile_ = std::move(profile);
  return f;
}

PrescribedFunction PrescribedFunction::rotational(const Eigen::Vector3d& v,
                                                  const std::string& profile_expr) {
  Expression e = Expression::parse(profile_expr, kProfileVars);
  ProfileFunction p;
  p.f = [e](double t) {
    const double vars[1] = {t};
    return e.eval(vars);
  };
  PrescribedFunction f = rotational(v, std::move(p));
  return f;
}

PrescribedFunction PrescribedFunction::expression(const std::string& expr) {
  PrescribedFunction f;
  f.kind_ = Kind::Expr;
  f.expr_ = Expression::parse(expr, kSphereVars);
  return f;
}

double PrescribedFunction::eval_unit(const Eigen::Vector3d& x) const {
  switch (kind_) {
    case Kind::Constant:
      return h0_;
    case Kind::Translator:
      return w_.dot(x) + lambda_;
    case Kind::Rotational:
      return profile_.f(std::clamp(w_.dot(x), -1.0, 1.0));
    case Kind::Expr: {
      const double vars[3] = {x.x(), x.y(), x.z()};
      return expr_.eval(vars);
    }
  }
  return 0;
}

double PrescribedFunction::eval(const Eigen::Vector3d& x) const {
  const double n = x.norm();
  if (std::abs(n - 1.0) > kUnitTol)
    throw NonUnitInput("eval requires a unit vector, got |x| = " + std::to_string(n));
  return eval_unit(x / n);
}

double PrescribedFunction::eval_from_gradient(const Eigen::Vector2d& p) const {
  // W = sqrt(1+|p|^2) without overflow; N -> equator as |p| -> inf
  const double w = std::hypot(1.0, p.x(), p.y());
  return eval_unit(Eigen::Vector3d(-p.x() / w, -p.y() / w, 1.0 / w));
}

Eigen::Vector3d PrescribedFunction::differential(const Eigen::Vector3d& x) const {
  const double n = x.norm();
  if (std::abs(n - 1.0) > kUnitTol) throw NonUnitInput("differential requires a unit vector");
  const Eigen::Vector3d xu = x / n;
  switch (kind_) {
    case Kind::Constant:
      return Eigen::Vector3d::Zero();
    case Kind::Translator:
      return w_ - w_.dot(xu) * xu;
    case Kind::Rotational: {
      const double t = std::clamp(w_.dot(xu), -1.0, 1.0);
      return profile_.derivative(t) * (w_ - t * xu);
    }
    case Kind::Expr: {
      const auto [t1, t2] = tangent_basis(xu);
      const double eps = 1e-6;
      auto geodesic = [&](const Eigen::Vector3d& t, double s) {
        return Eigen::Vector3d(xu * std::cos(s) + t * std::sin(s));
      };
      const double d1 = (eval_unit(geodesic(t1, eps)) - eval_unit(geodesic(t1, -eps))) / (2 * eps);
      const double d2 = (eval_unit(geodesic(t2, eps)) - eval_unit(geodesic(t2, -eps))) / (2 * eps);
      return d1 * t1 + d2 * t2;
    }
  }
  return Eigen::Vector3d::Zero();
}

namespace {

// 1-D min/max on [-1,1]: dense scan plus golden-section refinement of each
// bracketed local extremum
std::pair<double, double> extrema_1d(const std::function<double(double)>& f) {
  const int n = 8192;
  std::vector<double> vals(n + 1);
  for (int i = 0; i <= n; ++i) vals[static_cast<std::size_t>(i)] = f(-1.0 + 2.0 * i / n);
  auto refine = [&](int i, int sign) {
    double a = -1.0 + 2.0 * std::max(0, i - 1) / n;
    double b = -1.0 + 2.0 * std::min(n, i + 1) / n;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    while (b - a > 1e-10) {
      if (sign * f(c) < sign * f(d))
        b = d;
      else
        a = c;
      c = b - gr * (b - a);
      d = a + gr * (b - a);
    }
    return f(0.5 * (a + b));
  };
  int imin = 0, imax = 0;
  for (int i = 1; i <= n; ++i) {
    if (vals[static_cast<std::size_t>(i)] < vals[static_cast<std::size_t>(imin)]) imin = i;
    if (vals[static_cast<std::size_t>(i)] > vals[static_cast<std::size_t>(imax)]) imax = i;
  }
  double lo = std::min(vals[static_cast<std::size_t>(imin)], refine(imin, +1));
  double hi = std::max(vals[static_cast<std::size_t>(imax)], refine(imax, -1));
  return {lo, hi};
}

}  // namespace

std::pair<double, double> PrescribedFunction::extrema() const {
  switch (kind_) {
    case Kind::Constant:
      return {h0_, h0_};
    case Kind::Translator:
      return {lambda_ - 1.0, lambda_ + 1.0};
    case Kind::Rotational:
      return extrema_1d(profile_.f);
    case Kind::Expr: {
      // icosphere-like dense sample: Fibonacci lattice of comparable size,
      // then local refinement by shrinking tangent-plane steps
      const auto pts = fibonacci_sphere(40962);
      auto refine = [&](Eigen::Vector3d x, int sign) {
        double best = eval_unit(x);
        double step = 0.02;
        while (step > 1e-9) {
          const auto [t1, t2] = tangent_basis(x);
          bool improved = false;
          for (const Eigen::Vector3d& d :
               {Eigen::Vector3d(t1), Eigen::Vector3d(-t1), Eigen::Vector3d(t2),
                Eigen::Vector3d(-t2)}) {
            Eigen::Vector3d y = (x + step * d).normalized();
            const double v = eval_unit(y);
            if (sign * v < sign * best) {
              best = v;
              x = y;
              improved = true;
            }
          }
          if (!improved) step *= 0.5;
        }
        return best;
      };
      std::size_t imin = 0, imax = 0;
      std::vector<double> vals(pts.size());
      for (std::size_t i = 0; i < pts.size(); ++i) {
        vals[i] = eval_unit(pts[i]);
        if (vals[i] < vals[imin]) imin = i;
        if (vals[i] > vals[imax]) imax = i;
      }
      return {refine(pts[imin], +1), refine(pts[imax], -1)};
    }
  }
  return {0, 0};
}

bool PrescribedFunction::respects_reflection(const Eigen::Vector3d& plane_normal) const {
  const Eigen::Vector3d n = plane_normal.normalized();
  for (const auto& dn : declared_.reflection_normals)
    if (parallel(dn.normalized(), n, kParallelTol)) return true;
  switch (kind_) {
    case Kind::Constant:
      return true;
    case Kind::Translator:
      return std::abs(w_.dot(n)) <= kParallelTol;
    case Kind::Rotational: {
      if (std::abs(w_.dot(n)) <= kParallelTol) return true;  // axis inside the plane
      if (parallel(w_, n, kParallelTol)) {
        // reflection flips <x,v>; invariance iff the profile is even
        for (int i = 0; i <= 2000; ++i) {
          const double t = -1.0 + 2.0 * i / 2000;
          if (std::abs(profile_.f(t) - profile_.f(-t)) > kSymmetryTol) return false;
        }
        return true;
      }
      break;  // fall through to sampling
    }
    case Kind::Expr:
      break;
  }
  for (const Eigen::Vector3d& x : fibonacci_sphere(2000))
    if (std::abs(eval_unit(x) - eval_unit(reflect(x, n))) > kSymmetryTol) return false;
  return true;
}

bool PrescribedFunction::is_odd() const {
  if (declared_.odd) return true;
  switch (kind_) {
    case Kind::Constant:
      return std::abs(h0_) <= kParallelTol;
    case Kind::Translator:
      return std::abs(lambda_) <= kParallelTol;
    case Kind::Rotational:
      for (int i = 0; i <= 2000; ++i) {
        const double t = -1.0 + 2.0 * i / 2000;
        if (std::abs(profile_.f(t) + profile_.f(-t)) > kSymmetryTol) return false;
      }
      return true;
    case Kind::Expr:
      for (const Eigen::Vector3d& x : fibonacci_sphere(2000))
        if (std::abs(eval_unit(x) + eval_unit(-x)) > kSymmetryTol) return false;
      return true;
  }
  return false;
}

std::optional<Eigen::Vector3d> PrescribedFunction::rotational_axis() const {
  switch (kind_) {
    case Kind::Constant:
      return std::nullopt;  // rotational about every axis
    case Kind::Translator:
    case Kind::Rotational:
      return w_;
    case Kind::Expr:
      return declared_.rotation_axis;
  }
  return std::nullopt;
}

bool PrescribedFunction::is_rotational_about(const Eigen::Vector3d& axis) const {
  const Eigen::Vector3d a = axis.normalized();
  if (declared_.rotation_axis && parallel(*declared_.rotation_axis, a, kParallelTol)) return true;
  switch (kind_) {
    case Kind::Constant:
      return true;
    case Kind::Translator:
    case Kind::Rotational:
      return parallel(w_, a, kParallelTol);
    case Kind::Expr: {
      for (const double ang : {1.0, 2.3, 4.1}) {
        const Eigen::AngleAxisd rot(ang, a);
        for (const Eigen::Vector3d& x : fibonacci_sphere(500))
          if (std::abs(eval_unit(x) - eval_unit((rot * x).normalized())) > kSymmetryTol)
            return false;
      }
      return true;
    }
  }
  return false;
}

ProfileFunction PrescribedFunction::profile_about(const Eigen::Vector3d& axis) const {
  if (!is_rotational_about(axis))
    throw Error("prescribed function is not rotational about the requested axis");
  const Eigen::Vector3d a = axis.normalized();
  switch (kind_) {
    case Kind::Constant: {
      ProfileFunction p;
      const double c = h0_;
      p.f = [c](double) { return c; };
      p.df = [](double) { return 0.0; };
      return p;
    }
    case Kind::Translator: {
      ProfileFunction p;
      const double sign = w_.dot(a) > 0 ? 1.0 : -1.0;
      const double lam = lambda_;
      p.f = [sign, lam](double t) { return sign * t + lam; };
      p.df = [sign](double) { return sign; };
      return p;
    }
    case Kind::Rotational: {
      if (w_.dot(a) > 0) return profile_;
      ProfileFunction p;
      ProfileFunction base = profile_;
      p.f = [base](double t) { return base.f(-t); };
      p.df = [base](double t) { return -base.derivative(-t); };
      return p;
    }
    case Kind::Expr: {
      // evaluate at a representative point of each latitude
      ProfileFunction p;
      const PrescribedFunction self = *this;
      const Eigen::Vector3d t1 = tangent_basis(a)[0];
      const Eigen::Vector3d au = a;
      p.f = [self, au, t1](double t) {
        t = std::clamp(t, -1.0, 1.0);
        const double r = std::sqrt(std::max(0.0, 1.0 - t * t));
        return self.eval_unit((t * au + r * t1).normalized());
      };
      return p;
    }
  }
  throw Error("unreachable");
}

}  // namespace hsurf
