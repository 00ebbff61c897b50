#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "hsurf/errors.hpp"
#include "hsurf/graph_solver.hpp"
#include "hsurf/meshgeom.hpp"
#include "oracles.hpp"

using namespace hsurf;
using Eigen::Vector3d;

TEST_CASE("closed meshes have vanishing vector area") {
  for (const auto& mesh : {make_icosphere(1.0, 4, Orientation::Outward),
                           make_torus(2.0, 0.5, 96, 32)}) {
    CHECK(mesh.closed());
    CHECK(mesh.boundary_loop_count() == 0);
    CHECK(vector_area(mesh).norm() <= 1e-10 * mesh.total_area());
  }
}

TEST_CASE("flat disc vector area is area times normal") {
  const TriMesh disc = make_disc_mesh(1.0, 24, 96);
  const Vector3d va = vector_area(disc);
  CHECK(va.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(va.y() == doctest::Approx(0.0).epsilon(1e-12));
  // inscribed polygon area converges to pi from below
  CHECK(va.z() == doctest::Approx(M_PI).epsilon(1e-3));
  CHECK(va.z() == doctest::Approx(disc.total_area()).epsilon(1e-12));
}

TEST_CASE("flux integral of z over the sphere") {
  const TriMesh sphere = make_icosphere(1.0, 5, Orientation::Outward);
  const auto fz = [](const Vector3d& n) { return n.z(); };
  const double flux = flux_integral(sphere, fz, Vector3d::UnitZ());
  CHECK(flux == doctest::Approx(oracle::sphere_z2_integral()).epsilon(1e-3));
  CHECK(oracle::sphere_z2_integral() == doctest::Approx(4.18879).epsilon(1e-4));
  // constant integrand reduces to the vector-area identity
  const double c = flux_integral(sphere, [](const Vector3d&) { return 1.0; }, Vector3d::UnitZ());
  CHECK(std::abs(c) < 1e-10);
  // flat disc: f(N) = 1, <N,v> = 1, area pi (polygon value)
  const TriMesh disc = make_disc_mesh(1.0, 24, 96);
  const double fd = flux_integral(disc, fz, Vector3d::UnitZ());
  CHECK(fd == doctest::Approx(disc.total_area()).epsilon(1e-12));
}

TEST_CASE("flux integral is affine in the integrand") {
  const TriMesh torus = make_torus(2.0, 0.5, 64, 24);
  const Vector3d v = Vector3d(1, 2, 2).normalized();
  const auto h0 = [](const Vector3d& n) { return n.z() * n.z() - 0.3 * n.x(); };
  const double lambda = 0.7;
  const double lhs = flux_integral(
      torus, [&](const Vector3d& n) { return h0(n) + lambda; }, v);
  const double rhs = flux_integral(torus, h0, v) + lambda * vector_area(torus).dot(v);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("discrete mean curvature calibration on spheres") {
  // inward-oriented unit sphere has H = +1; radius 2 gives H = 1/2
  for (const double radius : {1.0, 2.0}) {
    const TriMesh sphere = make_icosphere(radius, 5, Orientation::Inward);
    const auto H = discrete_mean_curvature(sphere);
    for (const double h : H) {
      REQUIRE(std::isfinite(h));
      CHECK(h == doctest::Approx(1.0 / radius).epsilon(0.01));
    }
  }
  // outward orientation flips the sign
  const auto Hout = discrete_mean_curvature(make_icosphere(1.0, 3, Orientation::Outward));
  CHECK(Hout[0] == doctest::Approx(-1.0).epsilon(0.02));
}

TEST_CASE("discrete mean curvature converges on sphere refinements") {
  double err[3];
  int idx = 0;
  for (const int sub : {3, 4, 5}) {
    const TriMesh sphere = make_icosphere(1.0, sub, Orientation::Inward);
    const auto H = discrete_mean_curvature(sphere);
    double worst = 0;
    for (const double h : H) worst = std::max(worst, std::abs(h - 1.0));
    err[idx++] = worst;
  }
  CHECK(err[1] / err[0] < 0.55);  // at least first order per refinement
  CHECK(err[2] / err[1] < 0.55);
}

TEST_CASE("flat disc interior curvature vanishes") {
  const auto H = discrete_mean_curvature(make_disc_mesh(1.0, 12, 48));
  bool any = false;
  for (const double h : H)
    if (std::isfinite(h)) {
      any = true;
      CHECK(std::abs(h) < 1e-8);
    }
  CHECK(any);
}

TEST_CASE("curvature residual identifies true and false prescribed functions") {
  const TriMesh sphere = make_icosphere(1.0, 5, Orientation::Inward);
  // the unit sphere is a surface for the constant function 1
  const auto ok = hsurface_residual(sphere, PrescribedFunction::constant(1.0));
  CHECK(ok.sup_norm <= 0.02);
  // but not for H(x) = <x, e3>: residual 1 - <N,e3> reaches near 2
  const auto bad = hsurface_residual(sphere, PrescribedFunction::translator(Vector3d::UnitZ(), 0.0));
  CHECK(bad.sup_norm >= 0.9);
}

TEST_CASE("graph_to_mesh matches the quadrature area and disc topology") {
  const PlanarDomain dom{Disc{Eigen::Vector2d::Zero(), 0.5}, 1.0 / 64};
  const auto sol = solve_dirichlet(dom, DirichletData::constant(0.0),
                                   PrescribedFunction::constant(1.0));
  const TriMesh mesh = graph_to_mesh(sol);
  CHECK_FALSE(mesh.closed());
  CHECK(mesh.boundary_loop_count() == 1);
  CHECK(mesh.total_area() == doctest::Approx(surface_area(sol)).epsilon(1e-3));
  // upward orientation
  const Vector3d va = vector_area(mesh);
  CHECK(va.z() > 0);
  CHECK(va.z() == doctest::Approx(M_PI * 0.25).epsilon(2e-3));

  // flat graph reproduces the disc area
  GraphSolution flat;
  flat.grid = GridMask::build(dom);
  flat.g = DirichletData::constant(0.0);
  flat.u.assign(static_cast<std::size_t>(flat.grid->num_unknowns()), 0.0);
  flat.ghost_g.assign(static_cast<std::size_t>(flat.grid->nx()) * flat.grid->ny(), 0.0);
  const TriMesh fm = graph_to_mesh(flat);
  CHECK(fm.total_area() == doctest::Approx(M_PI * 0.25).epsilon(2e-3));
}

TEST_CASE("mesh validation rejects broken topology") {
  std::vector<Vector3d> v = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  CHECK_THROWS_AS(TriMesh::create(v, {{0, 1, 5}}), MeshTopologyError);
  CHECK_THROWS_AS(TriMesh::create(v, {{0, 1, 1}}), MeshTopologyError);
  // two faces traversing a shared edge in the same direction: inconsistent
  std::vector<Vector3d> v4 = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK_THROWS_AS(TriMesh::create(v4, {{0, 1, 2}, {0, 1, 3}}), MeshTopologyError);
  // degenerate geometry
  std::vector<Vector3d> flat3 = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  CHECK_THROWS_AS(TriMesh::create(flat3, {{0, 1, 2}}), Error);
}

TEST_CASE("obj round trip preserves geometry and topology exactly") {
  const TriMesh mesh = make_icosphere(1.0, 2, Orientation::Outward);
  const std::string path =
      (std::filesystem::temp_directory_path() / "hsurf_roundtrip.obj").string();
  save_obj(mesh, path);
  const TriMesh back = load_obj(path);
  REQUIRE(back.vertices().size() == mesh.vertices().size());
  REQUIRE(back.faces().size() == mesh.faces().size());
  for (std::size_t i = 0; i < mesh.vertices().size(); ++i)
    CHECK((back.vertices()[i] - mesh.vertices()[i]).norm() == 0.0);  // %.17g round-trips
  for (std::size_t i = 0; i < mesh.faces().size(); ++i) CHECK(back.faces()[i] == mesh.faces()[i]);
  std::filesystem::remove(path);
}
