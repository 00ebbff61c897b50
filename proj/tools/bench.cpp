// Benchmarks the OpenMP kernels against their serial reference
// implementations: grid residual and Jacobian assembly, mesh reductions, and
// discrete curvature.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "hsurf/graph_solver.hpp"
#include "hsurf/meshgeom.hpp"
#include "hsurf/parallel.hpp"

using namespace hsurf;
using clock_type = std::chrono::high_resolution_clock;

namespace {

double time_ms(int reps, const std::function<void()>& body) {
  body();  // warm up
  const auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) body();
  const auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s serial %9.3f ms   openmp %9.3f ms   speedup %5.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 5;
  double spacing = 1.0 / 256;
  int subdiv = 6;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--reps" && i + 1 < argc) reps = std::atoi(argv[++i]);
    if (a == "--spacing" && i + 1 < argc) spacing = std::atof(argv[++i]);
    if (a == "--subdiv" && i + 1 < argc) subdiv = std::atoi(argv[++i]);
  }
  std::printf("threads available: %d\n", max_threads());

  const PlanarDomain dom{Disc{Eigen::Vector2d::Zero(), 0.9}, spacing};
  const auto grid = GridMask::build(dom);
  const auto f = PrescribedFunction::translator(Eigen::Vector3d::UnitZ(), 0.4);
  const DirichletData g = DirichletData::constant(0.0);
  std::vector<double> u(static_cast<std::size_t>(grid->num_unknowns()));
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = 0.02 * std::sin(0.013 * static_cast<double>(k));
  std::printf("grid unknowns: %d\n", grid->num_unknowns());

  report("residual",
         time_ms(reps, [&] { residual(*grid, g, f, u, 1.0, Exec::Serial); }),
         time_ms(reps, [&] { residual(*grid, g, f, u, 1.0, Exec::Parallel); }));
  report("jacobian assembly",
         time_ms(reps, [&] { assemble_jacobian(*grid, g, f, u, 1.0, Exec::Serial); }),
         time_ms(reps, [&] { assemble_jacobian(*grid, g, f, u, 1.0, Exec::Parallel); }));

  const TriMesh sphere = make_icosphere(1.0, subdiv, Orientation::Inward);
  std::printf("mesh faces: %zu\n", sphere.faces().size());
  report("vector area",
         time_ms(reps, [&] { vector_area(sphere, Exec::Serial); }),
         time_ms(reps, [&] { vector_area(sphere, Exec::Parallel); }));
  const auto fz = [](const Eigen::Vector3d& n) { return n.z() * n.z(); };
  report("flux integral",
         time_ms(reps, [&] { flux_integral(sphere, fz, Eigen::Vector3d::UnitZ(), Exec::Serial); }),
         time_ms(reps,
                 [&] { flux_integral(sphere, fz, Eigen::Vector3d::UnitZ(), Exec::Parallel); }));
  report("discrete mean curvature",
         time_ms(reps, [&] { discrete_mean_curvature(sphere, Exec::Serial); }),
         time_ms(reps, [&] { discrete_mean_curvature(sphere, Exec::Parallel); }));
  return 0;
}
