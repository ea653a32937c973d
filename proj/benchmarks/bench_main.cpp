#include <benchmark/benchmark.h>

#include "crslip/analysis.hpp"

using namespace crslip;

namespace {

SimplexMesh level_mesh(const SmoothDomain& d, int refinements) {
  SimplexMesh m = coarse_mesh(d);
  for (int r = 0; r < refinements; ++r) m = refine(m, d);
  return m;
}

void BM_Refine(benchmark::State& state) {
  const BallDomain disk(DomainKind::disk2d);
  const SimplexMesh m = level_mesh(disk, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(refine(m, disk));
  state.counters["cells"] = static_cast<double>(4 * m.num_cells());
}
BENCHMARK(BM_Refine)->DenseRange(3, 6)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
  const ManufacturedCase c = make_case(state.range(0) == 2 ? DomainKind::disk2d : DomainKind::ball3d);
  const SimplexMesh m = level_mesh(*c.domain, static_cast<int>(state.range(1)));
  const FacetComplex f = build_facets(m);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_system(f, c.data.load(), {0.01, 2.0, 1.0, 4}));
  state.counters["cells"] = static_cast<double>(m.num_cells());
}
BENCHMARK(BM_Assemble)->Args({2, 4})->Args({2, 6})->Args({3, 2})->Args({3, 3})->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state) {
  const ManufacturedCase c = make_case(state.range(0) == 2 ? DomainKind::disk2d : DomainKind::ball3d);
  const SimplexMesh m = level_mesh(*c.domain, static_cast<int>(state.range(1)));
  const FacetComplex f = build_facets(m);
  const SaddleSystem s = assemble_system(f, c.data.load(), {0.01, 2.0, 1.0, 4});
  SolverOptions o;
  o.kind = static_cast<SolverKind>(state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(solve(s, c.data.g, o));
  state.counters["unknowns"] = static_cast<double>(s.size());
}
BENCHMARK(BM_Solve)
    ->Args({2, 4, static_cast<int>(SolverKind::lu)})
    ->Args({2, 4, static_cast<int>(SolverKind::augmented_lagrangian)})
    ->Args({2, 5, static_cast<int>(SolverKind::lu)})
    ->Args({3, 2, static_cast<int>(SolverKind::augmented_lagrangian)})
    ->Args({3, 3, static_cast<int>(SolverKind::augmented_lagrangian)})
    ->Unit(benchmark::kMillisecond);

void BM_ErrorNorms(benchmark::State& state) {
  const ManufacturedCase c = case_disk2d();
  const SimplexMesh m = level_mesh(*c.domain, static_cast<int>(state.range(0)));
  const FacetComplex f = build_facets(m);
  const CRFunction u = cr_interpolate(c.solution.u, f);
  for (auto _ : state) {
    benchmark::DoNotOptimize(error_l2(c.solution.u, u));
    benchmark::DoNotOptimize(error_h1_seminorm(c.solution.grad_u, u));
  }
}
BENCHMARK(BM_ErrorNorms)->DenseRange(4, 6)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
