#include <benchmark/benchmark.h>

#include "scatopt/objective.hpp"
#include "scatopt/solver.hpp"
#include "scatopt/targets.hpp"

namespace {

using namespace scatopt;

DomainConfig bench_config() {
  DomainConfig c;
  c.width_m = 0.24;
  c.height_m = 0.24;
  c.source_x_m = 0.12;
  c.source_y_m = 0.12;
  c.design_size_m = 0.06;
  c.f_max_hz = 12000.0;
  c.target_radius_m = 0.1;
  c.pml_cells = 20;
  return c;
}

void bm_assemble(benchmark::State& state) {
  SimulationDomain dom = build_domain(bench_config());
  CoefficientFields coeffs = interpolate_material(DensityField::zeros(dom), dom);
  SourceSpec src{dom.source_i, dom.source_j, {1.0, 0.0}};
  for (auto _ : state) {
    AssembledSystem sys(dom, coeffs, src, dom.f_max_hz);
    benchmark::DoNotOptimize(sys.matrix());
  }
  state.counters["cells"] = static_cast<double>(dom.cells());
}
BENCHMARK(bm_assemble)->Unit(benchmark::kMillisecond);

void bm_factorize(benchmark::State& state) {
  SimulationDomain dom = build_domain(bench_config());
  CoefficientFields coeffs = interpolate_material(DensityField::zeros(dom), dom);
  SourceSpec src{dom.source_i, dom.source_j, {1.0, 0.0}};
  AssembledSystem sys(dom, coeffs, src, dom.f_max_hz);
  for (auto _ : state) {
    Factorization fact(sys);
    benchmark::DoNotOptimize(fact.frequency_hz());
  }
  state.counters["cells"] = static_cast<double>(dom.cells());
}
BENCHMARK(bm_factorize)->Unit(benchmark::kMillisecond);

void bm_solve_reused_factorization(benchmark::State& state) {
  SimulationDomain dom = build_domain(bench_config());
  CoefficientFields coeffs = interpolate_material(DensityField::zeros(dom), dom);
  SourceSpec src{dom.source_i, dom.source_j, {1.0, 0.0}};
  AssembledSystem sys(dom, coeffs, src, dom.f_max_hz);
  Factorization fact(sys);
  for (auto _ : state) {
    PressureField p = solve(sys, fact);
    benchmark::DoNotOptimize(p.p);
  }
}
BENCHMARK(bm_solve_reused_factorization)->Unit(benchmark::kMillisecond);

void bm_band_gradient(benchmark::State& state) {
  SimulationDomain dom = build_domain(bench_config());
  SourceSpec src{dom.source_i, dom.source_j, {1.0, 0.0}};
  LobeShape lobe;
  TargetSpec targets =
      rainbow_target(dom, src, 9000.0, 12000.0, 4, -40.0, 40.0, lobe);
  DensityFilter filter(dom, 3.0 * dom.h);
  BandProblem problem;
  problem.dom = &dom;
  problem.filter = &filter;
  problem.source = src;
  problem.targets = &targets;
  DensityField xi = DensityField::uniform(dom, 0.5);
  for (auto _ : state) {
    BandEval eval = evaluate_band(problem, xi, true, 1);
    benchmark::DoNotOptimize(eval.gradient.dphi_dxi);
  }
}
BENCHMARK(bm_band_gradient)->Unit(benchmark::kMillisecond);

}  // namespace
