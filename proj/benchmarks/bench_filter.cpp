#include <benchmark/benchmark.h>

#include "scatopt/domain.hpp"

namespace {

using namespace scatopt;

SimulationDomain filter_domain() {
  DomainConfig c;
  c.width_m = 0.4;
  c.height_m = 0.4;
  c.source_x_m = 0.2;
  c.source_y_m = 0.2;
  c.design_size_m = 0.12;
  c.f_max_hz = 12000.0;
  c.target_radius_m = 0.18;
  c.pml_cells = 20;
  return build_domain(c);
}

void bm_filter_apply(benchmark::State& state) {
  SimulationDomain dom = filter_domain();
  DensityFilter filter(dom, static_cast<double>(state.range(0)) * dom.h);
  DensityField xi = DensityField::uniform(dom, 0.5);
  for (auto _ : state) {
    DensityField out = filter.apply(xi);
    benchmark::DoNotOptimize(out.xi);
  }
  state.counters["design_cells"] = static_cast<double>(dom.design_cells.size());
}
BENCHMARK(bm_filter_apply)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void bm_projection(benchmark::State& state) {
  SimulationDomain dom = filter_domain();
  DensityField xi = DensityField::uniform(dom, 0.5);
  for (auto _ : state) {
    DensityField out = apply_projection(xi, 8.0, 0.5);
    benchmark::DoNotOptimize(out.xi);
  }
}
BENCHMARK(bm_projection)->Unit(benchmark::kMillisecond);

}  // namespace
