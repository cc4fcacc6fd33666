#include <benchmark/benchmark.h>

#include "bilayer/simulation.hpp"

using namespace bilayer;

namespace {

void BM_BendingAssembly(benchmark::State& state) {
  QuadMesh mesh = build_rectangle_mesh({-1, -1}, {1, 1}, static_cast<int>(state.range(0)));
  ElementTable table(mesh);
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(mesh.num_elements(), 2000.0);
  for (auto _ : state) {
    SparseMat K = assemble_bending_matrix(mesh, table, mu);
    benchmark::DoNotOptimize(K.nonZeros());
  }
  state.SetLabel(std::to_string(mesh.num_elements()) + " elements");
}
BENCHMARK(BM_BendingAssembly)->Arg(4)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_HeatStep(benchmark::State& state) {
  QuadMesh mesh = build_rectangle_mesh({-1, -1}, {1, 1}, static_cast<int>(state.range(0)));
  mesh = tag_boundary(std::move(mesh), {{BoundaryTag::robin, [](const Vec2&) { return true; }}});
  HeatSystem sys = assemble_heat_system(
      mesh, Eigen::VectorXd::Constant(mesh.num_elements(), 0.1),
      Eigen::VectorXd::Constant(mesh.num_edges(), 2.0));
  HeatStepper stepper(sys, 5e-3);
  TempField theta = TempField::Zero(mesh.num_nodes());
  for (auto _ : state) {
    theta = stepper.step(theta, {0.0, 50.0, {}});
    benchmark::DoNotOptimize(theta.sum());
  }
}
BENCHMARK(BM_HeatStep)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_PlateStep(benchmark::State& state) {
  ScenarioConfig c = builtin_scenario("switch", static_cast<int>(state.range(0)));
  SimulationSetup setup = prepare_simulation(c);
  SplitState st = initial_state(setup.mesh);
  TempField theta(setup.mesh.num_nodes());
  for (int n = 0; n < setup.mesh.num_nodes(); ++n)
    theta(n) = 50.0 * std::exp(-2.0 * (setup.mesh.nodes[n].x() + 1.0));
  PlateScratch scratch;
  PlateStepStats stats;
  for (auto _ : state) {
    st = plate_step(*setup.plate, st, theta, c.tau, c.epsilon, c.obstacle, &stats, &scratch);
    benchmark::DoNotOptimize(stats.velocity_max);
  }
  state.SetLabel(std::to_string(setup.mesh.num_nodes()) + " nodes");
}
BENCHMARK(BM_PlateStep)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
