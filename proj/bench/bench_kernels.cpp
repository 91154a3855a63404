// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to taste.

#include "vjump/forests.hpp"
#include "vjump/kernels.hpp"
#include "vjump/particles.hpp"
#include "vjump/spectral.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace vjump;

namespace {

VelocityModel random_model(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> rate(0.1, 1.0);
  Eigen::MatrixXd V(n, d);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < d; ++a) V(i, a) = gauss(rng);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) R(i, j) = R(j, i) = rate(rng);
  return VelocityModel(V, R);
}

template <bool Parallel>
void propagate(benchmark::State& state) {
  const VelocityModel model = random_model(6, 2, 1);
  const Grid grid(2, 32.0, static_cast<int>(state.range(0)));
  SpectralField field(grid, model.speeds());
  for (auto& c : field.coefficients()) c = 1.0;
  const Eigen::MatrixXd B = build_transition_matrix(model).entries();
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::propagate_modes(B, model.velocities(), grid, 0.5, field.coefficients());
    else
      reference::propagate_modes(B, model.velocities(), grid, 0.5, field.coefficients());
    benchmark::DoNotOptimize(field.coefficients().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}

template <bool Parallel>
void particles(benchmark::State& state) {
  const VelocityModel model = random_model(4, 2, 2);
  const std::size_t count = static_cast<std::size_t>(state.range(0));
  const double dt = default_time_step(model);
  ParticleEnsemble ensemble =
      make_ensemble(model, std::vector<double>(2 * count, 0.0), std::vector<int>(count, 0), dt, 7, 50.0);
  const SwitchTable table = make_switch_table(model, dt);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::advance_particles(model.velocities(), table, ensemble, 10);
    else
      reference::advance_particles(model.velocities(), table, ensemble, 10);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(count) * 10);
}

template <bool Parallel>
void binning(benchmark::State& state) {
  const VelocityModel model = random_model(4, 2, 3);
  const std::size_t count = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> position(-50.0, 50.0);
  std::vector<double> positions(2 * count);
  for (double& x : positions) x = position(rng);
  const ParticleEnsemble ensemble =
      make_ensemble(model, positions, std::vector<int>(count, 0), default_time_step(model), 7, 50.0);
  const Grid grid(2, 50.0, 256);
  for (auto _ : state) {
    auto counts = Parallel ? kernels::bin_particles(ensemble, grid) : reference::bin_particles(ensemble, grid);
    benchmark::DoNotOptimize(counts.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(count));
}

template <bool Parallel>
void abscissa(benchmark::State& state) {
  const VelocityModel model = random_model(static_cast<int>(state.range(0)), 3, 4);
  const Eigen::MatrixXd B = build_transition_matrix(model).entries();
  std::vector<Eigen::VectorXd> kappas;
  for (int s = 0; s < 256; ++s) kappas.push_back(Eigen::Vector3d(1.0, 0.3, -0.2) * std::pow(10.0, s / 64.0 - 2.0));
  for (auto _ : state) {
    auto rows = Parallel ? kernels::abscissa_scan(B, model.velocities(), kappas)
                         : reference::abscissa_scan(B, model.velocities(), kappas);
    benchmark::DoNotOptimize(rows.data());
  }
}

template <bool Parallel>
void forests(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const VelocityModel model = random_model(n, 1, 5);
  ForestProblem problem;
  problem.n = n;
  problem.arcs = graph_arcs(model);
  for (const Arc& arc : problem.arcs) problem.weights.push_back(model.rate(arc.first, arc.second));
  problem.premerged = {0};
  for (auto _ : state) {
    auto members = Parallel ? kernels::enumerate_forests(problem) : reference::enumerate_forests(problem);
    benchmark::DoNotOptimize(members.data());
  }
}

}  // namespace

BENCHMARK(propagate<false>)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(propagate<true>)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(particles<false>)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(particles<true>)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(binning<false>)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(binning<true>)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(abscissa<false>)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(abscissa<true>)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(forests<false>)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK(forests<true>)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
