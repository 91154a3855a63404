#include "vjump/kernels.hpp"

#include "forest_search.hpp"
#include "kernel_common.hpp"


namespace vjump {

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept {
  // splitmix64 finalizer applied to a keyed combination of the counters
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  const std::uint64_t h = mix(mix(mix(seed) + stream) + counter);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

SwitchTable make_switch_table(const VelocityModel& model, double dt) {
  const int n = model.speeds();
  SwitchTable table;
  table.cumulative.resize(n);
  table.targets.resize(n);
  for (int i = 0; i < n; ++i) {
    double running = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i || model.rate(i, j) == 0.0) continue;
      running += model.rate(i, j) * dt;
      table.cumulative[i].push_back(running);
      table.targets[i].push_back(j);
    }
  }
  return table;
}

namespace kernels {

void propagate_modes(const Eigen::MatrixXd& B, const Eigen::MatrixXd& velocities,
                     const Grid& grid, double t, std::span<std::complex<double>> coeffs) {
  const auto modes = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel
  {
    Eigen::VectorXcd scratch(B.rows());
#pragma omp for schedule(static)
    for (std::ptrdiff_t m = 0; m < modes; ++m)
      detail::propagate_one(B, velocities, grid, t, static_cast<std::size_t>(m), coeffs, scratch);
  }
}

void advance_particles(const Eigen::MatrixXd& velocities, const SwitchTable& table,
                       ParticleEnsemble& ensemble, std::uint64_t steps) {
  const auto count = static_cast<std::ptrdiff_t>(ensemble.count());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < count; ++p)
    detail::step_particle(velocities, table, ensemble, static_cast<std::size_t>(p), steps);
  ensemble.step_count += steps;
  ensemble.time = static_cast<double>(ensemble.step_count) * ensemble.dt;
}

std::vector<std::uint64_t> bin_particles(const ParticleEnsemble& ensemble, const Grid& grid) {
  const auto count = static_cast<std::ptrdiff_t>(ensemble.count());
  std::vector<std::size_t> cell(ensemble.count());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < count; ++p)
    cell[p] = detail::bin_index(ensemble.positions.data() + p * ensemble.dimension, grid);

  std::vector<std::uint64_t> counts(grid.size(), 0);
  for (const std::size_t c : cell) ++counts[c];
  return counts;
}

std::vector<double> abscissa_scan(const Eigen::MatrixXd& B, const Eigen::MatrixXd& velocities,
                                  const std::vector<Eigen::VectorXd>& kappas) {
  std::vector<double> result(kappas.size());
  const auto count = static_cast<std::ptrdiff_t>(kappas.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t k = 0; k < count; ++k)
    result[k] = detail::abscissa_at(B, velocities, kappas[k]);
  return result;
}

std::vector<Forest> enumerate_forests(const ForestProblem& problem) {
  const detail::ForestSearch search(problem);
  const int arcs = search.arc_count();
  // One bucket per smallest arc, plus the arc-free forest in front.
  std::vector<std::vector<Forest>> buckets(arcs + 1);
  search.run_from_first(-1, buckets[0]);
#pragma omp parallel for schedule(dynamic, 1)
  for (int first = 0; first < arcs; ++first) search.run_from_first(first, buckets[first + 1]);

  std::vector<Forest> out;
  for (auto& bucket : buckets)
    out.insert(out.end(), std::make_move_iterator(bucket.begin()),
               std::make_move_iterator(bucket.end()));
  return out;
}

double forest_weight_sum(const ForestProblem& problem) {
  const detail::ForestSearch search(problem);
  const int arcs = search.arc_count();
  double total = search.sum_from_first(-1);
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : total)
  for (int first = 0; first < arcs; ++first) total += search.sum_from_first(first);
  return total;
}

}  // namespace kernels
}  // namespace vjump
