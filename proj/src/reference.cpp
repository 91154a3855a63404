// Serial reference implementations of the kernels in kernels.cpp.

#include "vjump/kernels.hpp"

#include "forest_search.hpp"
#include "kernel_common.hpp"

namespace vjump::reference {

void propagate_modes(const Eigen::MatrixXd& B, const Eigen::MatrixXd& velocities,
                     const Grid& grid, double t, std::span<std::complex<double>> coeffs) {
  Eigen::VectorXcd scratch(B.rows());
  for (std::size_t m = 0; m < grid.size(); ++m)
    detail::propagate_one(B, velocities, grid, t, m, coeffs, scratch);
}

void advance_particles(const Eigen::MatrixXd& velocities, const SwitchTable& table,
                       ParticleEnsemble& ensemble, std::uint64_t steps) {
  for (std::size_t p = 0; p < ensemble.count(); ++p)
    detail::step_particle(velocities, table, ensemble, p, steps);
  ensemble.step_count += steps;
  ensemble.time = static_cast<double>(ensemble.step_count) * ensemble.dt;
}

std::vector<std::uint64_t> bin_particles(const ParticleEnsemble& ensemble, const Grid& grid) {
  std::vector<std::uint64_t> counts(grid.size(), 0);
  for (std::size_t p = 0; p < ensemble.count(); ++p)
    ++counts[detail::bin_index(ensemble.positions.data() + p * ensemble.dimension, grid)];
  return counts;
}

std::vector<double> abscissa_scan(const Eigen::MatrixXd& B, const Eigen::MatrixXd& velocities,
                                  const std::vector<Eigen::VectorXd>& kappas) {
  std::vector<double> result;
  result.reserve(kappas.size());
  for (const auto& kappa : kappas) result.push_back(detail::abscissa_at(B, velocities, kappa));
  return result;
}

std::vector<Forest> enumerate_forests(const ForestProblem& problem) {
  std::vector<Forest> out;
  detail::ForestSearch(problem).run_all(out);
  return out;
}

double forest_weight_sum(const ForestProblem& problem) {
  return detail::ForestSearch(problem).sum_all();
}

}  // namespace vjump::reference
