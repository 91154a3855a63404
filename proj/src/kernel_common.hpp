#pragma once

// Per-item bodies shared by the OpenMP kernels and the serial reference.

#include "vjump/kernels.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>

namespace vjump::detail {

inline Eigen::MatrixXcd symbol(const Eigen::MatrixXd& B, const Eigen::MatrixXd& velocities,
                               const Eigen::VectorXd& kappa) {
  Eigen::MatrixXcd M = B.cast<std::complex<double>>();
  const Eigen::VectorXd phase = velocities * kappa;
  for (Eigen::Index i = 0; i < M.rows(); ++i) M(i, i) += std::complex<double>(0.0, phase(i));
  return M;
}

inline void propagate_one(const Eigen::MatrixXd& B, const Eigen::MatrixXd& velocities,
                          const Grid& grid, double t, std::size_t mode,
                          std::span<std::complex<double>> coeffs, Eigen::VectorXcd& scratch) {
  const std::size_t modes = grid.size();
  const Eigen::Index n = B.rows();
  if (grid.is_nyquist(mode)) {
    for (Eigen::Index c = 0; c < n; ++c) coeffs[c * modes + mode] = 0.0;
    return;
  }
  bool all_zero = true;
  for (Eigen::Index c = 0; c < n; ++c) {
    scratch(c) = coeffs[c * modes + mode];
    all_zero = all_zero && scratch(c) == std::complex<double>(0.0);
  }
  if (all_zero) return;
  const Eigen::MatrixXcd M = symbol(B, velocities, grid.kappa(mode));
  const Eigen::MatrixXcd propagator = (-t * M).exp();
  const Eigen::VectorXcd result = propagator * scratch;
  for (Eigen::Index c = 0; c < n; ++c) coeffs[c * modes + mode] = result(c);
}

inline double wrap_coordinate(double x, double L) {
  const double period = 2.0 * L;
  return x - period * std::floor((x + L) / period);
}

inline void step_particle(const Eigen::MatrixXd& velocities, const SwitchTable& table,
                          ParticleEnsemble& ensemble, std::size_t p, std::uint64_t steps) {
  const int d = ensemble.dimension;
  int state = ensemble.states[p];
  double* x = ensemble.positions.data() + p * d;
  for (std::uint64_t s = 0; s < steps; ++s) {
    const auto& cumulative = table.cumulative[state];
    if (!cumulative.empty()) {
      const double u = counter_uniform(ensemble.seed, p, ensemble.step_count + s);
      if (u < cumulative.back()) {
        const auto k = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
        state = table.targets[state][k];
      }
    }
    for (int a = 0; a < d; ++a) x[a] += velocities(state, a) * ensemble.dt;
  }
  if (ensemble.box_half_width > 0.0)
    for (int a = 0; a < d; ++a) x[a] = wrap_coordinate(x[a], ensemble.box_half_width);
  ensemble.states[p] = state;
}

inline std::size_t bin_index(const double* x, const Grid& grid) {
  const int N = grid.points();
  const double L = grid.half_width();
  const double h = grid.spacing();
  std::size_t index = 0;
  for (int a = 0; a < grid.dimension(); ++a) {
    long cell = std::lround(std::floor((wrap_coordinate(x[a], L) + L) / h + 0.5));
    cell %= N;
    if (cell < 0) cell += N;
    index = index * N + static_cast<std::size_t>(cell);
  }
  return index;
}

inline double abscissa_at(const Eigen::MatrixXd& B, const Eigen::MatrixXd& velocities,
                          const Eigen::VectorXd& kappa) {
  const Eigen::MatrixXcd generator = -symbol(B, velocities, kappa);
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(generator, false);
  return solver.eigenvalues().real().maxCoeff();
}

}  // namespace vjump::detail
