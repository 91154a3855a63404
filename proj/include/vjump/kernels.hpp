#pragma once

// Data-parallel inner loops. Each kernel exists twice with the same
// signature: vjump::kernels (OpenMP) and vjump::reference (plain serial
// loops). The library calls the OpenMP versions; tests require both to agree
// bit for bit, and bench/ times them against each other.

#include "vjump/forests.hpp"
#include "vjump/model.hpp"
#include "vjump/particles.hpp"
#include "vjump/spectral.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace vjump {

/// Precomputed per-state switching thresholds for the particle walk.
struct SwitchTable {
  std::vector<std::vector<double>> cumulative;  // per state, running sum of mu(i,j) dt
  std::vector<std::vector<int>> targets;        // matching target states
};
SwitchTable make_switch_table(const VelocityModel& model, double dt);

/// Uniform double in [0, 1) from a counter-based hash of (seed, stream, counter).
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept;

/// Nodes of forest enumeration shared by both implementations.
struct ForestProblem {
  int n = 0;
  std::vector<Arc> arcs;        // sorted
  std::vector<double> weights;  // rate of each arc
  std::vector<int> premerged;   // vertices merged before enumeration (the roots)
  int target_components = 1;    // components counted with `premerged` as one vertex
};

namespace kernels {
/// coeffs is component-major; each mode is multiplied by exp(-(i diag(v.kappa) + B) t).
void propagate_modes(const Eigen::MatrixXd& B, const Eigen::MatrixXd& velocities,
                     const Grid& grid, double t, std::span<std::complex<double>> coeffs);
void advance_particles(const Eigen::MatrixXd& velocities, const SwitchTable& table,
                       ParticleEnsemble& ensemble, std::uint64_t steps);
/// Particle counts per grid cell (nearest sample point, periodic).
std::vector<std::uint64_t> bin_particles(const ParticleEnsemble& ensemble, const Grid& grid);
/// Max real part of the eigenvalues of -(i diag(v.kappa) + B), per kappa.
std::vector<double> abscissa_scan(const Eigen::MatrixXd& B, const Eigen::MatrixXd& velocities,
                                  const std::vector<Eigen::VectorXd>& kappas);
std::vector<Forest> enumerate_forests(const ForestProblem& problem);
/// Sum of forest weights, same forests as enumerate_forests.
double forest_weight_sum(const ForestProblem& problem);
}  // namespace kernels

namespace reference {
/// coeffs is component-major; each mode is multiplied by exp(-(i diag(v.kappa) + B) t).
void propagate_modes(const Eigen::MatrixXd& B, const Eigen::MatrixXd& velocities,
                     const Grid& grid, double t, std::span<std::complex<double>> coeffs);
void advance_particles(const Eigen::MatrixXd& velocities, const SwitchTable& table,
                       ParticleEnsemble& ensemble, std::uint64_t steps);
/// Particle counts per grid cell (nearest sample point, periodic).
std::vector<std::uint64_t> bin_particles(const ParticleEnsemble& ensemble, const Grid& grid);
/// Max real part of the eigenvalues of -(i diag(v.kappa) + B), per kappa.
std::vector<double> abscissa_scan(const Eigen::MatrixXd& B, const Eigen::MatrixXd& velocities,
                                  const std::vector<Eigen::VectorXd>& kappas);
std::vector<Forest> enumerate_forests(const ForestProblem& problem);
/// Sum of forest weights, same forests as enumerate_forests.
double forest_weight_sum(const ForestProblem& problem);
}  // namespace reference

}  // namespace vjump
