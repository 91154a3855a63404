#pragma once

#include "vjump/model.hpp"
#include "vjump/spectral.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace vjump {

/// Particles of the correlated random walk. Every step a particle in state i
/// keeps its velocity with probability 1 - sum_j mu(i,j) dt, or switches to j
/// with probability mu(i,j) dt; either way it then moves by v^{new state} dt.
struct ParticleEnsemble {
  int dimension = 1;
  std::vector<double> positions;  // count x dimension, row-major
  std::vector<int> states;
  double time = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t step_count = 0;
  double box_half_width = 0.0;  // positions wrap into [-L, L) when > 0

  std::size_t count() const noexcept { return states.size(); }
};

/// 0.1 / max_i sum_j mu(i,j).
double default_time_step(const VelocityModel& model);

/// Builds an ensemble from explicit positions and states. Throws
/// ValidationError when some p_i = 1 - sum_j mu(i,j) dt is negative or a
/// state is out of range.
ParticleEnsemble make_ensemble(const VelocityModel& model, std::vector<double> positions,
                               std::vector<int> states, double dt, std::uint64_t seed,
                               double box_half_width = 0.0);

/// Draws `count` particles from the normalized bumps of `datum` (amplitudes
/// must be nonnegative). Deterministic in `seed`.
ParticleEnsemble sample_ensemble(const VelocityModel& model, const InitialDatum& datum,
                                 std::size_t count, double dt, std::uint64_t seed,
                                 double box_half_width = 0.0);

ParticleEnsemble step(const VelocityModel& model, ParticleEnsemble ensemble);
void advance(const VelocityModel& model, ParticleEnsemble& ensemble, std::uint64_t steps);
/// Advances to the last step not exceeding t_final.
void advance_to(const VelocityModel& model, ParticleEnsemble& ensemble, double t_final);

/// Mass-normalized histogram on the grid's sample cells, transformed.
SpectralField density_histogram(const ParticleEnsemble& ensemble, const Grid& grid);

/// \int |u - v| dx by grid quadrature (scalar fields).
double l1_distance(const SpectralField& u, const SpectralField& v);

Eigen::VectorXd mean_position(const ParticleEnsemble& ensemble);
Eigen::MatrixXd position_covariance(const ParticleEnsemble& ensemble);
/// Fraction of particles in each state.
Eigen::VectorXd state_occupancy(const ParticleEnsemble& ensemble, int speeds);

void write_ensemble_csv(std::ostream& out, const ParticleEnsemble& ensemble);

}  // namespace vjump
