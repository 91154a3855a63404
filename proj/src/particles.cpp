#include "vjump/particles.hpp"

#include "vjump/errors.hpp"
#include "vjump/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace vjump {

namespace {

// Streams used for sampling initial positions, disjoint from particle indices.
constexpr std::uint64_t kChoiceStream = 0xC0FFEE0000000001ULL;
constexpr std::uint64_t kGaussStream = 0xC0FFEE0000000002ULL;

double max_row_sum(const VelocityModel& model) { return model.rates().rowwise().sum().maxCoeff(); }

void require_admissible(const VelocityModel& model, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive", "particles.dt");
  if (max_row_sum(model) * dt > 1.0)
    throw ValidationError("dt too large: some p_i = 1 - sum_j mu(i,j) dt is negative", "particles.dt");
}

void wrap_all(ParticleEnsemble& ensemble) {
  const double L = ensemble.box_half_width;
  if (L <= 0.0) return;
  for (double& x : ensemble.positions) x -= 2.0 * L * std::floor((x + L) / (2.0 * L));
}

}  // namespace

double default_time_step(const VelocityModel& model) {
  const double total = max_row_sum(model);
  return total > 0.0 ? 0.1 / total : 0.1;
}

ParticleEnsemble make_ensemble(const VelocityModel& model, std::vector<double> positions,
                               std::vector<int> states, double dt, std::uint64_t seed,
                               double box_half_width) {
  require_admissible(model, dt);
  const int d = model.dimension();
  if (positions.size() != states.size() * d)
    throw ValidationError("positions must hold count x d coordinates");
  for (const int s : states)
    if (s < 0 || s >= model.speeds()) throw ValidationError("particle state out of range");
  ParticleEnsemble ensemble;
  ensemble.dimension = d;
  ensemble.positions = std::move(positions);
  ensemble.states = std::move(states);
  ensemble.dt = dt;
  ensemble.seed = seed;
  ensemble.box_half_width = box_half_width;
  wrap_all(ensemble);
  return ensemble;
}

ParticleEnsemble sample_ensemble(const VelocityModel& model, const InitialDatum& datum,
                                 std::size_t count, double dt, std::uint64_t seed,
                                 double box_half_width) {
  const int d = model.dimension();
  std::vector<double> cumulative;
  double total = 0.0;
  for (const auto& bump : datum.bumps) {
    if (bump.amplitude < 0.0) throw ValidationError("particle sampling needs nonnegative bumps", "initial");
    if (bump.component < 0 || bump.component >= model.speeds())
      throw ValidationError("component out of range", "initial.component");
    if (bump.center.size() != d) throw ValidationError("center has the wrong dimension", "initial.center");
    total += bump.amplitude * std::pow(bump.width, d);
    cumulative.push_back(total);
  }
  if (!(total > 0.0)) throw ValidationError("initial datum has no mass to sample", "initial");

  std::vector<double> positions(count * d);
  std::vector<int> states(count);
  for (std::size_t p = 0; p < count; ++p) {
    const double u = counter_uniform(seed, kChoiceStream, p) * total;
    std::size_t b = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
    b = std::min(b, cumulative.size() - 1);
    const GaussianBump& bump = datum.bumps[b];
    states[p] = bump.component;
    for (int a = 0; a < d; ++a) {
      // Box-Muller on two counter draws per coordinate.
      const std::uint64_t counter = 2 * (p * d + a);
      const double u1 = 1.0 - counter_uniform(seed, kGaussStream, counter);
      const double u2 = counter_uniform(seed, kGaussStream, counter + 1);
      const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
      positions[p * d + a] = bump.center(a) + bump.width * z;
    }
  }
  return make_ensemble(model, std::move(positions), std::move(states), dt, seed, box_half_width);
}

ParticleEnsemble step(const VelocityModel& model, ParticleEnsemble ensemble) {
  advance(model, ensemble, 1);
  return ensemble;
}

void advance(const VelocityModel& model, ParticleEnsemble& ensemble, std::uint64_t steps) {
  require_admissible(model, ensemble.dt);
  if (steps == 0) return;
  kernels::advance_particles(model.velocities(), make_switch_table(model, ensemble.dt), ensemble, steps);
}

void advance_to(const VelocityModel& model, ParticleEnsemble& ensemble, double t_final) {
  const auto target = static_cast<std::uint64_t>(std::floor(t_final / ensemble.dt * (1.0 + 1e-12)));
  if (target > ensemble.step_count) advance(model, ensemble, target - ensemble.step_count);
}

SpectralField density_histogram(const ParticleEnsemble& ensemble, const Grid& grid) {
  if (grid.dimension() != ensemble.dimension) throw ValidationError("grid dimension mismatch");
  if (ensemble.count() == 0) throw ValidationError("empty ensemble");
  const std::vector<std::uint64_t> counts = kernels::bin_particles(ensemble, grid);
  const double scale = 1.0 / (static_cast<double>(ensemble.count()) * grid.cell_volume());
  std::vector<double> density(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) density[j] = static_cast<double>(counts[j]) * scale;
  return from_samples(grid, 1, density);
}

double l1_distance(const SpectralField& u, const SpectralField& v) {
  if (!(u.grid() == v.grid()) || u.components() != 1 || v.components() != 1)
    throw ValidationError("l1_distance needs scalar fields on one grid");
  const std::vector<double> a = to_samples(u);
  const std::vector<double> b = to_samples(v);
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) sum += std::abs(a[j] - b[j]);
  return sum * u.grid().cell_volume();
}

Eigen::VectorXd mean_position(const ParticleEnsemble& ensemble) {
  const int d = ensemble.dimension;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (std::size_t p = 0; p < ensemble.count(); ++p)
    for (int a = 0; a < d; ++a) mean(a) += ensemble.positions[p * d + a];
  return mean / static_cast<double>(ensemble.count());
}

Eigen::MatrixXd position_covariance(const ParticleEnsemble& ensemble) {
  const int d = ensemble.dimension;
  const Eigen::VectorXd mean = mean_position(ensemble);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t p = 0; p < ensemble.count(); ++p) {
    const Eigen::VectorXd x =
        Eigen::Map<const Eigen::VectorXd>(ensemble.positions.data() + p * d, d) - mean;
    cov += x * x.transpose();
  }
  return cov / static_cast<double>(ensemble.count() - 1);
}

Eigen::VectorXd state_occupancy(const ParticleEnsemble& ensemble, int speeds) {
  Eigen::VectorXd occupancy = Eigen::VectorXd::Zero(speeds);
  for (const int s : ensemble.states) occupancy(s) += 1.0;
  return occupancy / static_cast<double>(ensemble.count());
}

void write_ensemble_csv(std::ostream& out, const ParticleEnsemble& ensemble) {
  const int d = ensemble.dimension;
  for (int a = 0; a < d; ++a) out << "x" << a + 1 << ',';
  out << "state\n";
  char buffer[32];
  for (std::size_t p = 0; p < ensemble.count(); ++p) {
    for (int a = 0; a < d; ++a) {
      std::snprintf(buffer, sizeof buffer, "%.17g", ensemble.positions[p * d + a]);
      out << buffer << ',';
    }
    out << ensemble.states[p] + 1 << '\n';
  }
}

}  // namespace vjump
