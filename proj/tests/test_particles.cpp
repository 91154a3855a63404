#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"
#include "vjump/errors.hpp"
#include "vjump/kernels.hpp"
#include "vjump/particles.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <sstream>

using namespace vjump;

namespace {

VelocityModel goldstein_kac(double nu, double mu) {
  Eigen::MatrixXd V(2, 1);
  V << -nu, nu;
  Eigen::MatrixXd R(2, 2);
  R << 0, mu, mu, 0;
  return VelocityModel(V, R);
}

ParticleEnsemble at_origin(const VelocityModel& model, std::size_t count, double dt, std::uint64_t seed) {
  std::vector<int> states(count);
  for (std::size_t p = 0; p < count; ++p) states[p] = static_cast<int>(p % model.speeds());
  return make_ensemble(model, std::vector<double>(count * model.dimension(), 0.0), states, dt, seed);
}

}  // namespace

TEST_CASE("time step and admissibility") {
  Eigen::MatrixXd R(3, 3);
  R << 0, 1, 2, 1, 0, 0.5, 2, 0.5, 0;
  const VelocityModel model(Eigen::MatrixXd::Zero(3, 1), R);
  CHECK(default_time_step(model) == doctest::Approx(0.1 / 3.0));
  CHECK_THROWS_AS(make_ensemble(model, {0.0}, {0}, 0.5, 1), ValidationError);
  CHECK_NOTHROW(make_ensemble(model, {0.0}, {0}, 1.0 / 3.0, 1));
  CHECK_THROWS_AS(make_ensemble(model, {0.0}, {3}, 0.01, 1), ValidationError);
  CHECK_THROWS_AS(make_ensemble(model, {0.0, 1.0}, {0}, 0.01, 1), ValidationError);
  CHECK_THROWS_AS(make_ensemble(model, {0.0}, {0}, 0.0, 1), ValidationError);
}

TEST_CASE("pure transport without switching") {
  Eigen::MatrixXd V(3, 2);
  V << 1, 0, 0, -2, 0.5, 0.5;
  const VelocityModel model(V, Eigen::MatrixXd::Zero(3, 3));
  ParticleEnsemble ensemble = make_ensemble(model, {0, 0, 1, 1, -1, 2}, {0, 1, 2}, 0.01, 5);
  advance(model, ensemble, 250);
  CHECK(ensemble.time == doctest::Approx(2.5));
  CHECK(ensemble.positions[0] == doctest::Approx(2.5));
  CHECK(ensemble.positions[3] == doctest::Approx(1 - 5.0));
  CHECK(ensemble.positions[4] == doctest::Approx(-1 + 1.25));
  CHECK(ensemble.states == std::vector<int>{0, 1, 2});
}

TEST_CASE("seeded determinism") {
  const VelocityModel gk = goldstein_kac(1.0, 1.0);
  ParticleEnsemble a = make_ensemble(gk, {0.0}, {0}, 0.01, 42);
  ParticleEnsemble b = a;
  for (int s = 0; s < 500; ++s) a = step(gk, a);
  advance(gk, b, 500);
  CHECK(a.positions == b.positions);
  CHECK(a.states == b.states);

  ParticleEnsemble c = make_ensemble(gk, {0.0}, {0}, 0.01, 43);
  advance(gk, c, 500);
  ParticleEnsemble d = at_origin(gk, 1000, 0.01, 42);
  ParticleEnsemble e = at_origin(gk, 1000, 0.01, 43);
  advance(gk, d, 500);
  advance(gk, e, 500);
  CHECK(d.positions != e.positions);
}

TEST_CASE("a switching particle moves with its new velocity") {
  // With mu dt = 1 every step switches, so the particle alternates and the
  // first displacement already uses the post-switch velocity.
  const VelocityModel gk = goldstein_kac(1.0, 1.0);
  ParticleEnsemble ensemble = make_ensemble(gk, {0.0}, {0}, 1.0, 7);
  ensemble = step(gk, ensemble);
  CHECK(ensemble.states[0] == 1);
  CHECK(ensemble.positions[0] == 1.0);
  ensemble = step(gk, ensemble);
  CHECK(ensemble.states[0] == 0);
  CHECK(ensemble.positions[0] == 0.0);
}

TEST_CASE("telegraph variance") {
  const double nu = 1.0, mu = 1.0, t = 2.0;
  const VelocityModel gk = goldstein_kac(nu, mu);
  ParticleEnsemble ensemble = at_origin(gk, 20000, 1e-3, 99);
  advance_to(gk, ensemble, t);
  CHECK(ensemble.time == doctest::Approx(t));
  const double var = position_covariance(ensemble)(0, 0);
  double m4 = 0.0;
  const double mean = mean_position(ensemble)(0);
  for (double x : ensemble.positions) m4 += std::pow(x - mean, 4);
  m4 /= ensemble.count();
  const double se = std::sqrt((m4 - var * var) / ensemble.count());
  const double expected = nu * nu / mu * t * (1 - (1 - std::exp(-2 * mu * t)) / (2 * mu * t));
  CHECK(std::abs(var - expected) <= 3 * se);
}

TEST_CASE("state occupancy relaxes like exp(-B t)") {
  Eigen::MatrixXd R(3, 3);
  R << 0, 1, 0.2, 1, 0, 0.5, 0.2, 0.5, 0;
  const VelocityModel model(Eigen::MatrixXd::Zero(3, 1), R);
  const std::size_t count = 30000;
  ParticleEnsemble ensemble =
      make_ensemble(model, std::vector<double>(count, 0.0), std::vector<int>(count, 0), 1e-3, 3);
  const double t = 1.0;
  advance_to(model, ensemble, t);
  const Eigen::VectorXd occupancy = state_occupancy(ensemble, 3);
  const Eigen::MatrixXd B = build_transition_matrix(model).entries();
  const Eigen::VectorXd expected = (-B * t).exp() * Eigen::Vector3d(1, 0, 0);
  for (int i = 0; i < 3; ++i) {
    const double se = std::sqrt(expected(i) * (1 - expected(i)) / count);
    CHECK(std::abs(occupancy(i) - expected(i)) <= 3 * se + 2e-3 * expected(i));
  }
  CHECK(occupancy.sum() == doctest::Approx(1.0));
}

TEST_CASE("mean displacement follows the drift") {
  Eigen::MatrixXd V(3, 2);
  V << 1, 0, 0, 1, 0.5, -0.4;
  Eigen::MatrixXd R(3, 3);
  R << 0, 1, 1, 1, 0, 1, 1, 1, 0;
  const VelocityModel model(V, R);
  ParticleEnsemble ensemble = at_origin(model, 30000, 0.01, 11);
  const double t = 5.0;
  advance_to(model, ensemble, t);
  const Eigen::VectorXd velocity = mean_position(ensemble) / t;
  const Eigen::MatrixXd cov = position_covariance(ensemble);
  const Eigen::VectorXd drift = V.colwise().mean();
  for (int a = 0; a < 2; ++a)
    CHECK(std::abs(velocity(a) - drift(a)) <= 3 * std::sqrt(cov(a, a) / ensemble.count()) / t);
}

TEST_CASE("histograms") {
  const VelocityModel gk = goldstein_kac(1.0, 1.0);
  const Grid grid(1, 8.0, 64);
  ParticleEnsemble point = make_ensemble(gk, std::vector<double>(100, grid.point(10)(0)),
                                         std::vector<int>(100, 0), 0.01, 1, 8.0);
  const SpectralField delta = density_histogram(point, grid);
  CHECK(delta.at(0, 0).real() * grid.box_volume() == doctest::Approx(1.0).epsilon(1e-14));

  const std::size_t count = 640000;
  std::vector<double> positions(count);
  for (std::size_t p = 0; p < count; ++p) positions[p] = -8.0 + 16.0 * counter_uniform(5, 0, p);
  const ParticleEnsemble uniform = make_ensemble(gk, positions, std::vector<int>(count, 0), 0.01, 1, 8.0);
  const SpectralField flat = density_histogram(uniform, grid);
  const std::vector<double> samples = to_samples(flat);
  const double level = 1.0 / 16.0;
  const double per_cell = static_cast<double>(count) / 64;
  for (double s : samples) CHECK(std::abs(s - level) <= 4.0 / std::sqrt(per_cell) * level);

  CHECK(l1_distance(flat, flat) == 0.0);
}

TEST_CASE("sampling from an initial datum") {
  const VelocityModel gk = goldstein_kac(1.0, 1.0);
  InitialDatum datum;
  datum.bumps.push_back({1, 2.0, Eigen::VectorXd::Constant(1, 3.0), 0.5});
  const ParticleEnsemble ensemble = sample_ensemble(gk, datum, 20000, 0.01, 17);
  CHECK(std::all_of(ensemble.states.begin(), ensemble.states.end(), [](int s) { return s == 1; }));
  CHECK(std::abs(mean_position(ensemble)(0) - 3.0) <= 3 * 0.5 / std::sqrt(20000.0));
  CHECK(std::sqrt(position_covariance(ensemble)(0, 0)) == doctest::Approx(0.5).epsilon(0.03));
  const ParticleEnsemble again = sample_ensemble(gk, datum, 20000, 0.01, 17);
  CHECK(again.positions == ensemble.positions);

  datum.bumps[0].amplitude = -1.0;
  CHECK_THROWS_AS(sample_ensemble(gk, datum, 10, 0.01, 1), ValidationError);
}

TEST_CASE("ensemble csv") {
  const VelocityModel gk = goldstein_kac(1.0, 1.0);
  std::ostringstream out;
  write_ensemble_csv(out, make_ensemble(gk, {0.5, -1.25}, {0, 1}, 0.1, 1));
  CHECK(out.str() == "x1,state\n0.5,1\n-1.25,2\n");
}
