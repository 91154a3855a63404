#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"
#include "vjump/dispersion.hpp"
#include "vjump/errors.hpp"
#include "vjump/spectral.hpp"

#include <numbers>
#include <sstream>

using namespace vjump;
using cd = std::complex<double>;

namespace {

VelocityModel goldstein_kac(double nu, double mu) {
  Eigen::MatrixXd V(2, 1);
  V << -nu, nu;
  Eigen::MatrixXd R(2, 2);
  R << 0, mu, mu, 0;
  return VelocityModel(V, R);
}

InitialDatum bump(int component, double center, double width, double amplitude = 1.0) {
  InitialDatum datum;
  datum.bumps.push_back({component, amplitude, Eigen::VectorXd::Constant(1, center), width});
  return datum;
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid grid(2, 4.0, 8);
  CHECK(grid.size() == 64);
  CHECK(grid.spacing() == 1.0);
  CHECK(grid.cell_volume() == 1.0);
  CHECK(grid.box_volume() == 64.0);
  CHECK(grid.frequency(3) == 3);
  CHECK(grid.frequency(4) == -4);
  CHECK(grid.frequency(7) == -1);
  CHECK(grid.is_nyquist(4));
  CHECK(grid.is_nyquist(4 * 8 + 1));
  CHECK_FALSE(grid.is_nyquist(9));
  const Eigen::VectorXd k = grid.kappa(1 * 8 + 7);
  CHECK(k(0) == doctest::Approx(std::numbers::pi / 4));
  CHECK(k(1) == doctest::Approx(-std::numbers::pi / 4));
  CHECK(grid.point(0) == Eigen::Vector2d(-4, -4));
  CHECK(grid.point(8 + 3) == Eigen::Vector2d(-3, -1));
  CHECK_THROWS_AS(Grid(1, 1.0, 12), ValidationError);
  CHECK_THROWS_AS(Grid(1, 1.0, 4), ValidationError);
  CHECK_THROWS_AS(Grid(1, 0.0, 16), ValidationError);
}

TEST_CASE("transforms give fourier-series coefficients") {
  const Grid grid(1, 20.0, 256);
  const double w = 1.5, c = 2.0;
  const SpectralField f = sample_initial(bump(0, c, w), grid, 1);
  for (const std::size_t m : {0, 1, 5, 30, 250}) {
    const double k = grid.kappa(m)(0);
    const cd expected = std::sqrt(2 * std::numbers::pi) * w / 40.0 * std::exp(-0.5 * k * k * w * w) *
                        std::exp(cd(0.0, -k * c));
    CHECK(std::abs(f.at(0, m) - expected) <= 1e-14);
  }
  CHECK(f.at(0, 128) == cd(0.0));
  for (std::size_t m = 1; m < 128; ++m) CHECK(std::abs(f.at(0, m) - std::conj(f.at(0, 256 - m))) <= 1e-16);
}

TEST_CASE("round trip") {
  const Grid grid(2, 10.0, 32);
  InitialDatum datum;
  datum.bumps.push_back({0, 1.0, Eigen::Vector2d(1, -2), 1.0});
  datum.bumps.push_back({1, -0.5, Eigen::Vector2d(-3, 0.5), 1.5});
  datum.offsets = {0.25, 0.0};
  const SpectralField f = sample_initial(datum, grid, 2);
  const std::vector<double> samples = to_samples(f);
  const SpectralField g = from_samples(grid, 2, samples);
  CHECK(l2_distance(f, g) <= 1e-13);
  CHECK(samples[0] == doctest::Approx(0.25).epsilon(1e-6));
  CHECK_THROWS_AS(from_samples(grid, 2, std::vector<double>(10)), ValidationError);
}

TEST_CASE("hyperbolic solver basics") {
  const Grid grid(1, 10.0, 64);
  const VelocityModel gk = goldstein_kac(1.0, 1.0);
  const SpectralField f0 = sample_initial(bump(0, 0.0, 1.0), grid, 2);
  CHECK(l2_distance(solve_hyperbolic(gk, f0, 0.0), f0) == 0.0);
  CHECK_THROWS_AS(solve_hyperbolic(gk, f0, -1.0), ValidationError);
  CHECK_THROWS_AS(solve_hyperbolic(gk, sample_initial(bump(0, 0.0, 1.0), grid, 1), 1.0), ValidationError);

  // Pure transport on a single mode.
  const VelocityModel frozen = goldstein_kac(1.5, 0.0);
  SpectralField single(grid, 2);
  const std::size_t m = 3;
  single.at(0, m) = cd(0.3, 0.1);
  single.at(1, m) = cd(-0.2, 0.4);
  const double t = 2.7;
  const SpectralField moved = solve_hyperbolic(frozen, single, t);
  const double k = grid.kappa(m)(0);
  CHECK(std::abs(moved.at(0, m) - single.at(0, m) * std::exp(cd(0, 1.5 * k * t))) <= 1e-14);
  CHECK(std::abs(moved.at(1, m) - single.at(1, m) * std::exp(cd(0, -1.5 * k * t))) <= 1e-14);
}

TEST_CASE("goldstein-kac propagator closed form") {
  const double nu = 1.3, mu = 0.8, t = 1.7;
  const VelocityModel gk = goldstein_kac(nu, mu);
  const Grid grid(1, 5.0, 32);
  SpectralField f0(grid, 2);
  for (std::size_t m = 0; m < grid.size(); ++m) {
    f0.at(0, m) = cd(std::cos(m), std::sin(2.0 * m));
    f0.at(1, m) = cd(0.5 * std::sin(m), 0.1 * m);
  }
  const SpectralField f = solve_hyperbolic(gk, f0, t);
  for (std::size_t m = 0; m < grid.size(); ++m) {
    if (grid.is_nyquist(m)) continue;
    const double k = grid.kappa(m)(0);
    Eigen::Matrix2cd N;
    N << cd(0, -nu * k), -mu, -mu, cd(0, nu * k);
    const cd s = std::sqrt(cd(mu * mu - nu * nu * k * k));
    const cd sinh_over_s = std::abs(s) < 1e-12 ? cd(t) : std::sinh(s * t) / s;
    const Eigen::Matrix2cd P = std::exp(-mu * t) * (std::cosh(s * t) * Eigen::Matrix2cd::Identity() - sinh_over_s * N);
    const Eigen::Vector2cd expected = P * Eigen::Vector2cd(f0.at(0, m), f0.at(1, m));
    CHECK(std::abs(f.at(0, m) - expected(0)) <= 1e-12);
    CHECK(std::abs(f.at(1, m) - expected(1)) <= 1e-12);
  }
}

TEST_CASE("telegraph relation") {
  const double nu = 1.0, mu = 0.7;
  const VelocityModel gk = goldstein_kac(nu, mu);
  const Grid grid(1, 8.0, 64);
  InitialDatum datum = bump(0, -1.0, 0.8);
  datum.bumps.push_back({1, 0.5, Eigen::VectorXd::Constant(1, 2.0), 1.1});
  const SpectralField f0 = sample_initial(datum, grid, 2);
  for (const double t : {0.3, 1.0, 3.0}) {
    const SpectralField f = solve_hyperbolic(gk, f0, t);
    for (std::size_t m = 0; m < grid.size(); ++m) {
      if (grid.is_nyquist(m)) continue;
      const Eigen::MatrixXcd M = symbol_matrix(gk, grid.kappa(m));
      const Eigen::Vector2cd v(f.at(0, m), f.at(1, m));
      const cd u = v.sum();
      const cd ut = -(M * v).sum();
      const cd utt = (M * M * v).sum();
      const double k = grid.kappa(m)(0);
      const cd residual = 2 * mu * ut + utt + nu * nu * k * k * u;
      const double scale = std::abs(2 * mu * ut) + std::abs(utt) + std::abs(nu * nu * k * k * u);
      CHECK(std::abs(residual) <= 1e-8 * scale + 1e-300);
    }
  }
}

TEST_CASE("parabolic solver") {
  const Grid grid(1, 40.0, 512);
  const SpectralField u0 = sample_initial(bump(0, 0.0, 1.0), grid, 1);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
  CHECK(l2_distance(solve_parabolic(zero, u0, 5.0, Eigen::VectorXd::Zero(1)), u0) == 0.0);

  const double D = 0.5, t = 3.0, w = 1.0, shift = 2.0;
  const SpectralField u = solve_parabolic(Eigen::MatrixXd::Constant(1, 1, D), u0, t,
                                          Eigen::VectorXd::Constant(1, shift / t));
  const double width = std::sqrt(w * w + 2 * D * t);
  const std::vector<double> samples = to_samples(u);
  double worst = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.point(j)(0) - shift;
    worst = std::max(worst, std::abs(samples[j] - w / width * std::exp(-x * x / (2 * width * width))));
  }
  CHECK(worst <= 1e-12);
  CHECK(u.at(0, 0) == u0.at(0, 0));
  CHECK_THROWS_AS(solve_parabolic(Eigen::MatrixXd::Constant(1, 1, -1.0), u0, 1.0, Eigen::VectorXd::Zero(1)),
                  PreconditionError);
  CHECK_THROWS_AS(solve_parabolic(zero, sample_initial(bump(0, 0, 1), grid, 2), 1.0, Eigen::VectorXd::Zero(1)),
                  ValidationError);
}

TEST_CASE("total density") {
  const Grid grid(1, 10.0, 32);
  const SpectralField g = sample_initial(bump(0, 0.0, 1.0), grid, 1);
  SpectralField f(grid, 3);
  for (int c = 0; c < 3; ++c)
    for (std::size_t m = 0; m < grid.size(); ++m) f.at(c, m) = g.at(0, m);
  const SpectralField u = total_density(f);
  for (std::size_t m = 0; m < grid.size(); ++m) CHECK(u.at(0, m) == 3.0 * g.at(0, m));
  CHECK(l2_norm(total_density(SpectralField(grid, 3))) == 0.0);
}

TEST_CASE("convex functions") {
  CHECK(ConvexFunction::square()(-3.0) == 9.0);
  CHECK(ConvexFunction::absolute()(-3.0) == 3.0);
  CHECK(ConvexFunction::positive_part()(-3.0) == 0.0);
  CHECK(ConvexFunction::positive_part()(2.0) == 2.0);
  const ConvexFunction table = ConvexFunction::table({-1, 0, 2}, {1, 0, 1});
  CHECK(table(-2.0) == doctest::Approx(2.0));
  CHECK(table(1.0) == doctest::Approx(0.5));
  CHECK(table(4.0) == doctest::Approx(2.0));
  CHECK(table.name() == "table");
  CHECK_THROWS_AS(ConvexFunction::table({0, 1, 2}, {0, 1, 0}), ValidationError);
  CHECK_THROWS_AS(ConvexFunction::table({0, 0}, {0, 1}), ValidationError);
}

TEST_CASE("lyapunov functionals") {
  const Grid grid(1, 20.0, 256);
  InitialDatum datum = bump(0, -1.0, 1.0);
  datum.bumps.push_back({1, 0.7, Eigen::VectorXd::Constant(1, 3.0), 0.5});
  const SpectralField f = sample_initial(datum, grid, 2);
  const double square = lyapunov_functional(f, ConvexFunction::square());
  CHECK(test::relative_error(square, l2_norm(f) * l2_norm(f)) <= 1e-12);

  const SpectralField negative = sample_initial(bump(0, 0.0, 1.0, -1.0), grid, 1);
  CHECK(lyapunov_functional(negative, ConvexFunction::positive_part()) <= 1e-15);

  const VelocityModel gk = goldstein_kac(1.0, 1.0);
  double previous = INFINITY;
  for (const double t : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    const double value = lyapunov_functional(solve_hyperbolic(gk, f, t), ConvexFunction::absolute());
    CHECK(value <= previous * (1 + 1e-8));
    previous = value;
  }
}

TEST_CASE("distances and seminorms") {
  const Grid grid(1, 10.0, 64);
  const SpectralField u = sample_initial(bump(0, 0.0, 1.0), grid, 1);
  SpectralField minus = u;
  for (auto& c : minus.coefficients()) c = -c;
  CHECK(l2_distance(u, u) == 0.0);
  CHECK(l2_distance(u, minus) == doctest::Approx(2 * l2_norm(u)).epsilon(1e-15));
  CHECK(l2_norm(u) == doctest::Approx(std::sqrt(std::sqrt(std::numbers::pi))).epsilon(1e-12));
  CHECK_THROWS_AS(l2_distance(u, sample_initial(bump(0, 0.0, 1.0), Grid(1, 10.0, 32), 1)), ValidationError);
  CHECK_THROWS_AS(l2_distance(u, sample_initial(bump(0, 0.0, 1.0), grid, 2)), ValidationError);
  // |u'|^2 integrates to sqrt(pi) / 2 for a unit Gaussian.
  CHECK(sobolev_seminorm_sq(u, 1) == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-10));
}

TEST_CASE("cell average") {
  const Grid grid(2, 4.0, 16);
  InitialDatum flat;
  flat.offsets = {2.0};
  const SpectralField c = sample_initial(flat, grid, 1);
  CHECK(l2_distance(cell_average(c), c) == 0.0);
  const SpectralField g = sample_initial(InitialDatum{{{0, 1.0, Eigen::Vector2d(0, 0), 1.0}}, {}}, grid, 1);
  CHECK(l2_norm(cell_average(g)) < l2_norm(g));
  CHECK(cell_average(g).at(0, 0) == g.at(0, 0));
}

TEST_CASE("solver invariants on random models") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = 1 + trial % 2;
    const int n = 2 + trial % 4;
    const VelocityModel model = test::random_symmetric_model(rng, n, d);
    const Grid grid(d, 8.0, d == 1 ? 64 : 32);
    InitialDatum datum;
    for (int c = 0; c < n; ++c)
      datum.bumps.push_back({c, test::random_rate(rng), Eigen::VectorXd::Random(d), 0.7 + 0.5 * test::random_rate(rng)});
    const SpectralField f0 = sample_initial(datum, grid, n);
    const cd mass0 = total_density(f0).at(0, 0);

    double previous[3] = {INFINITY, INFINITY, INFINITY};
    for (const double t : {0.0, 0.25, 0.5, 1.0, 2.0}) {
      const SpectralField f = solve_hyperbolic(model, f0, t);
      CHECK(std::abs(total_density(f).at(0, 0) - mass0) <= 1e-13 * std::abs(mass0));
      for (int k = 0; k < 3; ++k) {
        const double value = sobolev_seminorm_sq(f, k);
        CHECK(value <= previous[k] * (1 + 1e-12));
        previous[k] = value;
      }
    }
    const SpectralField once = solve_hyperbolic(model, f0, 1.5);
    const SpectralField twice = solve_hyperbolic(model, solve_hyperbolic(model, f0, 0.5), 1.0);
    CHECK(l2_distance(once, twice) <= 1e-11 * l2_norm(once));
  }
}

TEST_CASE("comparison principle") {
  const VelocityModel gk = goldstein_kac(1.0, 1.0);
  const Grid grid(1, 20.0, 256);
  const SpectralField g0 = sample_initial(bump(0, 0.0, 1.0), grid, 2);
  const std::vector<double> times{0.5, 1.0, 2.0, 4.0};

  const ComparisonReport same = comparison_check(gk, g0, g0, times);
  CHECK(same.holds);
  CHECK(same.worst_violation == 0.0);

  const ComparisonReport positive = comparison_check(gk, SpectralField(grid, 2), g0, times);
  CHECK(positive.holds);
  CHECK(positive.worst_violation >= -positive.tolerance);

  InitialDatum shifted = bump(0, 0.0, 1.0);
  shifted.offsets = {-0.1, -0.1};
  const ComparisonReport lowered = comparison_check(gk, sample_initial(shifted, grid, 2), g0, times);
  CHECK(lowered.holds);
  CHECK(lowered.worst_violation == doctest::Approx(0.1).epsilon(1e-10));

  CHECK_THROWS_AS(comparison_check(gk, g0, SpectralField(grid, 2), times), PreconditionError);
}

TEST_CASE("snapshot csv") {
  const Grid grid(2, 4.0, 8);
  std::ostringstream out;
  write_snapshot_csv(out, SpectralField(grid, 3));
  const std::string text = out.str();
  CHECK(text.rfind("x1,x2,f1,f2,f3\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 65);
  CHECK(text.find("\n-4,-4,0,0,0\n") != std::string::npos);
}
