#include "vjump/decay.hpp"

#include "vjump/dispersion.hpp"
#include "vjump/errors.hpp"
#include "vjump/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vjump {

SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("fit needs matching samples");
  SlopeFit fit;
  fit.points = static_cast<int>(x.size());
  if (fit.points < 2) throw ValidationError("fit needs at least two points");
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw ValidationError("log-log fit needs positive values");
    lx[k] = std::log(x[k]);
    ly[k] = std::log(y[k]);
    mx += lx[k];
    my += ly[k];
  }
  mx /= fit.points;
  my /= fit.points;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("fit needs distinct abscissae");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (fit.points > 2) {
    double ssr = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      const double r = ly[k] - fit.intercept - fit.slope * lx[k];
      ssr += r * r;
    }
    fit.standard_error = std::sqrt(ssr / (fit.points - 2) / sxx);
  }
  return fit;
}

std::vector<double> geometric_times(double t_min, double t_max, int per_decade) {
  if (!(t_min > 0.0) || !(t_max >= t_min)) throw ValidationError("need 0 < t_min <= t_max", "decay");
  if (per_decade < 1) throw ValidationError("per_decade must be positive", "decay.per_decade");
  const int intervals = std::max(1, static_cast<int>(std::lround(per_decade * std::log10(t_max / t_min))));
  if (t_max == t_min) return {t_min};
  std::vector<double> times(intervals + 1);
  for (int k = 0; k <= intervals; ++k)
    times[k] = t_min * std::pow(t_max / t_min, static_cast<double>(k) / intervals);
  times.back() = t_max;
  return times;
}

double wraparound_safe_time(const VelocityModel& model, const Grid& grid, const InitialDatum& datum,
                            const Eigen::MatrixXd& D_effective) {
  const double L = grid.half_width();
  const double w = datum.max_width();
  const Eigen::VectorXd drift = drift_velocity_minor(model);
  const double spread = D_effective.cwiseAbs().rowwise().sum().maxCoeff();

  // Diffusive bulk: |drift| t + 6 (w + sqrt(2 ||D|| t)) <= L, solved for t by bisection.
  auto bulk_fits = [&](double t) {
    return drift.norm() * t + 6.0 * (w + std::sqrt(2.0 * spread * t)) <= L;
  };
  if (!bulk_fits(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (bulk_fits(hi) && hi < 1e12) hi *= 2.0;
  for (int k = 0; k < 200 && hi - lo > 1e-12 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (bulk_fits(mid) ? lo : hi) = mid;
  }
  double safe = lo;

  // Ballistic remnant: fronts at speed max|v - drift| reach the boundary at
  // t_reach. They are harmless if by then they are damped below 1e-10 at the
  // weakest high-frequency damping rate, probed along axes and diagonals.
  const Eigen::MatrixXd relative = model.velocities().rowwise() - drift.transpose();
  const double speed = relative.rowwise().norm().maxCoeff();
  if (speed > 0.0) {
    const int d = model.dimension();
    const double kmax = 1e3 * std::max(model.max_rate(), 1e-300) / speed;
    std::vector<Eigen::VectorXd> probes;
    for (int a = 0; a < d; ++a) probes.push_back(kmax * Eigen::VectorXd::Unit(d, a));
    for (int mask = 0; mask < (1 << (d - 1)); ++mask) {
      Eigen::VectorXd e = Eigen::VectorXd::Ones(d);
      for (int a = 1; a < d; ++a)
        if (mask & (1 << (a - 1))) e(a) = -1.0;
      probes.push_back(kmax * e.normalized());
    }
    const std::vector<double> abscissae =
        kernels::abscissa_scan(build_transition_matrix(model).entries(), relative, probes);
    const double damping = -*std::max_element(abscissae.begin(), abscissae.end());
    const double t_reach = (L - 6.0 * w) / speed;
    const double t_damped = damping > 0.0 ? std::log(1e10) / damping : INFINITY;
    if (t_reach < t_damped) safe = std::min(safe, std::max(t_reach, 0.0));
  }
  return safe;
}

DecayStudy decay_study(const VelocityModel& model, const Grid& grid, const InitialDatum& datum,
                       const std::vector<double>& times, const DecayOptions& options) {
  if (grid.dimension() != model.dimension()) throw ValidationError("grid dimension mismatch");
  if (times.empty()) throw ValidationError("no times requested", "decay");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw ValidationError("times must increase strictly", "decay");
  if (!check_sk_condition(model)) throw PreconditionError("Shizuta-Kawashima condition fails");

  const Eigen::VectorXd drift = drift_velocity_minor(model);
  const Eigen::MatrixXd D = diffusion_matrix_minor(recenter(model));
  const Eigen::MatrixXd D_effective = options.parabolic_scale * D;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(D, Eigen::EigenvaluesOnly);
  if (!(eigen.eigenvalues().minCoeff() > 1e-12 * D.cwiseAbs().maxCoeff()))
    throw PreconditionError("diffusion matrix is not positive definite");

  DecayStudy study;
  study.dimension = model.dimension();
  study.expected_u = -study.dimension / 4.0;
  study.expected_diff = study.expected_u - 0.5;
  study.safe_time = wraparound_safe_time(model, grid, datum, D_effective);

  std::vector<double> kept;
  for (const double t : times)
    if (t <= study.safe_time) kept.push_back(t);
  if (kept.size() < times.size()) {
    std::ostringstream message;
    message << times.size() - kept.size() << " rows past the wrap-around limit t = " << study.safe_time
            << " dropped";
    study.warnings.push_back(message.str());
  }
  if (kept.empty()) throw NumericalGuardError("every requested time is past the wrap-around limit");

  const SpectralField f0 = sample_initial(datum, grid, model.speeds());
  const SpectralField u0 = total_density(f0);
  for (const double t : kept) {
    const SpectralField u = total_density(solve_hyperbolic(model, f0, t));
    const SpectralField upar = solve_parabolic(D_effective, u0, t, drift);
    study.rows.push_back({t, l2_norm(u), l2_norm(upar), l2_distance(u, upar)});
  }

  const double start = options.window_start > 0.0 ? options.window_start : kept.back() / 10.0;
  std::vector<double> ts, us, ups, diffs;
  for (const auto& row : study.rows) {
    if (row.t < start * (1.0 - 1e-12)) continue;
    ts.push_back(row.t);
    us.push_back(row.u_norm);
    ups.push_back(row.upar_norm);
    diffs.push_back(row.diff_norm);
  }
  if (ts.size() < 2) {
    study.warnings.push_back("fewer than two rows in the fit window; no slopes fitted");
    return study;
  }
  study.u_fit = fit_loglog(ts, us);
  study.upar_fit = fit_loglog(ts, ups);
  study.diff_fit = fit_loglog(ts, diffs);
  const double diff_tolerance = options.diff_tolerance > 0.0 ? options.diff_tolerance : options.tolerance;
  study.u_pass = std::abs(study.u_fit.slope - study.expected_u) <= options.tolerance;
  study.diff_pass = std::abs(study.diff_fit.slope - study.expected_diff) <= diff_tolerance;
  return study;
}

}  // namespace vjump
