#pragma once

#include "vjump/model.hpp"
#include "vjump/spectral.hpp"

#include <span>
#include <string>
#include <vector>

namespace vjump {

/// Ordinary least squares of log(y) against log(x).
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double standard_error = 0.0;
  int points = 0;
};
SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// n geometrically spaced times per decade from t_min up to t_max (both included).
std::vector<double> geometric_times(double t_min, double t_max, int per_decade);

struct DecayRow {
  double t = 0.0;
  double u_norm = 0.0;     // ||u||_{L^2}, u = sum_i f_i of the hyperbolic solution
  double upar_norm = 0.0;  // ||u_par||_{L^2}
  double diff_norm = 0.0;  // ||u - u_par||_{L^2}
};

struct DecayOptions {
  /// The parabolic multiplier is exp(-scale * (kappa . D kappa) t) with D the
  /// Hessian of the slow branch. 0.5 is the consistent choice; 1.0 is kept as
  /// a negative control.
  double parabolic_scale = 0.5;
  double tolerance = 0.1;       // on both fitted exponents
  double diff_tolerance = 0.0;  // overrides `tolerance` for the difference when > 0
  /// Fit window [window_start, t_max]; 0 means the final decade.
  double window_start = 0.0;
};

struct DecayStudy {
  int dimension = 1;
  std::vector<DecayRow> rows;
  SlopeFit u_fit;
  SlopeFit upar_fit;
  SlopeFit diff_fit;
  double expected_u = 0.0;     // -d/4
  double expected_diff = 0.0;  // -d/4 - 1/2
  bool u_pass = false;
  bool diff_pass = false;
  double safe_time = 0.0;  // latest time free of wrap-around per the domain guard
  std::vector<std::string> warnings;
};

/// Latest time for which the box still contains the solution: the diffusive
/// part |v_drift| t + 6 (w + sqrt(2 ||D_eff|| t)) must fit in L, and the
/// ballistic remnant reaching the boundary must be damped below 1e-10.
double wraparound_safe_time(const VelocityModel& model, const Grid& grid,
                            const InitialDatum& datum, const Eigen::MatrixXd& D_effective);

/// Evolves u and u_par from the same datum and fits log-log slopes.
/// Requires the Shizuta-Kawashima condition and positive definite D
/// (PreconditionError otherwise). Rows past the wrap-around limit are dropped
/// with a warning; NumericalGuardError when none remain.
DecayStudy decay_study(const VelocityModel& model, const Grid& grid, const InitialDatum& datum,
                       const std::vector<double>& times, const DecayOptions& options = {});

}  // namespace vjump
