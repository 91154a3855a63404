#pragma once

#include "vjump/model.hpp"

#include "json.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace vjump {

/// M(kappa) = i diag(v^i . kappa) + B for a real frequency vector kappa.
/// A Fourier mode e^{i kappa.x} of the system evolves as exp(-M(kappa) t).
Eigen::MatrixXcd symbol_matrix(const VelocityModel& model, const Eigen::VectorXd& kappa);

/// Minor-weighted mean velocity, sum_i det B(i) v^i / I1(B). Works for
/// asymmetric rates. Throws PreconditionError when |I1| <= 1e-12 ||B||^(n-1).
Eigen::VectorXd drift_velocity_minor(const VelocityModel& model);

/// Arithmetic mean of the velocities; symmetric rates only.
Eigen::VectorXd drift_velocity_symmetric(const VelocityModel& model);

/// The model seen from the frame moving with drift_velocity_minor.
VelocityModel recenter(const VelocityModel& model);

/// -(2 / I1) sum_{i<j} det B(i,j) sym(v^i (x) v^j). The model must have zero
/// drift (within 1e-10 max|v|); otherwise PreconditionError.
Eigen::MatrixXd diffusion_matrix_minor(const VelocityModel& model);

/// (2 / I1) sum over two-tree forests of mu_T1 mu_T2 w(T1) (x) w(T1), where
/// w(T) is the velocity sum over T. Symmetric, connected, zero-drift models
/// with n <= 16.
Eigen::MatrixXd diffusion_matrix_forest(const VelocityModel& model);

/// Reduced formula for velocities in +/- pairs (v^{2l} = -v^{2l-1}, plus an
/// optional trailing zero velocity) whose minors satisfy
/// det B(2l-1, j) = det B(2l, j) for j outside the pair:
/// (2 / I1) sum_l det B(2l-1, 2l) v^{2l} (x) v^{2l}, with each pair minor
/// taken as the weight of the forests separating the pair.
Eigen::MatrixXd diffusion_matrix_paired(const VelocityModel& model);

/// The eigenvalue of -M(kappa) continuously connected to 0 at kappa = 0,
/// followed along the segment s kappa, s in [0, 1], with step halving.
/// Throws NumericalGuardError when the branch cannot be separated from the
/// rest of the spectrum.
std::complex<double> lambda_branch(const VelocityModel& model, const Eigen::VectorXd& kappa);

struct HessianEstimate {
  Eigen::VectorXd drift;      // -grad_k lambda(0) in the imaginary-frequency variable
  Eigen::MatrixXd diffusion;  // Hessian of lambda(k) at 0
  double step = 0.0;          // finite-difference step in kappa
};

/// Central finite differences of lambda_branch with one Richardson
/// extrapolation. Ground truth for the closed-form routes.
HessianEstimate hessian_oracle(const VelocityModel& model);

struct AbscissaRow {
  Eigen::VectorXd kappa;
  double kappa_norm = 0.0;
  double abscissa = 0.0;   // max Re of the eigenvalues of -M(kappa)
  double bound_ratio = 0.0;  // -abscissa (1 + |kappa|^2) / |kappa|^2, 0 at kappa = 0
};

struct AbscissaScan {
  std::vector<AbscissaRow> rows;
  double c0 = 0.0;            // largest c0 with abscissa <= -c0 |k|^2 / (1 + |k|^2) over the scan
  double worst_margin = 0.0;  // max abscissa over kappa != 0
  bool strictly_stable = false;
};

/// Spectral abscissa of -M(kappa) over the given frequencies. Violations are
/// reported, not thrown. Requires symmetric rates.
AbscissaScan spectral_abscissa_scan(const VelocityModel& model,
                                    const std::vector<Eigen::VectorXd>& kappas);

struct DiffusionReport {
  Eigen::VectorXd v_drift;
  Eigen::MatrixXd D_minor;
  std::optional<Eigen::MatrixXd> D_forest;  // symmetric models with n <= 16
  std::optional<Eigen::MatrixXd> D_paired;  // when the pairing hypotheses hold
  Eigen::MatrixXd D_hessian;
  Eigen::MatrixXd D_effective;  // 0.5 * D_hessian, the parabolic coefficient
  double psd_min_eig = 0.0;
  double minor_forest = 0.0;  // max-norm differences between routes
  double minor_hessian = 0.0;
  double forest_hessian = 0.0;
};

/// Runs every applicable route on the recentered model.
DiffusionReport diffusion_report(const VelocityModel& model);

nlohmann::json to_json(const DiffusionReport& report);

}  // namespace vjump
