#include "vjump/dispersion.hpp"

#include "vjump/errors.hpp"
#include "vjump/forests.hpp"
#include "vjump/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace vjump {

namespace {

using cd = std::complex<double>;

double max_abs(const Eigen::MatrixXd& A) { return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff(); }

Eigen::MatrixXd symmetric_outer(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::MatrixXd outer = a * b.transpose();
  return 0.5 * (outer + outer.transpose());
}

struct FirstMinors {
  Eigen::VectorXd minors;
  double sum = 0.0;
};

FirstMinors first_minors(const TransitionMatrix& B) {
  const int n = B.size();
  FirstMinors result{Eigen::VectorXd(n), 0.0};
  for (int i = 0; i < n; ++i) {
    result.minors(i) = principal_minor(B, IndexSet({i}, n));
    result.sum += result.minors(i);
  }
  const double scale = std::pow(max_abs(B.entries()), n - 1);
  if (!(std::abs(result.sum) > 1e-12 * scale))
    throw PreconditionError("irreducibility violated: I1(B) = sum_i det B(i) vanishes");
  return result;
}

void require_zero_drift(const Eigen::VectorXd& drift, const VelocityModel& model) {
  if (drift.norm() > 1e-10 * model.max_speed())
    throw PreconditionError("nonzero drift; recenter the model first");
}

void require_symmetric(const VelocityModel& model, const char* what) {
  if (!model.is_symmetric()) throw PreconditionError(std::string(what) + " requires symmetric rates");
}

// Eigenvalues of B ordered by modulus.
Eigen::VectorXcd spectrum_by_modulus(const Eigen::MatrixXd& B) {
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(B.cast<cd>(), false);
  Eigen::VectorXcd values = solver.eigenvalues();
  std::sort(values.data(), values.data() + values.size(),
            [](cd a, cd b) { return std::abs(a) < std::abs(b); });
  return values;
}

}  // namespace

Eigen::MatrixXcd symbol_matrix(const VelocityModel& model, const Eigen::VectorXd& kappa) {
  if (kappa.size() != model.dimension()) throw ValidationError("kappa has the wrong dimension");
  Eigen::MatrixXcd M = build_transition_matrix(model).entries().cast<cd>();
  const Eigen::VectorXd phase = model.velocities() * kappa;
  for (int i = 0; i < model.speeds(); ++i) M(i, i) += cd(0.0, phase(i));
  return M;
}

Eigen::VectorXd drift_velocity_minor(const VelocityModel& model) {
  const auto [minors, sum] = first_minors(build_transition_matrix(model));
  return model.velocities().transpose() * minors / sum;
}

Eigen::VectorXd drift_velocity_symmetric(const VelocityModel& model) {
  require_symmetric(model, "the mean-velocity drift");
  return model.velocities().colwise().mean().transpose();
}

VelocityModel recenter(const VelocityModel& model) {
  const Eigen::RowVectorXd drift = drift_velocity_minor(model).transpose();
  return model.with_velocities(model.velocities().rowwise() - drift);
}

Eigen::MatrixXd diffusion_matrix_minor(const VelocityModel& model) {
  const TransitionMatrix B = build_transition_matrix(model);
  const auto [minors, sum] = first_minors(B);
  require_zero_drift(model.velocities().transpose() * minors / sum, model);

  const int n = model.speeds();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(model.dimension(), model.dimension());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      D += principal_minor(B, IndexSet({i, j}, n)) * symmetric_outer(model.velocity(i), model.velocity(j));
  return (-2.0 / sum) * D;
}

Eigen::MatrixXd diffusion_matrix_forest(const VelocityModel& model) {
  require_symmetric(model, "the forest diffusion formula");
  if (!check_irreducible(model).connected) throw PreconditionError("irreducibility violated");
  require_zero_drift(model.velocities().colwise().mean().transpose(), model);

  const int n = model.speeds();
  double i1 = 0.0;
  for (int i = 0; i < n; ++i) i1 += forest_minor(model, IndexSet({i}, n));

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(model.dimension(), model.dimension());
  for (const Forest& forest : forest_pairs(model).members) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(model.dimension());
    for (const int v : forest.trees.front()) w += model.velocity(v);
    D += forest.weight * (w * w.transpose());
  }
  return (2.0 / i1) * D;
}

Eigen::MatrixXd diffusion_matrix_paired(const VelocityModel& model) {
  require_symmetric(model, "the paired diffusion formula");
  const int n = model.speeds();
  const int pairs = n / 2;
  const double tol = 1e-12 * model.max_speed();
  for (int l = 0; l < pairs; ++l) {
    if ((model.velocity(2 * l) + model.velocity(2 * l + 1)).norm() > tol)
      throw PreconditionError("velocities " + std::to_string(2 * l + 1) + " and " +
                              std::to_string(2 * l + 2) + " are not opposite");
  }
  if (n % 2 == 1 && model.velocity(n - 1).norm() > tol)
    throw PreconditionError("unpaired velocity " + std::to_string(n) + " must be zero");

  const TransitionMatrix B = build_transition_matrix(model);
  for (int l = 0; l < pairs; ++l) {
    for (int j = 0; j < n; ++j) {
      if (j == 2 * l || j == 2 * l + 1) continue;
      const double a = principal_minor(B, IndexSet({2 * l, j}, n));
      const double b = principal_minor(B, IndexSet({2 * l + 1, j}, n));
      if (std::abs(a - b) > 1e-10 * std::max(std::abs(a), std::abs(b)))
        throw PreconditionError("pair minor equality violated: det B(" + std::to_string(2 * l + 1) +
                                "," + std::to_string(j + 1) + ") != det B(" +
                                std::to_string(2 * l + 2) + "," + std::to_string(j + 1) + ")");
    }
  }

  const auto [minors, sum] = first_minors(B);
  const ForestFamily two_trees = forest_pairs(model);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(model.dimension(), model.dimension());
  for (int l = 0; l < pairs; ++l) {
    const Eigen::VectorXd v = model.velocity(2 * l + 1);
    D += two_trees.separating(2 * l, 2 * l + 1).weight_sum() * (v * v.transpose());
  }
  return (2.0 / sum) * D;
}

std::complex<double> lambda_branch(const VelocityModel& model, const Eigen::VectorXd& kappa) {
  const Eigen::MatrixXd B = build_transition_matrix(model).entries();
  const Eigen::VectorXcd start = spectrum_by_modulus(B);
  const double scale = std::max(max_abs(B), std::numeric_limits<double>::min());
  if (std::abs(start(1)) <= 1e-10 * scale)
    throw NumericalGuardError("eigenvalue 0 of B is not simple; no isolated slow branch");
  if (kappa.norm() == 0.0) return 0.0;

  double s = 0.0;
  double step = 0.25;
  cd lambda = 0.0;
  cd previous = 0.0;
  double previous_step = 0.0;
  while (s < 1.0) {
    step = std::min(step, 1.0 - s);
    const cd predicted = previous_step > 0.0 ? lambda + (lambda - previous) * (step / previous_step) : lambda;
    const Eigen::MatrixXcd generator = -symbol_matrix(model, (s + step) * kappa);
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(generator, false);
    const Eigen::VectorXcd& values = solver.eigenvalues();

    Eigen::Index nearest = 0;
    for (Eigen::Index k = 1; k < values.size(); ++k)
      if (std::abs(values(k) - predicted) < std::abs(values(nearest) - predicted)) nearest = k;
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < values.size(); ++k)
      if (k != nearest) gap = std::min(gap, std::abs(values(k) - values(nearest)));
    const double moved = std::abs(values(nearest) - lambda);

    if (gap > 10.0 * moved) {
      previous = lambda;
      previous_step = step;
      lambda = values(nearest);
      s += step;
      step = std::min(2.0 * step, 0.25);
    } else {
      step *= 0.5;
      if (step < 1e-8)
        throw NumericalGuardError("branch crossing near s = " + std::to_string(s) +
                                  "; reduce |kappa|");
    }
  }
  return lambda;
}

HessianEstimate hessian_oracle(const VelocityModel& model) {
  const int d = model.dimension();
  HessianEstimate result{Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Zero(d, d), 0.0};
  const double speed = model.max_speed();
  if (speed == 0.0) return result;

  const Eigen::MatrixXd B = build_transition_matrix(model).entries();
  const double gap = std::abs(spectrum_by_modulus(B)(1));
  if (gap <= 1e-10 * max_abs(B))
    throw PreconditionError("irreducibility violated: B has a repeated zero eigenvalue");
  const double h = 1e-2 * gap / speed;
  result.step = h;

  auto lambda_at = [&](const Eigen::VectorXd& kappa) { return lambda_branch(model, kappa); };
  auto unit = [d](int a) { return Eigen::VectorXd::Unit(d, a); };

  auto gradient = [&](double step) {
    Eigen::VectorXcd g(d);
    for (int a = 0; a < d; ++a)
      g(a) = (lambda_at(step * unit(a)) - lambda_at(-step * unit(a))) / (2.0 * step);
    return g;
  };
  auto hessian = [&](double step) {
    Eigen::MatrixXcd H(d, d);
    for (int a = 0; a < d; ++a) {
      H(a, a) = (lambda_at(step * unit(a)) + lambda_at(-step * unit(a))) / (step * step);
      for (int b = a + 1; b < d; ++b) {
        const Eigen::VectorXd plus = step * (unit(a) + unit(b));
        const Eigen::VectorXd minus = step * (unit(a) - unit(b));
        H(a, b) = (lambda_at(plus) - lambda_at(minus) - lambda_at(-minus) + lambda_at(-plus)) /
                  (4.0 * step * step);
        H(b, a) = H(a, b);
      }
    }
    return H;
  };

  // Richardson: error terms are O(h^2), so (4 F(h) - F(2h)) / 3 is O(h^4).
  const Eigen::VectorXcd g = (4.0 * gradient(h) - gradient(2.0 * h)) / 3.0;
  const Eigen::MatrixXcd H = (4.0 * hessian(h) - hessian(2.0 * h)) / 3.0;

  // lambda ~ -i drift.kappa - kappa.D.kappa near the origin.
  result.drift = -g.imag();
  const Eigen::MatrixXd D = -H.real();
  result.diffusion = 0.5 * (D + D.transpose());
  return result;
}

AbscissaScan spectral_abscissa_scan(const VelocityModel& model,
                                    const std::vector<Eigen::VectorXd>& kappas) {
  require_symmetric(model, "the abscissa scan");
  const Eigen::MatrixXd B = build_transition_matrix(model).entries();
  for (const auto& kappa : kappas)
    if (kappa.size() != model.dimension()) throw ValidationError("kappa has the wrong dimension");
  const std::vector<double> abscissae = kernels::abscissa_scan(B, model.velocities(), kappas);

  AbscissaScan scan;
  scan.c0 = std::numeric_limits<double>::infinity();
  scan.worst_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < kappas.size(); ++k) {
    AbscissaRow row{kappas[k], kappas[k].norm(), abscissae[k], 0.0};
    if (row.kappa_norm > 0.0) {
      const double q = row.kappa_norm * row.kappa_norm;
      row.bound_ratio = -row.abscissa * (1.0 + q) / q;
      scan.c0 = std::min(scan.c0, row.bound_ratio);
      scan.worst_margin = std::max(scan.worst_margin, row.abscissa);
    }
    scan.rows.push_back(std::move(row));
  }
  if (!std::isfinite(scan.c0)) scan.c0 = 0.0;
  scan.strictly_stable = scan.worst_margin < -1e-12 * std::max(max_abs(B), 1.0);
  return scan;
}

DiffusionReport diffusion_report(const VelocityModel& model) {
  DiffusionReport report;
  report.v_drift = drift_velocity_minor(model);
  const VelocityModel centered = recenter(model);
  report.D_minor = diffusion_matrix_minor(centered);
  if (centered.is_symmetric() && centered.speeds() <= kMaxEnumerationSpeeds &&
      check_irreducible(centered).connected)
    report.D_forest = diffusion_matrix_forest(centered);
  try {
    report.D_paired = diffusion_matrix_paired(centered);
  } catch (const PreconditionError&) {
  } catch (const NumericalGuardError&) {
  }
  report.D_hessian = hessian_oracle(centered).diffusion;
  report.D_effective = 0.5 * report.D_hessian;

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(report.D_minor, Eigen::EigenvaluesOnly);
  report.psd_min_eig = eigen.eigenvalues().minCoeff();
  report.minor_hessian = max_abs(report.D_minor - report.D_hessian);
  if (report.D_forest) {
    report.minor_forest = max_abs(report.D_minor - *report.D_forest);
    report.forest_hessian = max_abs(*report.D_forest - report.D_hessian);
  }
  return report;
}

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& A) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < A.cols(); ++j) row.push_back(A(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

nlohmann::json to_json(const DiffusionReport& report) {
  nlohmann::json out;
  out["v_drift"] = std::vector<double>(report.v_drift.data(), report.v_drift.data() + report.v_drift.size());
  out["D_minor"] = matrix_json(report.D_minor);
  out["D_forest"] = report.D_forest ? matrix_json(*report.D_forest) : nlohmann::json(nullptr);
  if (report.D_paired) out["D_paired"] = matrix_json(*report.D_paired);
  out["D_hessian"] = matrix_json(report.D_hessian);
  out["D_effective"] = matrix_json(report.D_effective);
  out["psd_min_eig"] = report.psd_min_eig;
  nlohmann::json discrepancies{{"minor_hessian", report.minor_hessian}};
  if (report.D_forest) {
    discrepancies["minor_forest"] = report.minor_forest;
    discrepancies["forest_hessian"] = report.forest_hessian;
  }
  out["discrepancies"] = std::move(discrepancies);
  return out;
}

}  // namespace vjump
