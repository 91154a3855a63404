#include "vjump/model.hpp"

#include "vjump/errors.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace vjump {

VelocityModel::VelocityModel(Eigen::MatrixXd velocities, Eigen::MatrixXd rates)
    : velocities_(std::move(velocities)), rates_(std::move(rates)) {
  const auto n = velocities_.rows();
  if (n < 2) throw ValidationError("at least two velocities are required", "model.velocities");
  if (n > kMaxSpeeds)
    throw ValidationError("at most " + std::to_string(kMaxSpeeds) + " velocities are supported",
                          "model.velocities");
  if (velocities_.cols() < 1) throw ValidationError("dimension must be >= 1", "model.d");
  if (!velocities_.allFinite()) throw ValidationError("non-finite velocity", "model.velocities");
  if (rates_.rows() != n || rates_.cols() != n)
    throw ValidationError("rate matrix must be n x n", "model.rates");

  for (Eigen::Index i = 0; i < n; ++i) {
    if (rates_(i, i) != 0.0) throw ValidationError("diagonal rates must be zero", "model.rates");
    for (Eigen::Index j = 0; j < n; ++j) {
      const double mu = rates_(i, j);
      if (!std::isfinite(mu) || mu < 0.0)
        throw ValidationError("rate mu(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                  ") must be finite and nonnegative",
                              "model.rates");
    }
  }
  symmetric_ = rates_ == rates_.transpose();
}

double VelocityModel::max_speed() const {
  return velocities_.rowwise().norm().maxCoeff();
}

VelocityModel VelocityModel::with_velocities(Eigen::MatrixXd velocities) const {
  if (velocities.rows() != velocities_.rows())
    throw ValidationError("velocity count must not change", "model.velocities");
  return VelocityModel(std::move(velocities), rates_);
}

TransitionMatrix build_transition_matrix(const VelocityModel& model) {
  const int n = model.speeds();
  Eigen::MatrixXd B = -model.rates().transpose();
  for (int i = 0; i < n; ++i) B(i, i) = model.rates().row(i).sum();
  return TransitionMatrix(std::move(B));
}

namespace {

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

Connectivity check_irreducible(const VelocityModel& model) {
  const int n = model.speeds();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (model.rate(i, j) > 0.0 || model.rate(j, i) > 0.0)
        parent[find_root(parent, i)] = find_root(parent, j);

  Connectivity result;
  result.component.assign(n, -1);
  std::vector<int> label(n, -1);
  for (int i = 0; i < n; ++i) {
    const int root = find_root(parent, i);
    if (label[root] < 0) label[root] = result.component_count++;
    result.component[i] = label[root];
  }
  result.connected = result.component_count == 1;
  return result;
}

SpanCheck check_span_condition(const VelocityModel& model) {
  const int n = model.speeds();
  const int d = model.dimension();
  Eigen::MatrixXd differences(n * (n - 1) / 2, d);
  int row = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      differences.row(row++) = model.velocities().row(i) - model.velocities().row(j);

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(differences);
  const Eigen::VectorXd& sigma = svd.singularValues();
  SpanCheck result;
  if (sigma.size() == 0 || sigma(0) == 0.0) return result;
  const double cutoff = 1e-10 * sigma(0);
  for (Eigen::Index k = 0; k < sigma.size(); ++k)
    if (sigma(k) > cutoff) ++result.rank;
  result.spans = result.rank == d;
  return result;
}

bool check_sk_condition(const VelocityModel& model) {
  if (!model.is_symmetric())
    throw PreconditionError("the Shizuta-Kawashima check requires symmetric rates");
  return check_irreducible(model).connected && check_span_condition(model).spans;
}

}  // namespace vjump
