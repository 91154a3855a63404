#pragma once

#include <Eigen/Dense>

#include <vector>

namespace vjump {

inline constexpr int kMaxSpeeds = 64;

/// A velocity-jump system: n velocities in R^d and the rates mu(i,j) of
/// switching from velocity i to velocity j. Immutable after construction.
class VelocityModel {
public:
  /// `velocities` is n x d (row i is v^i); `rates` is n x n with a zero diagonal.
  /// Throws ValidationError on shape mismatch, n < 2, n > 64, negative or
  /// non-finite rates, or a nonzero diagonal.
  VelocityModel(Eigen::MatrixXd velocities, Eigen::MatrixXd rates);

  int dimension() const noexcept { return static_cast<int>(velocities_.cols()); }
  int speeds() const noexcept { return static_cast<int>(velocities_.rows()); }

  const Eigen::MatrixXd& velocities() const noexcept { return velocities_; }
  const Eigen::MatrixXd& rates() const noexcept { return rates_; }
  Eigen::VectorXd velocity(int i) const { return velocities_.row(i).transpose(); }
  double rate(int i, int j) const { return rates_(i, j); }

  /// Bitwise symmetry of the rate matrix.
  bool is_symmetric() const noexcept { return symmetric_; }

  /// Largest Euclidean norm among the velocities.
  double max_speed() const;
  /// Largest switching rate.
  double max_rate() const { return rates_.maxCoeff(); }

  /// Same rates, velocities replaced.
  VelocityModel with_velocities(Eigen::MatrixXd velocities) const;

private:
  Eigen::MatrixXd velocities_;
  Eigen::MatrixXd rates_;
  bool symmetric_ = false;
};

/// The transition matrix: B(i,j) = -mu(j,i) off the diagonal and
/// B(i,i) = sum_{j != i} mu(i,j). Every column sums to zero; it is the
/// weighted graph Laplacian of the rate graph when the rates are symmetric.
class TransitionMatrix {
public:
  explicit TransitionMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {}

  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  int size() const noexcept { return static_cast<int>(entries_.rows()); }
  double operator()(int i, int j) const { return entries_(i, j); }

private:
  Eigen::MatrixXd entries_;
};

TransitionMatrix build_transition_matrix(const VelocityModel& model);

struct Connectivity {
  bool connected = false;
  std::vector<int> component;  // component id per speed, ids assigned in order of first vertex
  int component_count = 0;
};

/// Connectivity of the undirected graph with an arc {i,j} whenever
/// mu(i,j) > 0 or mu(j,i) > 0. Zero rates are absent arcs.
Connectivity check_irreducible(const VelocityModel& model);

struct SpanCheck {
  bool spans = false;
  int rank = 0;
};

/// Whether the pairwise differences v^i - v^j span R^d. The rank uses an SVD
/// with cutoff 1e-10 times the largest singular value.
SpanCheck check_span_condition(const VelocityModel& model);

/// Irreducibility together with the span condition; sufficient for the
/// Shizuta-Kawashima dissipativity condition. Requires symmetric rates.
bool check_sk_condition(const VelocityModel& model);

}  // namespace vjump
