#pragma once

#include "vjump/model.hpp"

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace vjump {

/// Periodic box [-L, L)^d sampled with N points per axis. Mode m along an
/// axis has frequency kappa = pi m / L, m in [-N/2, N/2). The Nyquist mode
/// m = -N/2 is kept at zero so the mode set is symmetric under negation.
class Grid {
public:
  Grid(int dimension, double half_width, int points);

  int dimension() const noexcept { return d_; }
  double half_width() const noexcept { return L_; }
  int points() const noexcept { return N_; }
  double spacing() const noexcept { return 2.0 * L_ / N_; }
  double cell_volume() const;
  double box_volume() const;
  std::size_t size() const noexcept { return size_; }

  /// Signed integer frequency of FFT index j along an axis.
  int frequency(int j) const noexcept { return j < N_ / 2 ? j : j - N_; }
  bool is_nyquist(std::size_t mode) const;
  Eigen::VectorXd kappa(std::size_t mode) const;
  /// Physical coordinate of sample point `index` (row-major, last axis fastest).
  Eigen::VectorXd point(std::size_t index) const;

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  int d_;
  double L_;
  int N_;
  std::size_t size_;
};

/// Fourier-series coefficients c(kappa) = (2L)^-d \int f e^{-i kappa.x} dx of
/// an n-component (or scalar) real field, component-major.
class SpectralField {
public:
  SpectralField(Grid grid, int components);

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  std::size_t modes() const noexcept { return grid_.size(); }

  std::span<std::complex<double>> coefficients() noexcept { return coeffs_; }
  std::span<const std::complex<double>> coefficients() const noexcept { return coeffs_; }
  std::span<std::complex<double>> component(int c);
  std::span<const std::complex<double>> component(int c) const;
  std::complex<double>& at(int c, std::size_t mode) { return coeffs_[c * modes() + mode]; }
  std::complex<double> at(int c, std::size_t mode) const { return coeffs_[c * modes() + mode]; }

private:
  Grid grid_;
  int components_;
  std::vector<std::complex<double>> coeffs_;
};

/// Forward transform of physical samples laid out component-major, row-major.
SpectralField from_samples(const Grid& grid, int components, std::span<const double> samples);
/// Inverse transform; imaginary round-off is discarded.
std::vector<double> to_samples(const SpectralField& field);

struct GaussianBump {
  int component = 0;
  double amplitude = 1.0;
  Eigen::VectorXd center;
  double width = 1.0;  // standard deviation
};

/// Sum of Gaussian bumps amplitude exp(-|x - c|^2 / (2 w^2)) plus constant
/// offsets per component. Distances use the nearest periodic image.
struct InitialDatum {
  std::vector<GaussianBump> bumps;
  std::vector<double> offsets;  // empty, or one per component

  double max_width() const;
  /// \int f_i summed over components, ignoring offsets.
  double bump_mass() const;
};

SpectralField sample_initial(const InitialDatum& datum, const Grid& grid, int components);

/// f(t) per mode: exp(-(i diag(v . kappa) + B) t) f0(kappa). Exact in time.
SpectralField solve_hyperbolic(const VelocityModel& model, const SpectralField& f0, double t);

/// u(t) per mode: exp(-(kappa . D kappa) t - i (drift . kappa) t) u0(kappa).
SpectralField solve_parabolic(const Eigen::MatrixXd& D_effective, const SpectralField& u0,
                              double t, const Eigen::VectorXd& drift);

SpectralField total_density(const SpectralField& f);

/// A convex function eta used in the Lyapunov functional sum_i \int eta(f_i).
class ConvexFunction {
public:
  enum class Kind { Square, Absolute, PositivePart, Table };

  static ConvexFunction square() { return ConvexFunction(Kind::Square); }
  static ConvexFunction absolute() { return ConvexFunction(Kind::Absolute); }
  static ConvexFunction positive_part() { return ConvexFunction(Kind::PositivePart); }
  /// Piecewise-linear interpolation of sorted samples, extended linearly.
  /// Throws ValidationError unless the slopes are nondecreasing.
  static ConvexFunction table(std::vector<double> xs, std::vector<double> ys);

  double operator()(double s) const;
  Kind kind() const noexcept { return kind_; }
  std::string name() const;

private:
  explicit ConvexFunction(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// sum_i \int eta(f_i) dx by grid quadrature in physical space.
double lyapunov_functional(const SpectralField& f, const ConvexFunction& eta);

/// Plancherel norm ||f||_{L^2} over the box, all components.
double l2_norm(const SpectralField& f);
/// ||u - v||_{L^2}; throws ValidationError on grid or component mismatch.
double l2_distance(const SpectralField& u, const SpectralField& v);
/// sum_i \int |grad^k f_i|^2, computed spectrally as sum |kappa|^{2k} |c|^2.
double sobolev_seminorm_sq(const SpectralField& f, int order);

/// Cell averages over the grid's sampling cells, as a spectral multiplier.
SpectralField cell_average(const SpectralField& f);

struct ComparisonReport {
  bool holds = true;
  double tolerance = 0.0;
  double worst_violation = 0.0;  // min over grid of (g_i - f_i); <= 0 when f0 == g0 somewhere
  double worst_time = 0.0;
};

/// Evolves both data and checks g_i - f_i >= -tol at each time, with
/// tol = 1e-8 max |f0|, |g0|.
ComparisonReport comparison_check(const VelocityModel& model, const SpectralField& f0,
                                  const SpectralField& g0, const std::vector<double>& times);

/// Physical samples as CSV: x_1..x_d then one column per component.
void write_snapshot_csv(std::ostream& out, const SpectralField& field);

}  // namespace vjump
