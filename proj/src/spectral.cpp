#include "vjump/spectral.hpp"

#include "vjump/errors.hpp"
#include "vjump/kernels.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>

namespace vjump {

namespace {

using cd = std::complex<double>;

std::mutex planner_mutex;

// In-place unnormalized DFT over the grid, sign -1 (forward) or +1 (backward).
void transform(const Grid& grid, std::vector<cd>& data, int sign) {
  std::vector<int> dims(grid.dimension(), grid.points());
  auto* buffer = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    const std::lock_guard lock(planner_mutex);
    plan = fftw_plan_dft(grid.dimension(), dims.data(), buffer, buffer,
                         sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  const std::lock_guard lock(planner_mutex);
  fftw_destroy_plan(plan);
}

// (-1)^(sum of signed frequencies) of a mode; samples start at -L, not 0.
double alternating_sign(const Grid& grid, std::size_t mode) {
  int parity = 0;
  for (int a = 0; a < grid.dimension(); ++a) {
    parity += static_cast<int>(mode % grid.points());
    mode /= grid.points();
  }
  return parity % 2 == 0 ? 1.0 : -1.0;
}

void require_same_shape(const SpectralField& u, const SpectralField& v) {
  if (!(u.grid() == v.grid())) throw ValidationError("fields live on different grids");
  if (u.components() != v.components()) throw ValidationError("fields differ in component count");
}

double periodic_offset(double x, double c, double L) {
  const double period = 2.0 * L;
  double dx = x - c;
  dx -= period * std::round(dx / period);
  return dx;
}

std::string format_value(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

}  // namespace

Grid::Grid(int dimension, double half_width, int points) : d_(dimension), L_(half_width), N_(points) {
  if (d_ < 1 || d_ > 3) throw ValidationError("dimension must be 1, 2 or 3", "grid");
  if (!(L_ > 0.0) || !std::isfinite(L_)) throw ValidationError("L must be positive", "grid.L");
  if (N_ < 8 || (N_ & (N_ - 1)) != 0)
    throw ValidationError("N must be a power of two, at least 8", "grid.N");
  size_ = 1;
  for (int a = 0; a < d_; ++a) size_ *= static_cast<std::size_t>(N_);
}

double Grid::cell_volume() const { return std::pow(spacing(), d_); }
double Grid::box_volume() const { return std::pow(2.0 * L_, d_); }

bool Grid::is_nyquist(std::size_t mode) const {
  for (int a = 0; a < d_; ++a) {
    if (static_cast<int>(mode % N_) == N_ / 2) return true;
    mode /= N_;
  }
  return false;
}

Eigen::VectorXd Grid::kappa(std::size_t mode) const {
  Eigen::VectorXd k(d_);
  for (int a = d_ - 1; a >= 0; --a) {
    k(a) = std::numbers::pi * frequency(static_cast<int>(mode % N_)) / L_;
    mode /= N_;
  }
  return k;
}

Eigen::VectorXd Grid::point(std::size_t index) const {
  Eigen::VectorXd x(d_);
  for (int a = d_ - 1; a >= 0; --a) {
    x(a) = -L_ + spacing() * static_cast<double>(index % N_);
    index /= N_;
  }
  return x;
}

SpectralField::SpectralField(Grid grid, int components)
    : grid_(std::move(grid)), components_(components) {
  if (components < 1) throw ValidationError("a field needs at least one component");
  coeffs_.assign(grid_.size() * components_, cd(0.0));
}

std::span<cd> SpectralField::component(int c) {
  return std::span<cd>(coeffs_).subspan(c * modes(), modes());
}

std::span<const cd> SpectralField::component(int c) const {
  return std::span<const cd>(coeffs_).subspan(c * modes(), modes());
}

SpectralField from_samples(const Grid& grid, int components, std::span<const double> samples) {
  if (samples.size() != grid.size() * components)
    throw ValidationError("sample count does not match the grid");
  SpectralField field(grid, components);
  std::vector<cd> buffer(grid.size());
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (int c = 0; c < components; ++c) {
    std::copy_n(samples.begin() + c * grid.size(), grid.size(), buffer.begin());
    transform(grid, buffer, -1);
    auto out = field.component(c);
    for (std::size_t m = 0; m < grid.size(); ++m)
      out[m] = grid.is_nyquist(m) ? cd(0.0) : alternating_sign(grid, m) * scale * buffer[m];
  }
  return field;
}

std::vector<double> to_samples(const SpectralField& field) {
  const Grid& grid = field.grid();
  std::vector<double> samples(grid.size() * field.components());
  std::vector<cd> buffer(grid.size());
  for (int c = 0; c < field.components(); ++c) {
    const auto in = field.component(c);
    for (std::size_t m = 0; m < grid.size(); ++m) buffer[m] = alternating_sign(grid, m) * in[m];
    transform(grid, buffer, +1);
    for (std::size_t j = 0; j < grid.size(); ++j) samples[c * grid.size() + j] = buffer[j].real();
  }
  return samples;
}

double InitialDatum::max_width() const {
  double w = 0.0;
  for (const auto& bump : bumps) w = std::max(w, bump.width);
  return w;
}

double InitialDatum::bump_mass() const {
  double mass = 0.0;
  for (const auto& bump : bumps)
    mass += bump.amplitude * std::pow(std::sqrt(2.0 * std::numbers::pi) * bump.width, bump.center.size());
  return mass;
}

SpectralField sample_initial(const InitialDatum& datum, const Grid& grid, int components) {
  if (!datum.offsets.empty() && static_cast<int>(datum.offsets.size()) != components)
    throw ValidationError("need one offset per component", "initial");
  std::vector<double> samples(grid.size() * components, 0.0);
  for (int c = 0; c < components && !datum.offsets.empty(); ++c)
    std::fill_n(samples.begin() + c * grid.size(), grid.size(), datum.offsets[c]);
  for (const auto& bump : datum.bumps) {
    if (bump.component < 0 || bump.component >= components)
      throw ValidationError("component out of range", "initial.component");
    if (bump.center.size() != grid.dimension())
      throw ValidationError("center has the wrong dimension", "initial.center");
    if (!(bump.width > 0.0)) throw ValidationError("width must be positive", "initial.width");
    double* out = samples.data() + bump.component * grid.size();
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const Eigen::VectorXd x = grid.point(j);
      double r2 = 0.0;
      for (int a = 0; a < grid.dimension(); ++a) {
        const double dx = periodic_offset(x(a), bump.center(a), grid.half_width());
        r2 += dx * dx;
      }
      out[j] += bump.amplitude * std::exp(-r2 / (2.0 * bump.width * bump.width));
    }
  }
  return from_samples(grid, components, samples);
}

SpectralField solve_hyperbolic(const VelocityModel& model, const SpectralField& f0, double t) {
  if (!(t >= 0.0)) throw ValidationError("time must be nonnegative");
  if (f0.components() != model.speeds()) throw ValidationError("field needs one component per speed");
  if (f0.grid().dimension() != model.dimension()) throw ValidationError("grid dimension mismatch");
  SpectralField f = f0;
  if (t == 0.0) return f;
  kernels::propagate_modes(build_transition_matrix(model).entries(), model.velocities(), f.grid(), t,
                           f.coefficients());
  return f;
}

SpectralField solve_parabolic(const Eigen::MatrixXd& D_effective, const SpectralField& u0, double t,
                              const Eigen::VectorXd& drift) {
  const Grid& grid = u0.grid();
  if (u0.components() != 1) throw ValidationError("parabolic solver takes a scalar field");
  if (!(t >= 0.0)) throw ValidationError("time must be nonnegative");
  if (D_effective.rows() != grid.dimension() || D_effective.cols() != grid.dimension() ||
      drift.size() != grid.dimension())
    throw ValidationError("diffusion matrix or drift has the wrong dimension");
  const Eigen::MatrixXd D = 0.5 * (D_effective + D_effective.transpose());
  const double norm = D.cwiseAbs().maxCoeff();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(D, Eigen::EigenvaluesOnly);
  if (eigen.eigenvalues().minCoeff() < -1e-12 * norm)
    throw PreconditionError("diffusion matrix has a negative direction");

  SpectralField u = u0;
  for (std::size_t m = 0; m < grid.size(); ++m) {
    if (grid.is_nyquist(m)) {
      u.at(0, m) = 0.0;
      continue;
    }
    const Eigen::VectorXd k = grid.kappa(m);
    const double decay = k.dot(D * k) * t;
    const double phase = drift.dot(k) * t;
    u.at(0, m) *= std::exp(-decay) * cd(std::cos(phase), -std::sin(phase));
  }
  return u;
}

SpectralField total_density(const SpectralField& f) {
  SpectralField u(f.grid(), 1);
  auto out = u.component(0);
  for (int c = 0; c < f.components(); ++c) {
    const auto in = f.component(c);
    for (std::size_t m = 0; m < f.modes(); ++m) out[m] += in[m];
  }
  return u;
}

ConvexFunction ConvexFunction::table(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() < 2 || xs.size() != ys.size())
    throw ValidationError("a convex table needs at least two matching samples");
  for (std::size_t k = 1; k < xs.size(); ++k)
    if (!(xs[k] > xs[k - 1])) throw ValidationError("table abscissae must increase strictly");
  double previous = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < xs.size(); ++k) {
    const double slope = (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1]);
    if (slope < previous - 1e-12 * std::max(1.0, std::abs(previous)))
      throw ValidationError("table is not convex");
    previous = slope;
  }
  ConvexFunction eta(Kind::Table);
  eta.xs_ = std::move(xs);
  eta.ys_ = std::move(ys);
  return eta;
}

double ConvexFunction::operator()(double s) const {
  switch (kind_) {
    case Kind::Square: return s * s;
    case Kind::Absolute: return std::abs(s);
    case Kind::PositivePart: return std::max(s, 0.0);
    case Kind::Table: break;
  }
  auto upper = std::upper_bound(xs_.begin(), xs_.end(), s);
  std::size_t k = std::clamp<std::size_t>(upper - xs_.begin(), 1, xs_.size() - 1);
  const double slope = (ys_[k] - ys_[k - 1]) / (xs_[k] - xs_[k - 1]);
  return ys_[k - 1] + slope * (s - xs_[k - 1]);
}

std::string ConvexFunction::name() const {
  switch (kind_) {
    case Kind::Square: return "square";
    case Kind::Absolute: return "absolute";
    case Kind::PositivePart: return "positive_part";
    case Kind::Table: return "table";
  }
  return "table";
}

double lyapunov_functional(const SpectralField& f, const ConvexFunction& eta) {
  double sum = 0.0;
  for (const double value : to_samples(f)) sum += eta(value);
  return sum * f.grid().cell_volume();
}

double l2_norm(const SpectralField& f) { return std::sqrt(sobolev_seminorm_sq(f, 0)); }

double l2_distance(const SpectralField& u, const SpectralField& v) {
  require_same_shape(u, v);
  const auto a = u.coefficients();
  const auto b = v.coefficients();
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += std::norm(a[k] - b[k]);
  return std::sqrt(sum * u.grid().box_volume());
}

double sobolev_seminorm_sq(const SpectralField& f, int order) {
  if (order < 0) throw ValidationError("order must be nonnegative");
  const Grid& grid = f.grid();
  double sum = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    const auto coeffs = f.component(c);
    for (std::size_t m = 0; m < grid.size(); ++m) {
      const double weight = order == 0 ? 1.0 : std::pow(grid.kappa(m).squaredNorm(), order);
      sum += weight * std::norm(coeffs[m]);
    }
  }
  return sum * grid.box_volume();
}

SpectralField cell_average(const SpectralField& f) {
  const Grid& grid = f.grid();
  SpectralField out = f;
  const double half = 0.5 * grid.spacing();
  for (std::size_t m = 0; m < grid.size(); ++m) {
    double multiplier = 1.0;
    const Eigen::VectorXd k = grid.kappa(m);
    for (int a = 0; a < grid.dimension(); ++a)
      if (k(a) != 0.0) multiplier *= std::sin(k(a) * half) / (k(a) * half);
    for (int c = 0; c < f.components(); ++c) out.at(c, m) *= multiplier;
  }
  return out;
}

ComparisonReport comparison_check(const VelocityModel& model, const SpectralField& f0,
                                  const SpectralField& g0, const std::vector<double>& times) {
  require_same_shape(f0, g0);
  const std::vector<double> f_samples = to_samples(f0);
  const std::vector<double> g_samples = to_samples(g0);
  double amplitude = 0.0;
  for (std::size_t k = 0; k < f_samples.size(); ++k)
    amplitude = std::max({amplitude, std::abs(f_samples[k]), std::abs(g_samples[k])});

  ComparisonReport report;
  report.tolerance = 1e-8 * amplitude;
  report.worst_violation = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < f_samples.size(); ++k)
    if (g_samples[k] - f_samples[k] < -report.tolerance)
      throw PreconditionError("initial data are not ordered");

  for (const double t : times) {
    const std::vector<double> f = to_samples(solve_hyperbolic(model, f0, t));
    const std::vector<double> g = to_samples(solve_hyperbolic(model, g0, t));
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (g[k] - f[k] < report.worst_violation) {
        report.worst_violation = g[k] - f[k];
        report.worst_time = t;
      }
    }
  }
  if (times.empty()) report.worst_violation = 0.0;
  report.holds = report.worst_violation >= -report.tolerance;
  return report;
}

void write_snapshot_csv(std::ostream& out, const SpectralField& field) {
  const Grid& grid = field.grid();
  for (int a = 0; a < grid.dimension(); ++a) out << (a ? "," : "") << "x" << a + 1;
  for (int c = 0; c < field.components(); ++c) out << ",f" << c + 1;
  out << '\n';
  const std::vector<double> samples = to_samples(field);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Eigen::VectorXd x = grid.point(j);
    for (int a = 0; a < grid.dimension(); ++a) out << (a ? "," : "") << format_value(x(a));
    for (int c = 0; c < field.components(); ++c)
      out << ',' << format_value(samples[c * grid.size() + j]);
    out << '\n';
  }
}

}  // namespace vjump
