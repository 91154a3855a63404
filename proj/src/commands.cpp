#include "vjump/commands.hpp"

#include "vjump/decay.hpp"
#include "vjump/dispersion.hpp"
#include "vjump/errors.hpp"
#include "vjump/forests.hpp"
#include "vjump/particles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace vjump {

namespace {

using nlohmann::json;

std::ofstream open_output(const CommandOptions& options, const std::string& name) {
  std::filesystem::create_directories(options.out_dir);
  const auto path = options.out_dir / name;
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void write_json(const CommandOptions& options, const std::string& name, const json& value) {
  open_output(options, name) << value.dump(2) << '\n';
}

std::string time_label(double t) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6g", t);
  return buffer;
}

const InitialDatum& require_initial(const RunConfig& config) {
  if (config.initial.bumps.empty() && config.initial.offsets.empty())
    throw ValidationError("missing field", "initial");
  return config.initial;
}

// Unit directions for the abscissa scan: the axes, then one generic
// direction whose projections of the velocities are all distinct.
// Axes, a generic direction, and one direction on which all velocities project equally (if any).
std::vector<Eigen::VectorXd> scan_directions(const VelocityModel& model) {
  const int d = model.dimension();
  std::vector<Eigen::VectorXd> directions;
  for (int a = 0; a < d; ++a) directions.push_back(Eigen::VectorXd::Unit(d, a));
  if (d > 1) {
    Eigen::VectorXd generic(d);
    for (int a = 0; a < d; ++a) generic(a) = std::sqrt(2.0 + a) - 0.3 * a;
    directions.push_back(generic.normalized());
  }
  const Eigen::MatrixXd differences = model.velocities().rowwise() - model.velocities().row(0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(differences, Eigen::ComputeFullV);
  const Eigen::VectorXd sigma = svd.singularValues();
  const double floor = 1e-12 * std::max(model.max_speed(), 1.0);
  const int rank = static_cast<int>((sigma.array() > floor).count());
  if (rank < d) directions.push_back(svd.matrixV().col(d - 1));
  return directions;
}

}  // namespace

json run_analyze(const RunConfig& config, const CommandOptions& options) {
  const VelocityModel& model = config.model;
  const Connectivity connectivity = check_irreducible(model);
  if (!connectivity.connected) throw PreconditionError("irreducibility violated");

  json out = to_json(diffusion_report(model));
  out["model"] = {{"n", model.speeds()}, {"d", model.dimension()}, {"symmetric", model.is_symmetric()}};

  const SpanCheck span = check_span_condition(model);
  if (model.is_symmetric()) {
    out["sk_condition"] = {{"holds", check_sk_condition(model)},
                           {"irreducible", connectivity.connected},
                           {"span", span.spans},
                           {"rank", span.rank}};
  } else {
    out["sk_condition"] = nullptr;
  }

  const TransitionMatrix B = build_transition_matrix(model);
  const int n = model.speeds();
  const double first = principal_minor(B, IndexSet({0}, n));
  double deviation = 0.0;
  for (int i = 1; i < n; ++i)
    deviation = std::max(deviation, std::abs(principal_minor(B, IndexSet({i}, n)) - first));
  const double relative = first != 0.0 ? deviation / std::abs(first) : deviation;
  out["minor_equality"] = {{"max_relative_deviation", relative}, {"holds", relative <= 1e-10}};

  if (options.dump_forests) {
    if (!model.is_symmetric()) throw PreconditionError("forest dump requires symmetric rates");
    out["forests"] = {{"spanning_trees", to_json(enumerate_forests(model, IndexSet({0}, n)))},
                      {"two_tree", to_json(forest_pairs(model))}};
  }
  write_json(options, "report.json", out);
  return out;
}

json run_spectrum(const RunConfig& config, const CommandOptions& options) {
  const VelocityModel& model = config.model;
  if (options.samples < 2) throw ValidationError("samples must be at least 2", "samples");
  const double speed = model.max_speed();
  if (!(speed > 0.0)) throw PreconditionError("all velocities vanish");
  const double kappa_max = options.kappa_max > 0.0 ? options.kappa_max : 1e3 * model.max_rate() / speed;
  if (!(kappa_max > 0.0)) throw PreconditionError("no rate scale; pass --kappa-max");

  const std::vector<Eigen::VectorXd> directions = scan_directions(model);
  std::vector<Eigen::VectorXd> kappas{Eigen::VectorXd::Zero(model.dimension())};
  std::vector<int> direction_of{0};
  for (std::size_t k = 0; k < directions.size(); ++k) {
    for (int s = 0; s < options.samples; ++s) {
      const double r = kappa_max * std::pow(1e-4, 1.0 - static_cast<double>(s) / (options.samples - 1));
      kappas.push_back(r * directions[k]);
      direction_of.push_back(static_cast<int>(k) + 1);
    }
  }
  const AbscissaScan scan = spectral_abscissa_scan(model, kappas);

  auto csv = open_output(options, "spectrum.csv");
  csv << "kappa_norm,direction,abscissa,bound_ratio\n";
  for (std::size_t k = 0; k < scan.rows.size(); ++k) {
    const auto& row = scan.rows[k];
    csv << format_double(row.kappa_norm) << ',' << direction_of[k] << ',' << format_double(row.abscissa)
        << ',' << format_double(row.bound_ratio) << '\n';
  }
  const Eigen::MatrixXd B = build_transition_matrix(model).entries();
  json plateau = json::array();
  for (std::size_t k = 0; k < directions.size(); ++k)
    plateau.push_back(scan.rows[(k + 1) * options.samples].abscissa);
  const json summary{{"c0", scan.c0},
                     {"worst_margin", scan.worst_margin},
                     {"strictly_stable", scan.strictly_stable},
                     {"kappa_max", kappa_max},
                     {"plateau", plateau},
                     {"min_diagonal", B.diagonal().minCoeff()}};
  csv << "# worst_margin=" << format_double(scan.worst_margin) << " c0=" << format_double(scan.c0)
      << " strictly_stable=" << (scan.strictly_stable ? "true" : "false") << '\n';
  return summary;
}

json run_decay(const RunConfig& config, const CommandOptions& options) {
  if (!config.decay) throw ValidationError("missing field", "decay");
  const Grid grid = config.make_grid();
  const std::vector<double> times =
      geometric_times(config.decay->t_min, config.decay->t_max, config.decay->per_decade);
  const DecayStudy study = decay_study(config.model, grid, require_initial(config), times);

  auto csv = open_output(options, "decay.csv");
  csv << "t,u_norm,upar_norm,diff_norm\n";
  for (const auto& row : study.rows)
    csv << format_double(row.t) << ',' << format_double(row.u_norm) << ',' << format_double(row.upar_norm)
        << ',' << format_double(row.diff_norm) << '\n';

  auto fit_json = [](const SlopeFit& fit) {
    return json{{"slope", fit.slope}, {"intercept", fit.intercept},
                {"standard_error", fit.standard_error}, {"points", fit.points}};
  };
  const json summary{{"dimension", study.dimension},
                     {"u_fit", fit_json(study.u_fit)},
                     {"upar_fit", fit_json(study.upar_fit)},
                     {"diff_fit", fit_json(study.diff_fit)},
                     {"expected_u", study.expected_u},
                     {"expected_diff", study.expected_diff},
                     {"u_pass", study.u_pass},
                     {"diff_pass", study.diff_pass},
                     {"safe_time", study.safe_time},
                     {"warnings", study.warnings}};
  write_json(options, "decay.json", summary);
  return summary;
}

json run_simulate(const RunConfig& config, const CommandOptions& options) {
  const VelocityModel& model = config.model;
  const Grid grid = config.make_grid();
  if (config.times.empty()) throw ValidationError("missing field", "times");
  const SpectralField f0 = sample_initial(require_initial(config), grid, model.speeds());

  const std::vector<ConvexFunction> etas{ConvexFunction::square(), ConvexFunction::absolute(),
                                         ConvexFunction::positive_part()};
  std::vector<double> trace_times = config.times;
  if (trace_times.front() > 0.0) trace_times.insert(trace_times.begin(), 0.0);

  auto lyapunov = open_output(options, "lyapunov.csv");
  lyapunov << 't';
  for (const auto& eta : etas) lyapunov << ',' << eta.name();
  lyapunov << '\n';

  std::vector<double> previous(etas.size(), INFINITY);
  std::vector<bool> monotone(etas.size(), true);
  json snapshots = json::array();
  for (const double t : trace_times) {
    const SpectralField f = solve_hyperbolic(model, f0, t);
    lyapunov << format_double(t);
    for (std::size_t e = 0; e < etas.size(); ++e) {
      const double value = lyapunov_functional(f, etas[e]);
      if (value > previous[e] + 1e-8 * std::max(std::abs(previous[e]), 1e-300)) monotone[e] = false;
      previous[e] = value;
      lyapunov << ',' << format_double(value);
    }
    lyapunov << '\n';
    if (std::find(config.times.begin(), config.times.end(), t) != config.times.end()) {
      const std::string name = "snapshots_" + time_label(t) + ".csv";
      auto out = open_output(options, name);
      write_snapshot_csv(out, f);
      snapshots.push_back(name);
    }
  }

  json summary{{"snapshots", snapshots}, {"monotone", json::object()}};
  for (std::size_t e = 0; e < etas.size(); ++e) summary["monotone"][etas[e].name()] = static_cast<bool>(monotone[e]);

  if (options.particles) {
    if (!config.particles) throw ValidationError("missing field", "particles");
    const ParticleConfig& pc = *config.particles;
    const double dt = pc.dt > 0.0 ? pc.dt : default_time_step(model);
    ParticleEnsemble ensemble =
        sample_ensemble(model, config.initial, pc.count, dt, pc.seed, grid.half_width());
    auto csv = open_output(options, "particles.csv");
    csv << "t,count,l1_distance\n";
    json distances = json::array();
    for (const double t : config.times) {
      advance_to(model, ensemble, t);
      const SpectralField u = cell_average(total_density(solve_hyperbolic(model, f0, ensemble.time)));
      const double mass = u.at(0, 0).real() * grid.box_volume();
      if (!(mass > 0.0)) throw PreconditionError("PDE density has no positive mass");
      SpectralField density = u;
      for (auto& c : density.coefficients()) c /= mass;
      const double l1 = l1_distance(density_histogram(ensemble, grid), density);
      csv << format_double(ensemble.time) << ',' << ensemble.count() << ',' << format_double(l1) << '\n';
      distances.push_back(l1);
    }
    summary["particles"] = {{"count", pc.count}, {"dt", dt}, {"l1_distance", distances}};
  }
  write_json(options, "simulate.json", summary);
  return summary;
}

int exit_code_for(const std::exception& error) noexcept {
  if (dynamic_cast<const ValidationError*>(&error)) return 2;
  if (dynamic_cast<const nlohmann::json::exception*>(&error)) return 2;
  if (dynamic_cast<const PreconditionError*>(&error)) return 3;
  if (dynamic_cast<const NumericalGuardError*>(&error)) return 4;
  return 1;
}

json error_object(const std::exception& error) {
  json body{{"message", error.what()}};
  if (const auto* e = dynamic_cast<const Error*>(&error)) {
    body["kind"] = e->kind();
  } else {
    body["kind"] = exit_code_for(error) == 2 ? "validation" : "error";
  }
  if (const auto* v = dynamic_cast<const ValidationError*>(&error); v && !v->path().empty())
    body["path"] = v->path();
  body["exit_code"] = exit_code_for(error);
  return json{{"error", body}};
}

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

}  // namespace vjump
