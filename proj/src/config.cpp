#include "vjump/config.hpp"

#include "vjump/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace vjump {

namespace {

using nlohmann::json;

const json& require(const json& object, const std::string& key, const std::string& path) {
  if (!object.is_object()) throw ValidationError("expected an object", path);
  const auto it = object.find(key);
  if (it == object.end()) throw ValidationError("missing field", path.empty() ? key : path + "." + key);
  return *it;
}

void reject_unknown(const json& object, std::initializer_list<const char*> known, const std::string& path) {
  if (!object.is_object()) throw ValidationError("expected an object", path);
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : object.items())
    if (!allowed.contains(key)) throw ValidationError("unknown field", path.empty() ? key : path + "." + key);
}

double number(const json& value, const std::string& path) {
  if (!value.is_number()) throw ValidationError("expected a number", path);
  const double x = value.get<double>();
  if (!std::isfinite(x)) throw ValidationError("expected a finite number", path);
  return x;
}

long long integer(const json& value, const std::string& path) {
  if (!value.is_number_integer()) throw ValidationError("expected an integer", path);
  return value.get<long long>();
}

const json& array(const json& value, const std::string& path) {
  if (!value.is_array()) throw ValidationError("expected an array", path);
  return value;
}

std::string at(const std::string& path, std::size_t k) { return path + "[" + std::to_string(k) + "]"; }

Eigen::VectorXd vector(const json& value, int d, const std::string& path) {
  array(value, path);
  if (static_cast<int>(value.size()) != d)
    throw ValidationError("expected " + std::to_string(d) + " entries", path);
  Eigen::VectorXd v(d);
  for (int a = 0; a < d; ++a) v(a) = number(value[a], at(path, a));
  return v;
}

VelocityModel parse_model(const json& node, bool& asymmetric) {
  reject_unknown(node, {"d", "velocities", "rates", "asymmetric"}, "model");
  const long long d = integer(require(node, "d", "model"), "model.d");
  if (d < 1 || d > 3) throw ValidationError("d must be 1, 2 or 3", "model.d");
  const json& velocities = array(require(node, "velocities", "model"), "model.velocities");
  const auto n = static_cast<int>(velocities.size());
  if (n < 2) throw ValidationError("need at least two velocities", "model.velocities");
  if (n > kMaxSpeeds) throw ValidationError("at most 64 velocities", "model.velocities");
  Eigen::MatrixXd V(n, d);
  for (int i = 0; i < n; ++i) V.row(i) = vector(velocities[i], static_cast<int>(d), at("model.velocities", i)).transpose();

  asymmetric = false;
  if (const auto it = node.find("asymmetric"); it != node.end()) {
    if (!it->is_boolean()) throw ValidationError("expected a boolean", "model.asymmetric");
    asymmetric = it->get<bool>();
    if (asymmetric && n != 2)
      throw ValidationError("asymmetric rates are limited to two velocities", "model.asymmetric");
  }

  Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(n, n);
  const json& arcs = array(require(node, "rates", "model"), "model.rates");
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const std::string path = at("model.rates", k);
    if (!arcs[k].is_array() || arcs[k].size() != 3) throw ValidationError("expected [i, j, mu]", path);
    const long long i = integer(arcs[k][0], path + "[0]");
    const long long j = integer(arcs[k][1], path + "[1]");
    const double mu = number(arcs[k][2], path + "[2]");
    if (i < 1 || i > n) throw ValidationError("index out of range", path + "[0]");
    if (j < 1 || j > n) throw ValidationError("index out of range", path + "[1]");
    if (asymmetric ? i == j : i >= j)
      throw ValidationError(asymmetric ? "need i != j" : "need i < j (upper triangle)", path);
    if (mu < 0.0) throw ValidationError("rate must be nonnegative", path + "[2]");
    if (seen(i - 1, j - 1)) throw ValidationError("duplicate arc", path);
    seen(i - 1, j - 1) = 1;
    rates(i - 1, j - 1) = mu;
    if (!asymmetric) rates(j - 1, i - 1) = mu;
  }
  return VelocityModel(std::move(V), std::move(rates));
}

InitialDatum parse_initial(const json& node, int n, int d) {
  InitialDatum datum;
  array(node, "initial");
  for (std::size_t k = 0; k < node.size(); ++k) {
    const std::string path = at("initial", k);
    reject_unknown(node[k], {"component", "amplitude", "center", "width"}, path);
    GaussianBump bump;
    const long long component = integer(require(node[k], "component", path), path + ".component");
    if (component < 1 || component > n) throw ValidationError("component out of range", path + ".component");
    bump.component = static_cast<int>(component - 1);
    bump.amplitude = number(require(node[k], "amplitude", path), path + ".amplitude");
    bump.center = vector(require(node[k], "center", path), d, path + ".center");
    bump.width = number(require(node[k], "width", path), path + ".width");
    if (!(bump.width > 0.0)) throw ValidationError("width must be positive", path + ".width");
    datum.bumps.push_back(std::move(bump));
  }
  return datum;
}

}  // namespace

Grid RunConfig::make_grid() const {
  if (!grid) throw ValidationError("missing field", "grid");
  return Grid(model.dimension(), grid->half_width, grid->points);
}

RunConfig parse_config(const json& document) {
  reject_unknown(document, {"model", "grid", "initial", "offsets", "times", "decay", "particles", "outputs"}, "");
  bool asymmetric = false;
  RunConfig config{parse_model(require(document, "model", ""), asymmetric), false, std::nullopt, {}, {}, std::nullopt, std::nullopt, {}};
  config.asymmetric = asymmetric;
  const int n = config.model.speeds();
  const int d = config.model.dimension();

  if (const auto it = document.find("grid"); it != document.end()) {
    reject_unknown(*it, {"L", "N"}, "grid");
    GridConfig grid;
    grid.half_width = number(require(*it, "L", "grid"), "grid.L");
    const long long points = integer(require(*it, "N", "grid"), "grid.N");
    if (points < 8 || points > (1 << 20) || (points & (points - 1)) != 0)
      throw ValidationError("N must be a power of two, at least 8", "grid.N");
    grid.points = static_cast<int>(points);
    if (!(grid.half_width > 0.0)) throw ValidationError("L must be positive", "grid.L");
    config.grid = grid;
  }
  if (const auto it = document.find("initial"); it != document.end())
    config.initial = parse_initial(*it, n, d);
  if (const auto it = document.find("offsets"); it != document.end()) {
    const Eigen::VectorXd offsets = vector(*it, n, "offsets");
    config.initial.offsets.assign(offsets.data(), offsets.data() + n);
  }
  if (const auto it = document.find("times"); it != document.end()) {
    array(*it, "times");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const double t = number((*it)[k], at("times", k));
      if (t < 0.0) throw ValidationError("time must be nonnegative", at("times", k));
      if (!config.times.empty() && !(t > config.times.back()))
        throw ValidationError("times must increase strictly", at("times", k));
      config.times.push_back(t);
    }
  }
  if (const auto it = document.find("decay"); it != document.end()) {
    reject_unknown(*it, {"t_min", "t_max", "per_decade"}, "decay");
    DecayConfig decay;
    decay.t_min = number(require(*it, "t_min", "decay"), "decay.t_min");
    decay.t_max = number(require(*it, "t_max", "decay"), "decay.t_max");
    const long long per_decade = integer(require(*it, "per_decade", "decay"), "decay.per_decade");
    if (!(decay.t_min > 0.0)) throw ValidationError("t_min must be positive", "decay.t_min");
    if (!(decay.t_max > decay.t_min)) throw ValidationError("t_max must exceed t_min", "decay.t_max");
    if (per_decade < 1 || per_decade > 1000) throw ValidationError("per_decade must be in [1, 1000]", "decay.per_decade");
    decay.per_decade = static_cast<int>(per_decade);
    config.decay = decay;
  }
  if (const auto it = document.find("particles"); it != document.end()) {
    reject_unknown(*it, {"count", "dt", "seed"}, "particles");
    ParticleConfig particles;
    const long long count = integer(require(*it, "count", "particles"), "particles.count");
    if (count < 1) throw ValidationError("count must be positive", "particles.count");
    particles.count = static_cast<std::size_t>(count);
    if (const auto dt = it->find("dt"); dt != it->end()) {
      particles.dt = number(*dt, "particles.dt");
      if (!(particles.dt > 0.0)) throw ValidationError("dt must be positive", "particles.dt");
    }
    if (const auto seed = it->find("seed"); seed != it->end()) {
      if (!seed->is_number_unsigned()) throw ValidationError("expected an unsigned integer", "particles.seed");
      particles.seed = seed->get<std::uint64_t>();
    }
    config.particles = particles;
  }
  if (const auto it = document.find("outputs"); it != document.end()) {
    if (!it->is_string()) throw ValidationError("expected a string", "outputs");
    config.outputs = it->get<std::string>();
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string(), "config");
  json document;
  try {
    document = json::parse(in);
  } catch (const json::parse_error& error) {
    throw ValidationError(error.what(), "config");
  }
  return parse_config(document);
}

}  // namespace vjump
