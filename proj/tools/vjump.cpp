#include "vjump/commands.hpp"
#include "vjump/errors.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"vjump: diffusion limits of velocity-jump systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  vjump::CommandOptions options;

  auto add_common = [&](CLI::App* command) {
    command->add_option("--config", config_path, "JSON run configuration")->required();
    command->add_option("--out", out_dir, "output directory (default: config 'outputs' or .)");
  };

  auto* analyze = app.add_subcommand("analyze", "drift, diffusion routes and structural checks");
  add_common(analyze);
  analyze->add_flag("--dump-forests", options.dump_forests, "include forest families in report.json");

  auto* spectrum = app.add_subcommand("spectrum", "spectral abscissa scan");
  add_common(spectrum);
  spectrum->add_option("--kappa-max", options.kappa_max, "largest |kappa| (default 1e3 max rate / max speed)");
  spectrum->add_option("--samples", options.samples, "frequencies per direction")->check(CLI::PositiveNumber);

  auto* decay = app.add_subcommand("decay", "hyperbolic vs parabolic decay study");
  add_common(decay);

  auto* simulate = app.add_subcommand("simulate", "snapshots and Lyapunov traces");
  add_common(simulate);
  simulate->add_flag("--particles", options.particles, "compare against a particle ensemble");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : 2;
  }

  try {
    const vjump::RunConfig config = vjump::load_config(config_path);
    if (!out_dir.empty()) {
      options.out_dir = out_dir;
    } else if (!config.outputs.empty()) {
      options.out_dir = config.outputs;
    }
    nlohmann::json result;
    if (*analyze) result = vjump::run_analyze(config, options);
    if (*spectrum) result = vjump::run_spectrum(config, options);
    if (*decay) result = vjump::run_decay(config, options);
    if (*simulate) result = vjump::run_simulate(config, options);
    std::cout << result.dump(2) << '\n';
    return 0;
  } catch (const std::exception& error) {
    std::cerr << vjump::error_object(error).dump() << '\n';
    return vjump::exit_code_for(error);
  }
}
