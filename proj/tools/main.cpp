#include <iostream>

#include "CLI11.hpp"
#include "choquard/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Normalized solutions of fractional Choquard equations"};
  std::string config_path;
  std::string mode;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  app.add_option("--config", config_path, "Run configuration file")->required();
  app.add_option("--mode", mode, "Override the configured mode");
  app.add_option("--out", out, "Override the output directory");
  app.add_option("--seed", seed, "Seed for the solver and constant estimation");
  app.add_option("--threads", threads, "Concurrent solves")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    choquard::RunConfig config = choquard::parse_run_config_file(config_path);
    if (!mode.empty()) config.mode = choquard::mode_from_string(mode);
    if (!out.empty()) config.output_dir = out;
    if (seed) {
      config.solver.seed = *seed;
      config.constants.gn.seed = *seed;
    }
    if (threads) {
      config.threads = *threads;
      config.solver.threads = *threads;
      config.constants.gn.threads = *threads;
    }
    return choquard::run(config, std::cerr);
  } catch (const choquard::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return choquard::kExitConfigError;
  }
}
