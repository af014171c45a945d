#include "latcb/config.hpp"
#include "latcb/experiments.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latcb: atomistic vs Cauchy-Born consistency experiments"};
  app.set_version_flag("--version", latcb::version());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;

  const char* kinds[] = {"stability",        "dispersion",       "stress-consistency",
                         "static-converge",  "dynamic-converge", "instability-demo"};
  for (const char* kind : kinds) {
    auto* sub = app.add_subcommand(kind, std::string("run a ") + kind + " experiment");
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "RNG seed override");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const std::string kind = app.get_subcommands().front()->get_name();

  latcb::ExperimentConfig config;
  try {
    config = latcb::load_config(config_path, {seed, workers});
    if (latcb::to_string(config.kind) != kind)
      throw latcb::ConfigError("config kind '" + latcb::to_string(config.kind) + "' does not match subcommand '" +
                               kind + "'");
  } catch (const latcb::ConfigError& e) {
    std::cerr << "latcb: config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    const auto outcome = latcb::run_experiment(config, out_dir);
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    for (const auto& c : outcome.checks)
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value << " in [" << c.lo << ", " << c.hi
                << "]\n";
    for (const auto& f : outcome.files) std::cout << "wrote " << f << "\n";
    std::cerr << "latcb: " << kind << " finished in " << took.count() << " s\n";
    return outcome.exit_code();
  } catch (const latcb::ConfigError& e) {
    std::cerr << "latcb: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "latcb: runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
