#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <iostream>
#include <string>

#include "commands.hpp"
#include "config.hpp"

namespace {

std::optional<int> workers_from_env() {
  const char* v = std::getenv("GSBOUND_WORKERS");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 0) {
    std::cerr << "gsbound: ignoring GSBOUND_WORKERS='" << v << "'\n";
    return std::nullopt;
  }
  return static_cast<int>(n);
}

int fail(int code, const char* kind, const std::exception& e) {
  std::cerr << "gsbound: " << kind << ": " << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace gsbound;
  using namespace gsbound::cli;

  CLI::App app{"Normal-approximation error bounds for group sequential MLEs"};
  std::string config_path;
  Overrides ov;
  app.add_option("--config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", ov.seed, "base seed (overrides mc.seed)");
  app.add_option("--reps", ov.reps, "Monte Carlo replications (overrides mc.replications)");
  app.add_option("--out", ov.out_dir, "output directory (overrides output.dir)");
  app.add_option("--mode", ov.mode, "bound, simulate, sweep, verify or kolmogorov (overrides mode)");
  app.footer("Environment: GSBOUND_WORKERS sets the worker thread hint (0 = all cores).\n"
             "Exit status: 0 ok, 1 check failed, 2 config error, 3 numerical failure, 4 Monte Carlo threshold.");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  ov.workers = workers_from_env();

  try {
    const auto cfg = load_config(config_path, ov);
    return run(cfg, std::cout);
  } catch (const McThresholdError& e) {
    return fail(kMcThreshold, "Monte Carlo threshold", e);
  } catch (const NumericalError& e) {
    return fail(kNumericalError, "numerical failure", e);
  } catch (const ConfigError& e) {
    return fail(kConfigError, "config error", e);
  } catch (const Error& e) {
    return fail(kConfigError, "invalid input", e);
  } catch (const YAML::Exception& e) {
    return fail(kConfigError, "config error", e);
  } catch (const std::exception& e) {
    return fail(kCheckFailed, "error", e);
  }
}
