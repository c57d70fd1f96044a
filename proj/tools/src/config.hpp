#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gsbound/bounds.hpp"
#include "gsbound/error.hpp"
#include "gsbound/kolmogorov.hpp"
#include "gsbound/model.hpp"
#include "gsbound/montecarlo.hpp"

namespace gsbound::cli {

// Malformed or incomplete config. The message starts with "file:line:col:".
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

enum class Mode { bound, simulate, sweep, verify, kolmogorov };

const char* mode_name(Mode m);

enum class BoundPath { closed, exp_family, generic };

const char* path_name(BoundPath p);

struct Overrides {
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> reps;
  std::optional<std::string> out_dir;
  // Worker hint, from the environment.
  std::optional<int> workers;
};

struct SweepSpec {
  std::vector<long> ns;
  int groups = 1;
  bool empirical = false;
};

struct KolmogorovSpec {
  std::optional<double> smooth_distance;
  std::optional<int> p;
  int m = 3;
  std::optional<double> c1;
  std::optional<double> c2;
  bool empirical = false;
  KolMode grid_mode = KolMode::grid;
};

struct RunConfig {
  std::string source;
  Mode mode = Mode::bound;
  ModelPtr model;
  std::string model_name;
  std::optional<GroupDesign> design;
  // Parameter dimension; taken from the model unless given under design.
  int dim = 0;
  Vector theta0;
  double epsilon = 0.0;
  bool epsilon_auto = false;
  std::pair<double, double> epsilon_range{0.0, 0.0};
  BoundPath path = BoundPath::generic;
  Derivatives derivatives = Derivatives::three;
  std::optional<HNorms> norms;
  // Empty when the config names no test function.
  std::vector<TestFunction> tests;
  McConfig mc;
  std::string out_dir = ".";
  std::string report_file = "report.txt";
  std::string csv_file = "sweep.csv";
  std::string replicate_file;
  SweepSpec sweep;
  KolmogorovSpec kolmogorov;

  // Norms used for bounds: explicit norms, else those of the first test.
  const HNorms& bound_norms() const;
};

// Reads and validates the YAML file at `path` for the effective mode.
RunConfig load_config(const std::string& path, const Overrides& overrides);

}  // namespace gsbound::cli
