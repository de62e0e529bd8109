#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "choquard/gn_constants.hpp"
#include "choquard/solvers.hpp"

namespace choquard {

// Malformed configuration: unknown key, unparsable value or out-of-range setting.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode {
  EstimateConstants,
  FiberReport,
  SolveLocal,
  SolveMp,
  SolveGlobal,
  AlphaSweep,
  Subadditivity,
  Selftest
};

std::string to_string(Mode m);
Mode mode_from_string(const std::string& name);

enum class SweepBranch { Local, MountainPass, Both };

struct ConstantSettings {
  std::optional<double> C_q;  // fixed values skip estimation
  std::optional<double> C_p;
  double factor = 1.0;        // thresholds are enforced with factor * C
  GridSettings grid;          // grid for the estimation; 0 entries select the default
  GNConfig gn;
};

struct SweepSettings {
  std::vector<double> alphas;  // empty: alpha* 2^{-k}, k = 0..halvings
  int halvings = 8;
  double alpha_fraction = 0.9;  // alpha* = fraction * min(alpha1, alpha2)
  SweepBranch branch = SweepBranch::Both;
  bool include_zero = true;     // append alpha = 0 to the mountain pass sweep
};

struct RunConfig {
  Mode mode = Mode::Selftest;
  ProblemParams params;
  SolveConfig solver;  // solver.grid holds the grid settings
  ConstantSettings constants;
  SweepSettings sweep;
  std::optional<double> sub_c1;  // default c / sqrt(2)
  std::optional<double> sub_c2;
  std::string fiber_field;
  std::string output_dir = "out";
  bool csv = true;
  bool json = true;
  bool field_bin = false;
  int threads = 1;
};

// Flat "dotted.key = value" document; '#' starts a comment.
RunConfig parse_run_config(std::istream& in);
RunConfig parse_run_config_file(const std::string& path);

// Effective configuration as stable-order JSON.
std::string to_json(const RunConfig& config);

// Best constants in force for a run (already multiplied by the factor).
struct ResolvedConstants {
  std::optional<double> C_q;
  std::optional<double> C_p;
};

// Hypotheses of the selected mode, each reported with the computed numbers.
std::vector<std::string> validate(const RunConfig& config, const ResolvedConstants& constants);

}  // namespace choquard
