#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "choquard/run_config.hpp"

namespace choquard {

inline constexpr int kExitConverged = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitNotConverged = 2;

// Executes the configured mode, writing manifest.json and the mode outputs into
// config.output_dir. Progress and cache hits go to log.
int run(const RunConfig& config, std::ostream& log);

struct SelftestCase {
  std::string module;
  std::string name;
  bool passed = false;
  std::string detail;
};

// Quick example checks across all modules.
std::vector<SelftestCase> run_selftest();
std::string to_json(const std::vector<SelftestCase>& cases);

}  // namespace choquard
