#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "astar/solver.hpp"

namespace astar {

/// Everything a run reads from a config file.
struct RunConfig {
  SolverConfig solver;
  std::uint64_t verify_seed = 42;
  int verify_points = 200;
  double verify_tol = 1e-10;
  std::uint64_t ricci_seed = 7;
  int ricci_fields = 20;
};

/// Parses flat `section.key = value` lines; `#` starts a comment. Unknown or
/// repeated keys and out-of-range values raise ErrorKind::config with the
/// line number. Keys that are absent keep their defaults.
RunConfig parse_config(std::string_view text,
                       const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

/// Every key with its effective value, one per line, in a fixed order.
/// Parsing the echo reproduces the configuration.
std::string echo_config(const RunConfig& cfg);

}  // namespace astar
