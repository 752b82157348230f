#include "astar/errors.hpp"

namespace astar {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_jet: return "invalid-jet";
    case ErrorKind::axis_singularity: return "axis-singularity";
    case ErrorKind::degenerate_metric: return "degenerate-metric";
    case ErrorKind::causal_limit: return "causal-limit";
    case ErrorKind::gauge_degeneracy: return "gauge-degeneracy";
    case ErrorKind::causality_violation: return "causality-violation";
    case ErrorKind::eos_range: return "eos-range";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::corotation_breakdown: return "corotation-breakdown";
    case ErrorKind::hypothesis_violation: return "hypothesis-violation";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<Location> where)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      detail_(message),
      where_(where) {}

void fail(ErrorKind kind, const std::string& message,
          std::optional<Location> where) {
  throw Error(kind, message, where);
}

}  // namespace astar
