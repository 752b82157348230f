#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace astar {

enum class ErrorKind {
  invalid_jet,
  axis_singularity,
  degenerate_metric,
  causal_limit,
  gauge_degeneracy,
  causality_violation,
  eos_range,
  numeric,
  divergence,
  corotation_breakdown,
  hypothesis_violation,
  config,
};

std::string_view to_string(ErrorKind kind);

/// Grid location attached to errors raised inside field sweeps.
struct Location {
  double w = 0.0;
  double z = 0.0;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<Location> where = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  const std::optional<Location>& where() const noexcept { return where_; }
  /// The message without the kind prefix that what() carries.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
  std::optional<Location> where_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message,
                       std::optional<Location> where = std::nullopt);

}  // namespace astar
