#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cebp {

enum class Errc {
  invalid_argument,
  mu_not_supercritical,
  invalid_pmf,
  depth_overflow,
  insufficient_tail_points,
  invalid_z,
  node_budget_exceeded,
  malformed_record,
  missing_durations,
  level_too_fine,
  no_complete_crossing,
  insufficient_crossings,
  eps_range_infeasible,
  l_range_infeasible,
  non_monotone_time,
  parse_error,
};

/// Stable upper-case identifier, e.g. "NODE_BUDGET_EXCEEDED".
std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace cebp
