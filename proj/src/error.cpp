#include "cebp/error.hpp"

namespace cebp {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "INVALID_ARGUMENT";
    case Errc::mu_not_supercritical: return "MU_NOT_SUPERCRITICAL";
    case Errc::invalid_pmf: return "INVALID_PMF";
    case Errc::depth_overflow: return "DEPTH_OVERFLOW";
    case Errc::insufficient_tail_points: return "INSUFFICIENT_TAIL_POINTS";
    case Errc::invalid_z: return "INVALID_Z";
    case Errc::node_budget_exceeded: return "NODE_BUDGET_EXCEEDED";
    case Errc::malformed_record: return "MALFORMED_RECORD";
    case Errc::missing_durations: return "MISSING_DURATIONS";
    case Errc::level_too_fine: return "LEVEL_TOO_FINE";
    case Errc::no_complete_crossing: return "NO_COMPLETE_CROSSING";
    case Errc::insufficient_crossings: return "INSUFFICIENT_CROSSINGS";
    case Errc::eps_range_infeasible: return "EPS_RANGE_INFEASIBLE";
    case Errc::l_range_infeasible: return "L_RANGE_INFEASIBLE";
    case Errc::non_monotone_time: return "NON_MONOTONE_TIME";
    case Errc::parse_error: return "PARSE_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace cebp
