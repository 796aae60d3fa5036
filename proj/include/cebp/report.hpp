#pragma once

// JSON/CSV forms of configs, reports and artifacts.

#include <iosfwd>
#include <json.hpp>
#include <string>

#include "cebp/analysis.hpp"
#include "cebp/forest.hpp"
#include "cebp/gw.hpp"
#include "cebp/simulator.hpp"
#include "cebp/tail_fit.hpp"

namespace cebp::report {

using Json = nlohmann::ordered_json;

std::string_view tool_version() noexcept;

/// {tool, version, seed, config}
Json provenance(const Json& config, std::uint64_t seed);

/// Two-space indented, trailing newline.
std::string dump(const Json& j);

Json to_json(const FamilySpec& spec);
/// Accepts {"family": name, "p"|"lambda"|"b"|"pmf": ...}. Throws INVALID_ARGUMENT.
FamilySpec family_from_json(const Json& j);

Json to_json(const SimulationConfig& config);
SimulationConfig simulation_config_from_json(const Json& j);

Json to_json(const TailFit& fit);
/// `x,p_hat,log_minus_log_p`, one row per retained grid point.
void write_tail_fit_csv(const TailFit& fit, std::ostream& out);
/// `sample_index,w_value`
void write_w_ensemble_csv(const WEnsemble& ensemble, std::ostream& out);

Json to_json(const MeanMatrix& m);
Json to_json(const GwAssumptionReport& r);
Json to_json(const DominanceCheckResult& r);
Json to_json(const HurstEstimate& e);
Json to_json(const ModulusReport& r);
Json to_json(const HolderEstimate& h);
Json to_json(const IncrementTailReport& r);
Json to_json(const RemainingTimeReport& r);
Json to_json(const ScaleInvarianceReport& r);

/// One record per line: level, index, start_time, end_time, orientation,
/// subcrossing_count, duration, first_subrecord.
void write_forest_ndjson(const CrossingForest& forest, std::ostream& out);

/// {resolution_level, hurst, mu, origin, knots, seed, config, tool, version}
Json path_sidecar(const SamplePath& path, const Json& config, std::uint64_t seed);

/// `x,y` rows for gnuplot.
void write_xy_csv(std::span<const double> x, std::span<const double> y, std::ostream& out,
                  std::string_view x_name = "x", std::string_view y_name = "y");

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace cebp::report
