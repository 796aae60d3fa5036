#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cebp {

enum class PathOrigin { simulated, ingested };

/// Piecewise-linear path through (times[i], values[i]).
struct SamplePath {
  std::vector<double> times;
  std::vector<double> values;
  /// Spatial step is 2^resolution_level.
  int resolution_level = 0;
  std::optional<double> hurst;
  std::optional<double> mu;
  PathOrigin origin = PathOrigin::simulated;

  std::size_t size() const noexcept { return times.size(); }
  double start_time() const { return times.front(); }
  double end_time() const { return times.back(); }
  double span() const { return times.back() - times.front(); }
  /// Linear interpolation; clamps outside the time span.
  double value_at(double t) const;

  bool operator==(const SamplePath&) const = default;
};

/// Times divided by mu^n and values multiplied by 2^-n; needs path.mu.
SamplePath rescale_path(const SamplePath& path, int n);

/// Times mapped affinely onto [0, 1]; values unchanged.
SamplePath normalize_time(const SamplePath& path);

/// The path on [t0, t1] with interpolated end knots.
SamplePath restrict_path(const SamplePath& path, double t0, double t1);

std::vector<std::pair<double, double>> resample_uniform(const SamplePath& path, std::size_t n_points);

/// CSV `time,value`, shortest round-trip number formatting.
void write_path_csv(const SamplePath& path, std::ostream& out);
std::string path_csv(const SamplePath& path);

struct CsvColumns {
  std::size_t time = 0;
  std::size_t value = 1;
  /// Shift values so the first sample is 0 (the lattice anchor).
  bool anchor_at_zero = true;
};

/// Reads a `time,value` CSV (header optional, '#' comments skipped).
/// Errors: PARSE_ERROR and NON_MONOTONE_TIME, both with line numbers.
SamplePath ingest_csv(std::istream& in, const CsvColumns& columns = {});
SamplePath ingest_csv_file(const std::string& filename, const CsvColumns& columns = {});

}  // namespace cebp
