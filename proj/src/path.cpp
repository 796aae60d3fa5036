#include "cebp/path.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "cebp/error.hpp"
#include "cebp/kernels.hpp"

namespace cebp {

double SamplePath::value_at(double t) const {
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times.begin()) - 1;
  if (t == times[k]) return values[k];
  const double f = (t - times[k]) / (times[k + 1] - times[k]);
  return values[k] + f * (values[k + 1] - values[k]);
}

SamplePath rescale_path(const SamplePath& path, int n) {
  if (!path.mu) throw Error(Errc::invalid_argument, "rescale_path needs the path's mu");
  SamplePath out = path;
  if (n == 0) return out;
  kernels::scale(out.times, std::pow(*path.mu, -n));
  kernels::scale(out.values, std::ldexp(1.0, -n));
  out.resolution_level -= n;
  return out;
}

SamplePath normalize_time(const SamplePath& path) {
  if (path.size() < 2) throw Error(Errc::invalid_argument, "normalize_time needs at least two knots");
  SamplePath out = path;
  const double t0 = path.start_time();
  const double span = path.span();
  for (double& t : out.times) t -= t0;
  kernels::scale(out.times, 1.0 / span);
  out.times.back() = 1.0;
  return out;
}

SamplePath restrict_path(const SamplePath& path, double t0, double t1) {
  if (path.size() < 2) throw Error(Errc::invalid_argument, "restrict_path needs at least two knots");
  if (!(t0 < t1) || t0 < path.start_time() || t1 > path.end_time()) {
    throw Error(Errc::invalid_argument, "restrict_path window must lie inside the path span");
  }
  SamplePath out = path;
  out.times.clear();
  out.values.clear();
  const auto first = std::upper_bound(path.times.begin(), path.times.end(), t0);
  const auto last = std::lower_bound(first, path.times.end(), t1);
  out.times.push_back(t0);
  out.values.push_back(path.value_at(t0));
  for (auto it = first; it != last; ++it) {
    out.times.push_back(*it);
    out.values.push_back(path.values[static_cast<std::size_t>(it - path.times.begin())]);
  }
  out.times.push_back(t1);
  out.values.push_back(path.value_at(t1));
  return out;
}

std::vector<std::pair<double, double>> resample_uniform(const SamplePath& path, std::size_t n_points) {
  if (n_points < 2) throw Error(Errc::invalid_argument, "resample_uniform needs n_points >= 2");
  if (path.size() < 2) throw Error(Errc::invalid_argument, "resample_uniform needs at least two knots");
  std::vector<std::pair<double, double>> out;
  out.reserve(n_points);
  const double t0 = path.start_time();
  const double step = path.span() / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double t = i + 1 == n_points ? path.end_time() : t0 + static_cast<double>(i) * step;
    out.emplace_back(t, path.value_at(t));
  }
  return out;
}

namespace {

void append_number(std::string& s, double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, r.ptr);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(out);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

void write_path_csv(const SamplePath& path, std::ostream& out) {
  std::string s = "time,value\n";
  s.reserve(path.size() * 40);
  for (std::size_t i = 0; i < path.size(); ++i) {
    append_number(s, path.times[i]);
    s.push_back(',');
    append_number(s, path.values[i]);
    s.push_back('\n');
  }
  out << s;
}

std::string path_csv(const SamplePath& path) {
  std::ostringstream os;
  write_path_csv(path, os);
  return os.str();
}

SamplePath ingest_csv(std::istream& in, const CsvColumns& columns) {
  SamplePath p;
  p.origin = PathOrigin::ingested;
  std::string line;
  std::size_t lineno = 0;
  bool seen_data = false;
  const std::size_t need = std::max(columns.time, columns.value) + 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split(t);
    if (fields.size() < need) {
      throw Error(Errc::parse_error, "line " + std::to_string(lineno) + ": expected at least " +
                                         std::to_string(need) + " columns");
    }
    double tv = 0.0, vv = 0.0;
    const bool ok = parse_double(fields[columns.time], tv) && parse_double(fields[columns.value], vv);
    if (!ok) {
      if (!seen_data) {
        seen_data = true;  // header row
        continue;
      }
      throw Error(Errc::parse_error, "line " + std::to_string(lineno) + ": not a number");
    }
    seen_data = true;
    if (!p.times.empty() && !(tv > p.times.back())) {
      throw Error(Errc::non_monotone_time, "line " + std::to_string(lineno) + ": time " + std::string(fields[columns.time]) +
                                               " does not increase");
    }
    p.times.push_back(tv);
    p.values.push_back(vv);
  }
  if (p.times.size() < 2) throw Error(Errc::parse_error, "need at least two data rows");
  if (columns.anchor_at_zero) {
    const double v0 = p.values.front();
    for (double& v : p.values) v -= v0;
  }
  double min_step = 0.0;
  for (std::size_t i = 1; i < p.values.size(); ++i) {
    const double d = std::abs(p.values[i] - p.values[i - 1]);
    if (d > 0.0 && (min_step == 0.0 || d < min_step)) min_step = d;
  }
  p.resolution_level = min_step > 0.0 ? static_cast<int>(std::floor(std::log2(min_step))) : 0;
  return p;
}

SamplePath ingest_csv_file(const std::string& filename, const CsvColumns& columns) {
  std::ifstream in(filename);
  if (!in) throw Error(Errc::parse_error, "cannot open " + filename);
  return ingest_csv(in, columns);
}

}  // namespace cebp
