#include "cebp/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "cebp/error.hpp"

namespace cebp {
namespace {

// Cut an unbounded pmf (indexed by pair count j >= 1, Z = 2j) at the first
// point where the remaining tail mass drops below kPmfTruncation.
std::vector<PmfEntry> truncate_pairs(const std::vector<double>& by_pairs) {
  std::vector<double> suffix(by_pairs.size() + 1, 0.0);
  for (std::size_t i = by_pairs.size(); i-- > 0;) suffix[i] = suffix[i + 1] + by_pairs[i];
  std::vector<PmfEntry> out;
  for (std::size_t i = 0; i < by_pairs.size(); ++i) {
    out.push_back({2 * static_cast<int>(i + 1), by_pairs[i]});
    if (suffix[i + 1] < kPmfTruncation) break;
  }
  const double total = std::accumulate(out.begin(), out.end(), 0.0,
                                       [](double s, const PmfEntry& e) { return s + e.p; });
  for (auto& e : out) e.p /= total;
  return out;
}

std::vector<PmfEntry> geometric_pmf(double p) {
  // Terms until far below double resolution of the truncation point.
  std::vector<double> terms;
  double term = p;
  while (term > 1e-300 && terms.size() < 100000) {
    terms.push_back(term);
    term *= 1.0 - p;
    if (terms.size() > 10 && term < 1e-30) break;
  }
  return truncate_pairs(terms);
}

std::vector<PmfEntry> poisson_pmf(double lambda) {
  std::vector<double> terms;
  const double upper = lambda + 60.0 * std::sqrt(lambda) + 100.0;
  for (int k = 0; k <= upper; ++k) {
    terms.push_back(std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0)));
  }
  return truncate_pairs(terms);
}

}  // namespace

std::string_view family_name(Family f) noexcept {
  switch (f) {
    case Family::geometric_pairs: return "geometric-pairs";
    case Family::poisson_pairs: return "poisson-pairs";
    case Family::fixed_pairs: return "fixed-pairs";
    case Family::custom: return "custom";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::geometric_pairs, Family::poisson_pairs, Family::fixed_pairs, Family::custom}) {
    if (name == family_name(f)) return f;
  }
  throw Error(Errc::invalid_argument, "unknown offspring family '" + std::string(name) + "'");
}

OffspringDistribution OffspringDistribution::make(const FamilySpec& spec) {
  OffspringDistribution d;
  d.spec_ = spec;
  switch (spec.family) {
    case Family::geometric_pairs: {
      const double p = spec.param;
      if (!(p > 0.0 && p < 1.0)) throw Error(Errc::invalid_argument, "geometric-pairs needs 0 < p < 1");
      d.pmf_ = geometric_pmf(p);
      d.mu_ = 2.0 / p;
      d.spec_.table.clear();
      break;
    }
    case Family::poisson_pairs: {
      const double lambda = spec.param;
      if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw Error(Errc::invalid_argument, "poisson-pairs needs lambda > 0");
      }
      d.pmf_ = poisson_pmf(lambda);
      d.mu_ = 2.0 * (1.0 + lambda);
      d.spec_.table.clear();
      break;
    }
    case Family::fixed_pairs: {
      const double b = spec.param;
      if (!(b >= 1.0) || b != std::floor(b) || b > 1e6) {
        throw Error(Errc::invalid_argument, "fixed-pairs needs an integer b >= 1");
      }
      d.pmf_ = {{2 * static_cast<int>(b), 1.0}};
      d.mu_ = 2.0 * b;
      d.spec_.table.clear();
      break;
    }
    case Family::custom: {
      if (spec.table.empty()) throw Error(Errc::invalid_pmf, "empty pmf");
      std::vector<PmfEntry> pmf;
      double total = 0.0;
      for (const auto& e : spec.table) {
        if (e.z < 2 || e.z % 2 != 0) {
          throw Error(Errc::invalid_pmf, "support entry " + std::to_string(e.z) + " is not an even integer >= 2");
        }
        if (!(e.p >= 0.0) || !std::isfinite(e.p)) {
          throw Error(Errc::invalid_pmf, "negative or non-finite probability at z=" + std::to_string(e.z));
        }
        total += e.p;
        if (e.p > 0.0) pmf.push_back(e);
      }
      if (std::abs(total - 1.0) > 1e-12) {
        throw Error(Errc::invalid_pmf, "probabilities sum to " + std::to_string(total));
      }
      std::sort(pmf.begin(), pmf.end(), [](const PmfEntry& a, const PmfEntry& b) { return a.z < b.z; });
      for (std::size_t i = 1; i < pmf.size(); ++i) {
        if (pmf[i].z == pmf[i - 1].z) throw Error(Errc::invalid_pmf, "duplicate z=" + std::to_string(pmf[i].z));
      }
      d.pmf_ = std::move(pmf);
      d.mu_ = 0.0;
      for (const auto& e : d.pmf_) d.mu_ += e.z * e.p;
      break;
    }
  }
  if (!(d.mu_ > 2.0)) {
    throw Error(Errc::mu_not_supercritical, "mean offspring " + std::to_string(d.mu_) + " must exceed 2");
  }
  d.cdf_.resize(d.pmf_.size());
  double c = 0.0;
  for (std::size_t i = 0; i < d.pmf_.size(); ++i) d.cdf_[i] = (c += d.pmf_[i].p);
  d.cdf_.back() = 1.0;
  d.pi_ = d.pmf_.front().z == 2 ? 1.0 - d.pmf_.front().p : 1.0;
  d.hurst_ = std::log(2.0) / std::log(d.mu_);
  return d;
}

OffspringDistribution make_offspring(const FamilySpec& spec) { return OffspringDistribution::make(spec); }

int OffspringDistribution::sample(Rng& rng) const {
  switch (spec_.family) {
    case Family::geometric_pairs:
      return 2 * (1 + std::geometric_distribution<int>(spec_.param)(rng));
    case Family::poisson_pairs:
      return 2 * (1 + std::poisson_distribution<int>(spec_.param)(rng));
    case Family::fixed_pairs:
      return pmf_.front().z;
    case Family::custom: {
      const double u = uniform01(rng);
      const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      return pmf_[static_cast<std::size_t>(it - cdf_.begin())].z;
    }
  }
  return 0;
}

std::uint64_t OffspringDistribution::sample_sum(std::uint64_t n, Rng& rng) const {
  if (n == 0) return 0;
  using ll = long long;
  switch (spec_.family) {
    case Family::geometric_pairs: {
      // Sum of n Geometric(p) on {1,2,..} = n + NegBin(n, p) failures.
      const ll failures = std::negative_binomial_distribution<ll>(static_cast<ll>(n), spec_.param)(rng);
      return 2 * (n + static_cast<std::uint64_t>(failures));
    }
    case Family::poisson_pairs: {
      const ll extra = std::poisson_distribution<ll>(static_cast<double>(n) * spec_.param)(rng);
      return 2 * (n + static_cast<std::uint64_t>(extra));
    }
    case Family::fixed_pairs:
      return n * static_cast<std::uint64_t>(pmf_.front().z);
    case Family::custom: {
      std::uint64_t total = 0;
      std::uint64_t left = n;
      double mass_left = 1.0;
      for (std::size_t i = 0; i < pmf_.size() && left > 0; ++i) {
        std::uint64_t c = left;
        if (i + 1 < pmf_.size()) {
          const double q = std::clamp(pmf_[i].p / mass_left, 0.0, 1.0);
          c = static_cast<std::uint64_t>(std::binomial_distribution<ll>(static_cast<ll>(left), q)(rng));
        }
        total += c * static_cast<std::uint64_t>(pmf_[i].z);
        left -= c;
        mass_left -= pmf_[i].p;
      }
      return total;
    }
  }
  return 0;
}

}  // namespace cebp
