#pragma once

// Law of the subcrossing count Z (even, >= 2) and the Galton-Watson
// machinery built on it.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cebp/rng.hpp"

namespace cebp {

enum class Family { geometric_pairs, poisson_pairs, fixed_pairs, custom };

std::string_view family_name(Family f) noexcept;
/// Accepts the names produced by family_name(); throws Error(invalid_argument).
Family parse_family(std::string_view name);

struct PmfEntry {
  int z;
  double p;
  bool operator==(const PmfEntry&) const = default;
};

/// What the user asks for: a parametric family or an explicit table.
///   geometric_pairs(p): Z = 2G, G ~ Geometric(p) on {1,2,...}
///   poisson_pairs(l):   Z = 2(1 + Poisson(l))
///   fixed_pairs(b):     Z = 2b
struct FamilySpec {
  Family family = Family::geometric_pairs;
  double param = 0.5;
  std::vector<PmfEntry> table;  // custom only

  static FamilySpec geometric(double p) { return {Family::geometric_pairs, p, {}}; }
  static FamilySpec poisson(double lambda) { return {Family::poisson_pairs, lambda, {}}; }
  static FamilySpec fixed(int b) { return {Family::fixed_pairs, static_cast<double>(b), {}}; }
  static FamilySpec custom(std::vector<PmfEntry> pmf) { return {Family::custom, 0.0, std::move(pmf)}; }

  bool operator==(const FamilySpec&) const = default;
};

/// Tail mass below which unbounded families are cut off.
inline constexpr double kPmfTruncation = 1e-12;

class OffspringDistribution {
 public:
  /// Validates and builds. Errors: MU_NOT_SUPERCRITICAL, INVALID_PMF,
  /// INVALID_ARGUMENT for out-of-range family parameters.
  static OffspringDistribution make(const FamilySpec& spec);

  const FamilySpec& spec() const noexcept { return spec_; }
  Family family() const noexcept { return spec_.family; }
  /// Truncated, renormalised pmf sorted by z.
  const std::vector<PmfEntry>& pmf() const noexcept { return pmf_; }
  double mu() const noexcept { return mu_; }
  /// P(Z > 2).
  double pi() const noexcept { return pi_; }
  /// log 2 / log mu.
  double hurst() const noexcept { return hurst_; }
  int max_z() const noexcept { return pmf_.back().z; }

  /// One draw of Z.
  int sample(Rng& rng) const;
  /// Sum of n independent draws of Z. Parametric families use the closed
  /// form of the sum (negative binomial / Poisson), so the cost does not
  /// grow with n; custom tables draw a multinomial over the support.
  std::uint64_t sample_sum(std::uint64_t n, Rng& rng) const;

 private:
  FamilySpec spec_;
  std::vector<PmfEntry> pmf_;
  std::vector<double> cdf_;
  double mu_ = 0.0;
  double pi_ = 0.0;
  double hurst_ = 0.0;
};

OffspringDistribution make_offspring(const FamilySpec& spec);

}  // namespace cebp
