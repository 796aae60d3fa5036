#pragma once

// Data-parallel inner loops used by the path analyzers. Each kernel has a
// scalar reference and vectorised variants; the active variant is chosen
// once at startup from the CPU features (override with CEBP_ISA=scalar|avx2|neon).
// All variants return bit-identical results.

#include <cstddef>
#include <span>
#include <string_view>

namespace cebp::kernels {

enum class Isa { scalar, avx2, neon };

struct MinMax {
  double min;
  double max;
};

std::string_view isa_name(Isa isa) noexcept;
bool isa_supported(Isa isa) noexcept;
Isa active_isa() noexcept;
/// Throws cebp::Error(invalid_argument) when the ISA is not available here.
void set_active_isa(Isa isa);

/// Min and max of a non-empty, NaN-free range.
MinMax minmax(std::span<const double> x);
/// Number of elements strictly below `threshold`.
std::size_t count_less(std::span<const double> x, double threshold);
/// Number of elements strictly above `threshold`.
std::size_t count_greater(std::span<const double> x, double threshold);
/// x[i] *= factor, in place.
void scale(std::span<double> x, double factor);

struct Table {
  MinMax (*minmax)(const double*, std::size_t);
  std::size_t (*count_less)(const double*, std::size_t, double);
  std::size_t (*count_greater)(const double*, std::size_t, double);
  void (*scale)(double*, std::size_t, double);
};

/// Direct access to one variant's table, for equivalence tests.
const Table& table(Isa isa);

namespace scalar {
extern const Table kTable;
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
extern const Table kTable;
}
#endif
#if defined(__aarch64__)
namespace neon {
extern const Table kTable;
}
#endif

}  // namespace cebp::kernels
