#include <atomic>
#include <cstdlib>
#include <string>

#include "cebp/error.hpp"
#include "cebp/kernels.hpp"

namespace cebp::kernels {
namespace {

Isa detect() noexcept {
  if (const char* env = std::getenv("CEBP_ISA")) {
    const std::string_view want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(isa) && isa_supported(isa)) return isa;
    }
  }
  if (isa_supported(Isa::avx2)) return Isa::avx2;
  if (isa_supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

std::atomic<const Table*>& active_table() {
  static std::atomic<const Table*> t{&table(detect())};
  return t;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> a{detect()};
  return a;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const Table& table(Isa isa) {
  if (!isa_supported(isa)) {
    throw Error(Errc::invalid_argument, std::string("ISA not supported: ") + std::string(isa_name(isa)));
  }
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: return avx2::kTable;
#endif
#if defined(__aarch64__)
    case Isa::neon: return neon::kTable;
#endif
    default: return scalar::kTable;
  }
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  const Table& t = table(isa);
  active_table().store(&t, std::memory_order_relaxed);
  active().store(isa, std::memory_order_relaxed);
}

MinMax minmax(std::span<const double> x) {
  if (x.empty()) throw Error(Errc::invalid_argument, "minmax of empty range");
  return active_table().load(std::memory_order_relaxed)->minmax(x.data(), x.size());
}

std::size_t count_less(std::span<const double> x, double threshold) {
  return active_table().load(std::memory_order_relaxed)->count_less(x.data(), x.size(), threshold);
}

std::size_t count_greater(std::span<const double> x, double threshold) {
  return active_table().load(std::memory_order_relaxed)->count_greater(x.data(), x.size(), threshold);
}

void scale(std::span<double> x, double factor) {
  active_table().load(std::memory_order_relaxed)->scale(x.data(), x.size(), factor);
}

}  // namespace cebp::kernels
