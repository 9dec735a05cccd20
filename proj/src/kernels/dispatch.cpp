#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels/backends.hpp"
#include "psomle/error.hpp"

namespace psomle::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(PSOMLE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_selection() {
  if (const char* env = std::getenv("PSOMLE_ISA"); env && std::string(env) == "scalar")
    return &scalar::kernel_table();
  return available(Isa::avx2) ? &table(Isa::avx2) : &scalar::kernel_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> selected{initial_selection()};
  return selected;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool available(Isa isa) {
  if (isa == Isa::scalar) return true;
  static const bool avx2 = cpu_has_avx2();
  return avx2;
}

const KernelTable& table(Isa isa) {
  if (!available(isa))
    throw ConfigError("kernel variant '" + std::string(to_string(isa)) + "' is not available");
#if defined(PSOMLE_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2::kernel_table();
#endif
  return scalar::kernel_table();
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Isa isa) { current().store(&table(isa), std::memory_order_release); }

}  // namespace psomle::kernels
