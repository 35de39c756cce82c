#include <atomic>
#include <cstdlib>

#include "millenv/simd/kernels.hpp"

namespace millenv::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(MILLENV_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__)) && \
    (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() noexcept {
  const KernelTable* best = avx2_kernels();
  if (best == nullptr) best = &scalar_kernels();
  if (const char* env = std::getenv("MILLENV_ISA")) {
    Isa wanted{};
    if (parse_isa(env, wanted)) {
      if (wanted == Isa::scalar) return &scalar_kernels();
      if (wanted == Isa::avx2 && avx2_kernels() != nullptr) return avx2_kernels();
    }
  }
  return best;
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable* avx2_kernels() noexcept {
#if defined(MILLENV_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept { return *slot().load(std::memory_order_acquire); }

bool select(Isa isa) noexcept {
  const KernelTable* table = nullptr;
  switch (isa) {
    case Isa::scalar: table = &scalar_kernels(); break;
    case Isa::avx2: table = avx2_kernels(); break;
  }
  if (table == nullptr) return false;
  slot().store(table, std::memory_order_release);
  return true;
}

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool parse_isa(std::string_view name, Isa& out) noexcept {
  if (name == "scalar") {
    out = Isa::scalar;
    return true;
  }
  if (name == "avx2") {
    out = Isa::avx2;
    return true;
  }
  return false;
}

}  // namespace millenv::simd
