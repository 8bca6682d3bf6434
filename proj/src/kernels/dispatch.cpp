#include <atomic>
#include <cstdlib>
#include <string_view>

#include "rlcg/kernels/kernels.hpp"

namespace rlcg::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& select_from_env() noexcept {
  const char* env = std::getenv("RLCG_SIMD");
  const std::string_view choice = env ? env : "auto";
  if (choice == "scalar") return scalar_table();
  if (const KernelTable* t = avx2_table()) return *t;
  return scalar_table();
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> table{&select_from_env()};
  return table;
}

}  // namespace

const KernelTable* avx2_table() noexcept {
#ifdef RLCG_WITH_AVX2
  static const KernelTable* table = cpu_has_avx2() ? detail::make_avx2_table() : nullptr;
  return table;
#else
  (void)cpu_has_avx2;
  return nullptr;
#endif
}

const KernelTable& active() noexcept { return *slot().load(std::memory_order_relaxed); }

void force(const KernelTable& table) noexcept { slot().store(&table, std::memory_order_relaxed); }

}  // namespace rlcg::kernels
