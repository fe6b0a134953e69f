#include <cstdlib>
#include <string_view>

#include "labtrick/kernels.hpp"

namespace labtrick::kernels {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& active() {
  static const KernelTable& chosen = [&]() -> const KernelTable& {
    const char* env = std::getenv("LABTRICK_KERNELS");
    if (env && std::string_view(env) == "scalar") return scalar_kernels();
    if (const KernelTable* simd = avx2_kernels(); simd && cpu_has_avx2_fma()) return *simd;
    return scalar_kernels();
  }();
  return chosen;
}

}  // namespace labtrick::kernels
