#include <cstdio>
#include <cstdlib>
#include <string>

#include "turing1/kernels.hpp"

namespace turing1::kernels {

#if defined(TURING1_BUILD_AVX2)
const KernelTable* avx2_table_unchecked();  // defined in kernels_avx2.cpp
#endif

const KernelTable* avx2_kernels() {
#if defined(TURING1_BUILD_AVX2)
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& chosen = []() -> const KernelTable& {
    std::string mode = "auto";
    if (const char* env = std::getenv("TURING_ONE_SIMD")) mode = env;
    for (auto& ch : mode) ch = static_cast<char>(std::tolower(ch));
    if (mode == "scalar") return scalar_kernels();
    const KernelTable* vec = avx2_kernels();
    if (mode == "avx2" && !vec) {
      std::fprintf(stderr,
                   "turing1: TURING_ONE_SIMD=avx2 requested but AVX2/FMA is "
                   "unavailable; using scalar kernels\n");
      return scalar_kernels();
    }
    if (mode != "auto" && mode != "avx2")
      std::fprintf(stderr,
                   "turing1: unknown TURING_ONE_SIMD value '%s'; using auto\n",
                   mode.c_str());
    return vec ? *vec : scalar_kernels();
  }();
  return chosen;
}

}  // namespace turing1::kernels
