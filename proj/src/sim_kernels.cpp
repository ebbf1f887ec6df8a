#include "seqeq/sim_kernels.hpp"

#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define SEQEQ_X86 1
#endif

namespace seqeq::kernels {

namespace {

struct Operand {
  const uint64_t* one;
  const uint64_t* zero;
};

inline Operand operand(uint32_t lit, const uint64_t* one, const uint64_t* zero, size_t words) {
  const size_t base = static_cast<size_t>(lit >> 1) * words;
  if (lit & 1u) return {zero + base, one + base};
  return {one + base, zero + base};
}

}  // namespace

void eval_ands_scalar(std::span<const uint32_t> gates, uint64_t* one, uint64_t* zero, size_t words) {
  for (size_t g = 0; g + 2 < gates.size(); g += 3) {
    const size_t out = static_cast<size_t>(gates[g]) * words;
    const Operand a = operand(gates[g + 1], one, zero, words);
    const Operand b = operand(gates[g + 2], one, zero, words);
    for (size_t w = 0; w < words; ++w) {
      const uint64_t o = a.one[w] & b.one[w];
      const uint64_t z = a.zero[w] | b.zero[w];
      one[out + w] = o;
      zero[out + w] = z;
    }
  }
}

#ifdef SEQEQ_X86

__attribute__((target("avx2"))) void eval_ands_avx2(std::span<const uint32_t> gates, uint64_t* one, uint64_t* zero,
                                                     size_t words) {
  for (size_t g = 0; g + 2 < gates.size(); g += 3) {
    const size_t out = static_cast<size_t>(gates[g]) * words;
    const Operand a = operand(gates[g + 1], one, zero, words);
    const Operand b = operand(gates[g + 2], one, zero, words);
    size_t w = 0;
    for (; w + 4 <= words; w += 4) {
      const __m256i a1 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.one + w));
      const __m256i b1 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.one + w));
      const __m256i a0 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.zero + w));
      const __m256i b0 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.zero + w));
      _mm256_storeu_si256(reinterpret_cast<__m256i*>(one + out + w), _mm256_and_si256(a1, b1));
      _mm256_storeu_si256(reinterpret_cast<__m256i*>(zero + out + w), _mm256_or_si256(a0, b0));
    }
    for (; w < words; ++w) {
      const uint64_t o = a.one[w] & b.one[w];
      const uint64_t z = a.zero[w] | b.zero[w];
      one[out + w] = o;
      zero[out + w] = z;
    }
  }
}

bool avx2_available() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
}

#else

void eval_ands_avx2(std::span<const uint32_t> gates, uint64_t* one, uint64_t* zero, size_t words) {
  eval_ands_scalar(gates, one, zero, words);
}

bool avx2_available() { return false; }

#endif

namespace {

bool force_scalar() {
  const char* env = std::getenv("SEQEQ_SIM_KERNEL");
  return env && std::strcmp(env, "scalar") == 0;
}

}  // namespace

EvalAnds select_eval_ands() {
  static const EvalAnds chosen = (!force_scalar() && avx2_available()) ? &eval_ands_avx2 : &eval_ands_scalar;
  return chosen;
}

const char* selected_kernel_name() { return select_eval_ands() == &eval_ands_scalar ? "scalar" : "avx2"; }

}  // namespace seqeq::kernels
