#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

// Packed three-valued AND evaluation. `gates` holds (out var, left lit,
// right lit) triples in topological order; `one`/`zero` hold `words`
// words per variable. An inverted literal reads the swapped planes.
namespace seqeq::kernels {

using EvalAnds = void (*)(std::span<const uint32_t> gates, uint64_t* one, uint64_t* zero, size_t words);

void eval_ands_scalar(std::span<const uint32_t> gates, uint64_t* one, uint64_t* zero, size_t words);
/// Requires AVX2; call only when avx2_available().
void eval_ands_avx2(std::span<const uint32_t> gates, uint64_t* one, uint64_t* zero, size_t words);

bool avx2_available();
/// Best kernel for this CPU; SEQEQ_SIM_KERNEL=scalar forces the fallback.
EvalAnds select_eval_ands();
const char* selected_kernel_name();

}  // namespace seqeq::kernels
