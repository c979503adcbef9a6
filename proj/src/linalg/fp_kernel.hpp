#pragma once

#include <cstddef>
#include <cstdint>

namespace kvt::lin {

// Packed matmul kernels for prime fields with p < 46341 (so products of two
// residues fit in uint32 lanes after widening, and row sums of up to ~2^32
// terms fit the uint64 accumulator). Buffers are row-major uint32 residues.
using FpKernelFn = void (*)(const std::uint32_t* a, const std::uint32_t* b,
                            std::uint32_t* c, std::size_t m, std::size_t k,
                            std::size_t n, std::uint64_t p);

void fp_matmul_scalar(const std::uint32_t* a, const std::uint32_t* b,
                      std::uint32_t* c, std::size_t m, std::size_t k,
                      std::size_t n, std::uint64_t p);

#if defined(__x86_64__)
void fp_matmul_avx2(const std::uint32_t* a, const std::uint32_t* b,
                    std::uint32_t* c, std::size_t m, std::size_t k,
                    std::size_t n, std::uint64_t p);
#endif

// Runtime CPU dispatch, cached after the first call.
FpKernelFn select_fp_kernel();
const char* selected_fp_kernel_name();

}  // namespace kvt::lin
