#include "linalg/fp_kernel.hpp"

namespace kvt::lin {

void fp_matmul_scalar(const std::uint32_t* a, const std::uint32_t* b,
                      std::uint32_t* c, std::size_t m, std::size_t k,
                      std::size_t n, std::uint64_t p) {
    // Residues are < p < 46341, so each product is < 2^31 and a row of up to
    // 2^33 terms cannot overflow the uint64 accumulator; reduce once per cell.
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::uint64_t acc = 0;
            const std::uint32_t* arow = a + i * k;
            for (std::size_t t = 0; t < k; ++t)
                acc += static_cast<std::uint64_t>(arow[t]) * b[t * n + j];
            c[i * n + j] = static_cast<std::uint32_t>(acc % p);
        }
    }
}

namespace {

FpKernelFn pick() {
#if defined(__x86_64__)
    if (__builtin_cpu_supports("avx2")) return fp_matmul_avx2;
#endif
    return fp_matmul_scalar;
}

}  // namespace

FpKernelFn select_fp_kernel() {
    static const FpKernelFn fn = pick();
    return fn;
}

const char* selected_fp_kernel_name() {
#if defined(__x86_64__)
    if (select_fp_kernel() == fp_matmul_avx2) return "avx2";
#endif
    return "scalar";
}

}  // namespace kvt::lin
