#include "linalg/fp_kernel.hpp"

#if defined(__x86_64__)

#include <immintrin.h>

namespace kvt::lin {

__attribute__((target("avx2"))) void fp_matmul_avx2(
    const std::uint32_t* a, const std::uint32_t* b, std::uint32_t* c,
    std::size_t m, std::size_t k, std::size_t n, std::uint64_t p) {
    // Four output columns at a time: b-columns widen to 64-bit lanes, the
    // a-entry broadcasts, and _mm256_mul_epu32 multiplies the low 32 bits of
    // each lane. Residues are < 46341 so every product is < 2^31 and a lane
    // can absorb ~2^33 terms before the uint64 accumulator could wrap.
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        for (std::size_t i = 0; i < m; ++i) {
            __m256i acc = _mm256_setzero_si256();
            const std::uint32_t* arow = a + i * k;
            for (std::size_t t = 0; t < k; ++t) {
                __m128i b4 = _mm_loadu_si128(
                    reinterpret_cast<const __m128i*>(b + t * n + j));
                __m256i bw = _mm256_cvtepu32_epi64(b4);
                __m256i aw = _mm256_set1_epi64x(static_cast<long long>(arow[t]));
                acc = _mm256_add_epi64(acc, _mm256_mul_epu32(aw, bw));
            }
            alignas(32) std::uint64_t lanes[4];
            _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
            for (int l = 0; l < 4; ++l)
                c[i * n + j + static_cast<std::size_t>(l)] =
                    static_cast<std::uint32_t>(lanes[l] % p);
        }
    }
    if (j < n) {
        // Tail columns go through the scalar path.
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t jj = j; jj < n; ++jj) {
                std::uint64_t acc = 0;
                const std::uint32_t* arow = a + i * k;
                for (std::size_t t = 0; t < k; ++t)
                    acc += static_cast<std::uint64_t>(arow[t]) * b[t * n + jj];
                c[i * n + jj] = static_cast<std::uint32_t>(acc % p);
            }
        }
    }
}

}  // namespace kvt::lin

#endif
