// AVX2 kernels: vectorized across samples (4 doubles per lane group), with
// the same per-sample operation order as the scalar reference and FP
// contraction disabled, so results are bit-identical to scalar.
#include "nncdf/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace nncdf::kern::detail {

void layer_avx2(const Layer& layer, const double* in, std::size_t batch, double* out) {
    const std::size_t rows = layer.out_dim();
    const std::size_t vec_end = batch - (batch % 4);
    for (std::size_t j = 0; j < rows; ++j) {
        const double* w = layer.weights[j].data();
        const std::size_t k_count = layer.weights[j].size();
        const double b = layer.bias[j];
        double* dst = out + j * batch;

        for (std::size_t s = 0; s < vec_end; s += 4) {
            __m256d acc = _mm256_set1_pd(b);
            for (std::size_t k = 0; k < k_count; ++k) {
                __m256d x = _mm256_loadu_pd(in + k * batch + s);
                acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(w[k]), x));
            }
            _mm256_storeu_pd(dst + s, acc);
        }
        for (std::size_t s = vec_end; s < batch; ++s) { // tail, scalar order
            double acc = b;
            for (std::size_t k = 0; k < k_count; ++k) acc = acc + w[k] * in[k * batch + s];
            dst[s] = acc;
        }

        switch (layer.activation) {
            case ActivationKind::Identity:
                break;
            case ActivationKind::ReLU: {
                const __m256d zero = _mm256_setzero_pd();
                for (std::size_t s = 0; s < vec_end; s += 4) {
                    __m256d v = _mm256_loadu_pd(dst + s);
                    // (v > 0) ? v : 0 — matches the scalar branch for ±0.
                    __m256d mask = _mm256_cmp_pd(v, zero, _CMP_GT_OQ);
                    _mm256_storeu_pd(dst + s, _mm256_and_pd(v, mask));
                }
                for (std::size_t s = vec_end; s < batch; ++s)
                    dst[s] = dst[s] > 0.0 ? dst[s] : 0.0;
                break;
            }
            default:
                for (std::size_t s = 0; s < batch; ++s) dst[s] = act_eval(layer.activation, dst[s]);
                break;
        }
    }
}

} // namespace nncdf::kern::detail

#endif // x86-64
