// NEON kernels (aarch64): 2 doubles per lane group, same operation order as
// the scalar reference, contraction disabled — bit-identical to scalar.
#include "nncdf/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

namespace nncdf::kern::detail {

void layer_neon(const Layer& layer, const double* in, std::size_t batch, double* out) {
    const std::size_t rows = layer.out_dim();
    const std::size_t vec_end = batch - (batch % 2);
    for (std::size_t j = 0; j < rows; ++j) {
        const double* w = layer.weights[j].data();
        const std::size_t k_count = layer.weights[j].size();
        const double b = layer.bias[j];
        double* dst = out + j * batch;

        for (std::size_t s = 0; s < vec_end; s += 2) {
            float64x2_t acc = vdupq_n_f64(b);
            for (std::size_t k = 0; k < k_count; ++k) {
                float64x2_t x = vld1q_f64(in + k * batch + s);
                acc = vaddq_f64(acc, vmulq_f64(vdupq_n_f64(w[k]), x));
            }
            vst1q_f64(dst + s, acc);
        }
        for (std::size_t s = vec_end; s < batch; ++s) {
            double acc = b;
            for (std::size_t k = 0; k < k_count; ++k) acc = acc + w[k] * in[k * batch + s];
            dst[s] = acc;
        }

        switch (layer.activation) {
            case ActivationKind::Identity:
                break;
            case ActivationKind::ReLU: {
                const float64x2_t zero = vdupq_n_f64(0.0);
                for (std::size_t s = 0; s < vec_end; s += 2) {
                    float64x2_t v = vld1q_f64(dst + s);
                    uint64x2_t mask = vcgtq_f64(v, zero); // (v > 0) ? v : +0
                    float64x2_t r = vreinterpretq_f64_u64(
                        vandq_u64(vreinterpretq_u64_f64(v), mask));
                    vst1q_f64(dst + s, r);
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

#endif // aarch64 NEON
