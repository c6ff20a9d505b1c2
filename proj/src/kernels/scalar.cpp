// Scalar reference kernels. Compiled with -ffp-contract=off so the SIMD
// variants (same operation order, contraction also off) match bit-for-bit.
#include "nncdf/kernels.hpp"

namespace nncdf::kern::detail {

void layer_scalar(const Layer& layer, const double* in, std::size_t batch, double* out) {
    const std::size_t rows = layer.out_dim();
    for (std::size_t j = 0; j < rows; ++j) {
        const double* w = layer.weights[j].data();
        const std::size_t k_count = layer.weights[j].size();
        const double b = layer.bias[j];
        double* dst = out + j * batch;
        for (std::size_t s = 0; s < batch; ++s) {
            double acc = b;
            for (std::size_t k = 0; k < k_count; ++k) acc = acc + w[k] * in[k * batch + s];
            dst[s] = acc;
        }
        switch (layer.activation) {
            case ActivationKind::Identity:
                break;
            case ActivationKind::ReLU:
                for (std::size_t s = 0; s < batch; ++s) dst[s] = dst[s] > 0.0 ? dst[s] : 0.0;
                break;
            default:
                // Transcendental kinds run through libm in every backend.
                for (std::size_t s = 0; s < batch; ++s) dst[s] = act_eval(layer.activation, dst[s]);
                break;
        }
    }
}

} // namespace nncdf::kern::detail
