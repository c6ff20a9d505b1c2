#pragma once

#include "nncdf/model.hpp"

#include <cstddef>
#include <vector>

namespace nncdf::kern {

// Batched network evaluation used by the Monte-Carlo oracle and the sampled
// soundness checks. Two equivalent implementations exist:
//   - scalar reference kernels,
//   - SIMD variants (AVX2 on x86-64, NEON on aarch64),
// selected at runtime. Both perform the identical per-sample operation
// sequence with FP contraction disabled, so outputs are bit-identical across
// backends; the equivalence tests assert that.

enum class Backend { Auto, Scalar, Avx2, Neon };

bool backend_available(Backend b);
// Throws config_error when the requested backend is unavailable on this CPU.
void set_backend(Backend b);
// The backend that will actually run (Auto resolved; honors NNCDF_BACKEND
// env var with values scalar|avx2|neon on first resolution).
Backend active_backend();
const char* backend_name(Backend b);

// Column-major (structure-of-arrays) layout: buffer[feature * batch + sample].
// `in` holds input_dim()*batch doubles, `out` receives output_dim()*batch.
void forward_batch(const FeedforwardNetwork& net, const double* in,
                   std::size_t batch, double* out);

// Convenience wrapper for point lists (packs/unpacks the SoA layout).
std::vector<std::vector<double>> forward_points(
    const FeedforwardNetwork& net, const std::vector<std::vector<double>>& pts);

namespace detail {
// One affine layer + activation on a batch; implemented per backend.
void layer_scalar(const Layer& layer, const double* in, std::size_t batch, double* out);
#if defined(__x86_64__) || defined(_M_X64)
void layer_avx2(const Layer& layer, const double* in, std::size_t batch, double* out);
#endif
#if defined(__aarch64__)
void layer_neon(const Layer& layer, const double* in, std::size_t batch, double* out);
#endif
} // namespace detail

} // namespace nncdf::kern
