#include "nncdf/kernels.hpp"

#include "nncdf/errors.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

namespace nncdf::kern {

namespace {

Backend detect_best() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) return Backend::Avx2;
    return Backend::Scalar;
#elif defined(__aarch64__) && defined(__ARM_NEON)
    return Backend::Neon;
#else
    return Backend::Scalar;
#endif
}

Backend resolve_auto() {
    if (const char* env = std::getenv("NNCDF_BACKEND")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
        if (std::strcmp(env, "avx2") == 0 && backend_available(Backend::Avx2))
            return Backend::Avx2;
        if (std::strcmp(env, "neon") == 0 && backend_available(Backend::Neon))
            return Backend::Neon;
    }
    return detect_best();
}

std::atomic<Backend> g_backend{Backend::Auto};

} // namespace

bool backend_available(Backend b) {
    switch (b) {
        case Backend::Auto:
        case Backend::Scalar:
            return true;
        case Backend::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2") != 0;
#else
            return false;
#endif
        case Backend::Neon:
#if defined(__aarch64__) && defined(__ARM_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

void set_backend(Backend b) {
    if (!backend_available(b))
        throw config_error(std::string("kernel backend unavailable on this CPU: ") +
                           backend_name(b));
    g_backend.store(b, std::memory_order_relaxed);
}

Backend active_backend() {
    Backend b = g_backend.load(std::memory_order_relaxed);
    return b == Backend::Auto ? resolve_auto() : b;
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::Auto: return "auto";
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "?";
}

void forward_batch(const FeedforwardNetwork& net, const double* in,
                   std::size_t batch, double* out) {
    if (batch == 0) return;
    const Backend b = active_backend();

    std::size_t max_width = net.input_dim();
    for (const auto& l : net.layers) max_width = std::max(max_width, l.out_dim());

    std::vector<double> buf_a(max_width * batch);
    std::vector<double> buf_b(max_width * batch);
    std::memcpy(buf_a.data(), in, net.input_dim() * batch * sizeof(double));

    const double* cur = buf_a.data();
    double* nxt = buf_b.data();
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const Layer& layer = net.layers[li];
        double* dst = (li + 1 == net.layers.size()) ? out : nxt;
        switch (b) {
#if defined(__x86_64__) || defined(_M_X64)
            case Backend::Avx2:
                detail::layer_avx2(layer, cur, batch, dst);
                break;
#endif
#if defined(__aarch64__)
            case Backend::Neon:
                detail::layer_neon(layer, cur, batch, dst);
                break;
#endif
            default:
                detail::layer_scalar(layer, cur, batch, dst);
                break;
        }
        if (dst == nxt) {
            std::swap(buf_a, buf_b);
            cur = buf_a.data();
            nxt = buf_b.data();
        }
    }
}

std::vector<std::vector<double>> forward_points(
    const FeedforwardNetwork& net, const std::vector<std::vector<double>>& pts) {
    const std::size_t batch = pts.size();
    const std::size_t n_in = net.input_dim();
    const std::size_t n_out = net.output_dim();
    std::vector<double> in(n_in * batch);
    for (std::size_t s = 0; s < batch; ++s)
        for (std::size_t k = 0; k < n_in; ++k) in[k * batch + s] = pts[s][k];
    std::vector<double> out(n_out * batch);
    forward_batch(net, in.data(), batch, out.data());
    std::vector<std::vector<double>> res(batch, std::vector<double>(n_out));
    for (std::size_t s = 0; s < batch; ++s)
        for (std::size_t j = 0; j < n_out; ++j) res[s][j] = out[j * batch + s];
    return res;
}

} // namespace nncdf::kern
