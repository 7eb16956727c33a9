#include "fracbench/fracops.hpp"

#include <cmath>
#include <stdexcept>

namespace fracbench {

std::vector<double> gl_weights(double order, std::size_t n) {
    if (!std::isfinite(order)) {
        throw std::invalid_argument("gl_weights: order must be finite");
    }
    std::vector<double> w(n + 1);
    w[0] = 1.0;
    for (std::size_t j = 1; j <= n; ++j) {
        w[j] = w[j - 1] * (1.0 - (order + 1.0) / static_cast<double>(j));
    }
    return w;
}

namespace {

inline double gl_point(std::span<const double> x, const std::vector<double>& w,
                       std::size_t k, std::size_t memory) {
    std::size_t depth = k + 1;
    if (memory > 0 && memory < depth) depth = memory;
    double acc = 0.0;
    const double* xs = x.data() + k;
    #pragma omp simd reduction(+ : acc)
    for (std::size_t j = 0; j < depth; ++j) {
        acc += w[j] * xs[-static_cast<std::ptrdiff_t>(j)];
    }
    return acc;
}

} // namespace

std::vector<double> gl_apply(std::span<const double> signal, double order,
                             double step, std::size_t memory) {
    if (!(step > 0.0)) {
        throw std::invalid_argument("gl_apply: step must be > 0");
    }
    if (signal.empty()) {
        throw std::invalid_argument("gl_apply: signal must be non-empty");
    }
    if (order == 0.0) {
        return std::vector<double>(signal.begin(), signal.end());
    }
    const auto n = signal.size();
    const auto w = gl_weights(order, n - 1);
    const double scale = std::pow(step, -order);
    std::vector<double> out(n);
    // chunked-cyclic schedule balances the triangular per-sample cost
    #pragma omp parallel for schedule(static, 64)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
        out[k] = scale * gl_point(signal, w, static_cast<std::size_t>(k), memory);
    }
    return out;
}

std::vector<double> gl_apply_serial(std::span<const double> signal, double order,
                                    double step, std::size_t memory) {
    if (!(step > 0.0)) {
        throw std::invalid_argument("gl_apply: step must be > 0");
    }
    if (signal.empty()) {
        throw std::invalid_argument("gl_apply: signal must be non-empty");
    }
    if (order == 0.0) {
        return std::vector<double>(signal.begin(), signal.end());
    }
    const auto n = signal.size();
    const auto w = gl_weights(order, n - 1);
    const double scale = std::pow(step, -order);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = scale * gl_point(signal, w, k, memory);
    }
    return out;
}

std::complex<double> s_power(double order, double omega) {
    if (!(omega > 0.0)) {
        throw std::invalid_argument("s_power: omega must be > 0");
    }
    const double mag = std::pow(omega, order);
    const double phase = order * M_PI / 2.0;
    return {mag * std::cos(phase), mag * std::sin(phase)};
}

} // namespace fracbench
