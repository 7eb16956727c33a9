/**
 * @file fracops.hpp
 * @brief Grunwald-Letnikov fractional differ-integration on sampled signals
 *        and frequency-domain evaluation of s^alpha.
 *
 * Convention: positive order = derivative, negative order = integral,
 * zero order = identity. Signals are taken as zero before their first
 * sample.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fracbench {

/// Binomial-recursion weights of the GL operator of the given order.
/// w[0] = 1, w[j] = w[j-1] * (1 - (order + 1)/j).
std::vector<double> gl_weights(double order, std::size_t n);

/// Full-memory GL differ-integration of a uniformly sampled signal.
/// out[k] = step^-order * sum_{j=0..k} w[j] * signal[k-j].
/// `memory` limits the history window in samples (0 = unlimited).
/// Parallelized over output samples; results are deterministic.
std::vector<double> gl_apply(std::span<const double> signal, double order,
                             double step, std::size_t memory = 0);

/// Single-threaded reference used by the tests and the benchmark.
std::vector<double> gl_apply_serial(std::span<const double> signal, double order,
                                    double step, std::size_t memory = 0);

/// (j*omega)^order for omega > 0: magnitude omega^order, phase order*pi/2.
std::complex<double> s_power(double order, double omega);

} // namespace fracbench
