// Timing harness comparing the serial reference kernels with the
// OpenMP-parallel ones: the GL convolution over signal length, and a full
// 2^3 campaign dispatched on one thread vs all threads.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "fracbench/factorial.hpp"
#include "fracbench/fracops.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace fracbench;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn(); // warm-up
    const auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

volatile double sink;

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled (serial build)\n\n");
#endif

    std::printf("GL differ-integration, order 0.5, full memory\n");
    std::printf("%10s %12s %12s %8s %12s\n", "samples", "serial ms", "parallel ms",
                "speedup", "max |diff|");
    for (std::size_t n : {2000u, 8000u, 32000u}) {
        std::vector<double> signal(n);
        for (std::size_t i = 0; i < n; ++i) signal[i] = std::sin(0.01 * i) + 0.5;
        const int reps = n <= 8000 ? 5 : 2;
        std::vector<double> a, b;
        const double ts = time_ms([&] { a = gl_apply_serial(signal, 0.5, 1e-3); }, reps);
        const double tp = time_ms([&] { b = gl_apply(signal, 0.5, 1e-3); }, reps);
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
        sink = a.back() + b.back();
        std::printf("%10zu %12.2f %12.2f %8.2fx %12.3e\n", n, ts, tp, ts / tp, diff);
    }

    std::printf("\n2^3 campaign, FOPID preset, 2 replicates (16 closed-loop runs)\n");
    const ControllerParams fopid = table1_presets().at("FOPID").params;
    SimConfig base;
    const double t1 = time_ms([&] {
        sink = run_design(fopid, base, 2, design_plant(), false).rows.back().metrics.ise;
    }, 1);
    const double t2 = time_ms([&] {
        sink = run_design(fopid, base, 2, design_plant(), true).rows.back().metrics.ise;
    }, 1);
    std::printf("%10s %12.1f ms\n%10s %12.1f ms  (%.2fx)\n", "serial", t1, "parallel",
                t2, t1 / t2);
    return 0;
}
