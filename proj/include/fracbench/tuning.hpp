/**
 * @file tuning.hpp
 * @brief Frequency-domain loop evaluation with dead time and constrained
 *        direct-search tuning of FOPID / integer PID parameters.
 *
 * The loop phase is unwrapped continuously from low frequency: the plant's
 * rational part and the delay have closed-form continuous phase, the
 * controller phase is tracked along a log grid.
 *
 * tune() is a deterministic multi-start Nelder-Mead search: analytically
 * constructed starting points that already satisfy the phase and magnitude
 * conditions at the crossover, plus seeded random starts, refined against a
 * penalized residual objective. Among candidates that re-verify against the
 * standalone evaluators, the one with the lowest simulated ISE wins.
 */
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fracbench/controllers.hpp"
#include "fracbench/plant.hpp"

namespace fracbench {

struct FrequencySpec {
    double phase_margin_deg = 75.0;
    double gain_crossover = 1.94;        // rad/s
    double gain_margin_db = 10.0;        // reported post-hoc, not a constraint
    double noise_band_level_db = -20.0;  // B, |T| bound
    double noise_band_freq = 0.0;        // 0 -> 10 * gain_crossover
    double disturbance_level_db = -20.0; // A, |S| bound
    double disturbance_freq = 0.0;       // 0 -> 0.01 * gain_crossover
    double flat_phase_tolerance = 25.0;  // deg per rad/s

    double noise_freq() const;
    double dist_freq() const;
    void validate() const;
};

enum class ControllerFamily { Fopid, Iopid };

struct TuneOptions {
    std::uint64_t seed = 42;
    int random_starts = 16;
    int max_evals = 1500;               // per Nelder-Mead start
    double saturation_check_start = 1.0; // seconds skipped for the raw-control check
    bool parallel = true;
};

struct AchievedSpecs {
    double phase_margin_deg = 0.0;
    double crossover_residual_db = 0.0;
    double phase_slope_deg_per_rad_s = 0.0;
    double noise_band_db = 0.0;   // 20 log10 |T| at the noise frequency
    double disturbance_db = 0.0;  // 20 log10 |S| at the disturbance frequency
    double gain_margin_db = 0.0;  // NaN when no phase crossover is found
    double control_raw_min = 0.0; // raw control over the checked window
    double control_raw_max = 0.0;
};

struct TuningResult {
    ControllerParams params;
    AchievedSpecs achieved;
    bool feasible = false;      // all family constraints within tolerance
    bool core_feasible = false; // phase margin, crossover, flatness only
    double ise = 0.0;           // nominal closed-loop run
};

using LoopResponse = std::function<std::complex<double>(double)>;

/// Gc(jw) * Gp(jw) including the exact dead-time factor e^{-j w delay}.
std::complex<double> open_loop(const ControllerParams& params,
                               const TransferFunction& plant, double omega);

/// Loop phase in degrees, unwrapped continuously from omega -> 0+.
double loop_phase_deg(const ControllerParams& params, const TransferFunction& plant,
                      double omega);

double eval_phase_margin(const ControllerParams& params, const TransferFunction& plant,
                         double omega_c);
double eval_crossover_residual(const ControllerParams& params,
                               const TransferFunction& plant, double omega_c);
/// d(phase)/d(omega) at omega_c by central difference, degrees per rad/s.
double eval_phase_flatness(const ControllerParams& params, const TransferFunction& plant,
                           double omega_c);
double eval_noise_rejection(const ControllerParams& params, const TransferFunction& plant,
                            double omega_t);
double eval_disturbance_rejection(const ControllerParams& params,
                                  const TransferFunction& plant, double omega_s);

/// Generic-loop versions used by the evaluators above and by tests that
/// exercise synthetic loops (pure gain, integrator, delay).
double generic_phase_margin(const LoopResponse& loop, double omega_c);
double generic_crossover_residual(const LoopResponse& loop, double omega_c);
double generic_phase_flatness(const LoopResponse& loop, double omega_c);
double generic_noise_rejection(const LoopResponse& loop, double omega_t);
double generic_disturbance_rejection(const LoopResponse& loop, double omega_s);

/// |L| = 1 crossing nearest (in log frequency) to `hint`, under an extra
/// loop-gain scale factor. Empty when the loop never crosses unit gain.
std::optional<double> find_gain_crossover(const ControllerParams& params,
                                          const TransferFunction& plant, double hint,
                                          double gain_scale = 1.0);

struct Margins {
    double phase_margin_deg = 0.0;
    double crossover = 0.0;       // rad/s
    double gain_margin_db = 0.0;  // NaN when the phase never reaches -180 deg
    double phase_crossover = 0.0; // rad/s, 0 when absent
};

/// Stability margins with the crossover search hinted near `hint_wc`.
Margins margins(const ControllerParams& params, const TransferFunction& plant,
                double hint_wc, double gain_scale = 1.0);

TuningResult tune(const TransferFunction& plant, const FrequencySpec& spec,
                  ControllerFamily family, const TuneOptions& options = {});

} // namespace fracbench
