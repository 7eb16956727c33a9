/**
 * @file controllers.hpp
 * @brief FOPID / integer PID control law in time and frequency domain,
 *        the SIMC tuning rule, and the bundled reference presets.
 *
 * Control law: u = k * ( e + (1/tau_i) * D^{-lambda} e + tau_d * D^{mu} e )
 * with the differ-integrals realized by the GL operator over the stored
 * error history. lambda = mu = 1 degenerates to a classical discrete PID
 * (rectangular integral, backward difference).
 */
#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "fracbench/plant.hpp"

namespace fracbench {

struct ControllerParams {
    double k = 1.0;
    double tau_i = 1.0;
    double tau_d = 0.0;
    double lambda = 1.0;
    double mu = 1.0;

    bool integer_order() const { return lambda == 1.0 && mu == 1.0; }
    void validate() const;
};

struct SaturationLimits {
    double low = 0.0;
    double high = 10.0;
};

/// Single-owner stateful controller: one instance drives one loop.
/// Keeps the error history and incrementally grown GL weights so each
/// step costs one pass over the history.
class FopidController {
  public:
    FopidController(ControllerParams params, double step,
                    SaturationLimits limits = {}, bool anti_windup = false);

    /// Appends the error sample and returns the saturated control value.
    double step(double error);

    /// Control value before clamping, as of the last step().
    double last_raw() const { return last_raw_; }

    /// GL integral / derivative terms as of the last step() (test hook).
    double last_integral() const { return last_integral_; }
    double last_derivative() const { return last_derivative_; }

    const std::vector<double>& error_history() const { return errors_; }
    const ControllerParams& params() const { return params_; }
    double sample_time() const { return step_; }

    void reset();

  private:
    ControllerParams params_;
    double step_;
    SaturationLimits limits_;
    bool anti_windup_;

    std::vector<double> errors_;
    std::vector<double> integ_input_; // conditional-integration history
    std::vector<double> wi_;          // weights, order -lambda
    std::vector<double> wd_;          // weights, order +mu
    double integ_sum_ = 0.0;          // running sum fast path (lambda == 1)
    double last_raw_ = 0.0;
    double last_integral_ = 0.0;
    double last_derivative_ = 0.0;
};

/// Controller transfer function at s = j*omega:
/// Gc = k * (1 + (1/tau_i) s^{-lambda} + tau_d s^{mu}).
std::complex<double> controller_frequency_response(const ControllerParams& params,
                                                   double omega);

/// SIMC rule for a second-order-plus-dead-time plant:
/// Kp = tau1 / (k (tau_c + delay)), tau_i = min(tau1, 4 (tau_c + delay)),
/// tau_d = tau2. Recommended tau_c = delay.
ControllerParams simc_tune(const TransferFunction& plant, double tau_c);

struct PresetEntry {
    ControllerParams params;
    double reported_ise = 0.0;
    double reported_mean_control = 0.0;
};

/// Reference controller presets keyed "FOPID", "SIMC PID", "IOPID".
const std::map<std::string, PresetEntry>& table1_presets();

/// Preset lookup accepting the CLI short names fopid/simc/iopid as well.
const PresetEntry* find_preset(const std::string& name);

} // namespace fracbench
