/**
 * @file simloop.hpp
 * @brief Deterministic fixed-step closed-loop simulation with dead time,
 *        actuator saturation, and the three factorial stressors.
 *
 * Per sample: measure (optionally with multiplicative noise), form the
 * error, run the controller (clamped to the actuator range), add the load
 * disturbance, delay through an input FIFO, advance the plant one RK4 step.
 */
#pragma once

#include <cstdint>
#include <vector>

#include "fracbench/controllers.hpp"
#include "fracbench/plant.hpp"

namespace fracbench {

/// 2^3 design factor levels (0 = absent, 1 = present).
/// A: plant gain doubled; B: +-10% uniform measurement noise;
/// C: +0.2*setpoint load step on the control action from t >= 15 s.
struct FactorLevels {
    int a_gain_uncertainty = 0;
    int b_noise = 0;
    int c_disturbance = 0;
};

enum class PlantMode { LinearDesignModel, NonlinearWithLinearization };

struct SimConfig {
    double step = 0.01;
    double horizon = 30.0;
    double setpoint = 1.0;
    PlantMode plant_mode = PlantMode::LinearDesignModel;
    std::uint64_t seed = 42;
    FactorLevels factors;
    double disturbance_time = 15.0;
    bool anti_windup = false;

    std::size_t sample_count() const; // horizon/step + 1, validated
    void validate() const;
};

struct SimTrace {
    std::vector<double> time;
    std::vector<double> reference;
    std::vector<double> output;          // y
    std::vector<double> measured;        // y_m
    std::vector<double> error;           // r - y_m
    std::vector<double> control_raw;     // before clamping
    std::vector<double> control_applied; // clamped + disturbance
};

struct ResponseMetrics {
    double ise = 0.0;
    double step_std = 0.0;
    double control_mean = 0.0;
    double control_std = 0.0;
};

/// State-space realization of a TransferFunction's rational part
/// (controllable canonical form), advanced by RK4 with zero-order-hold
/// input. The dead time is handled by the caller's FIFO.
class LinearPlant {
  public:
    LinearPlant(const TransferFunction& tf, double step, double gain_scale = 1.0);

    double output() const { return num_ * x1_; }
    void advance(double u);

  private:
    double num_, b1_, b0_, step_;
    double x1_ = 0.0, x2_ = 0.0;
};

/// Closed-loop run of one controller against the given plant model.
SimTrace simulate(const ControllerParams& controller, const SimConfig& config,
                  const TransferFunction& plant = design_plant());

ResponseMetrics metrics(const SimTrace& trace);

/// First time after which |y - final| stays within band*|final|.
double settling_time(const std::vector<double>& time, const std::vector<double>& y,
                     double final_value, double band);

} // namespace fracbench
