#include "fracbench/simloop.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fracbench {

std::size_t SimConfig::sample_count() const {
    const double n = horizon / step;
    const double rounded = std::round(n);
    if (std::abs(n - rounded) > 1e-9 * std::max(1.0, std::abs(n))) {
        throw std::invalid_argument("SimConfig: horizon must be an integer number of steps");
    }
    return static_cast<std::size_t>(rounded) + 1;
}

void SimConfig::validate() const {
    if (!(step > 0.0)) throw std::invalid_argument("SimConfig: step must be > 0");
    if (!(horizon >= disturbance_time))
        throw std::invalid_argument("SimConfig: horizon must cover the disturbance time");
    (void)sample_count();
}

LinearPlant::LinearPlant(const TransferFunction& tf, double step, double gain_scale)
    : num_(tf.num * gain_scale), b1_(tf.b1), b0_(tf.b0), step_(step) {}

void LinearPlant::advance(double u) {
    const auto f = [this, u](double x1, double x2, double& d1, double& d2) {
        d1 = x2;
        d2 = -b0_ * x1 - b1_ * x2 + u;
    };
    double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
    f(x1_, x2_, k1a, k1b);
    f(x1_ + 0.5 * step_ * k1a, x2_ + 0.5 * step_ * k1b, k2a, k2b);
    f(x1_ + 0.5 * step_ * k2a, x2_ + 0.5 * step_ * k2b, k3a, k3b);
    f(x1_ + step_ * k3a, x2_ + step_ * k3b, k4a, k4b);
    x1_ += step_ / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    x2_ += step_ / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
}

namespace {

// Nonlinear tanks under the linearizing law, input gain optionally scaled.
// The law is re-evaluated at every RK4 stage with the synthetic input held.
class NonlinearClosedPlant {
  public:
    NonlinearClosedPlant(double step, double gain_scale)
        : step_(step), gain_scale_(gain_scale) {}

    double output() const { return state_.x2; }

    void advance(double v) {
        const auto f = [this, v](const TankState& s, double& d1, double& d2) {
            const double u = gain_scale_ * linearizing_control(s, v);
            auto [a, b] = tank_dynamics(s, u);
            d1 = a;
            d2 = b;
        };
        const auto at = [](const TankState& s, double c, double h, double d1, double d2) {
            return TankState{std::max(s.x1 + c * h * d1, 0.0),
                             std::max(s.x2 + c * h * d2, 0.0)};
        };
        double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
        f(state_, k1a, k1b);
        f(at(state_, 0.5, step_, k1a, k1b), k2a, k2b);
        f(at(state_, 0.5, step_, k2a, k2b), k3a, k3b);
        f(at(state_, 1.0, step_, k3a, k3b), k4a, k4b);
        state_.x1 = std::max(state_.x1 + step_ / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a), 0.0);
        state_.x2 = std::max(state_.x2 + step_ / 6.0 * (k1b + 2 * k2b + 2 * k3b + k4b), 0.0);
    }

  private:
    double step_;
    double gain_scale_;
    TankState state_{0.01, 0.01};
};

inline double uniform_pm(std::mt19937_64& rng, double amplitude) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53; // [0, 1)
    return amplitude * (2.0 * u - 1.0);
}

} // namespace

SimTrace simulate(const ControllerParams& controller, const SimConfig& config,
                  const TransferFunction& plant) {
    config.validate();
    controller.validate();

    const std::size_t n = config.sample_count();
    const double h = config.step;
    const std::size_t delay_samples =
        static_cast<std::size_t>(std::llround(plant.delay / h));
    const double gain_scale = config.factors.a_gain_uncertainty ? 2.0 : 1.0;

    SimTrace tr;
    tr.time.resize(n);
    tr.reference.resize(n);
    tr.output.resize(n);
    tr.measured.resize(n);
    tr.error.resize(n);
    tr.control_raw.resize(n);
    tr.control_applied.resize(n);

    FopidController ctl(controller, h, {}, config.anti_windup);
    LinearPlant lin(plant, h, gain_scale);
    NonlinearClosedPlant nl(h, gain_scale);
    const bool linear = config.plant_mode == PlantMode::LinearDesignModel;

    std::mt19937_64 rng(config.seed);
    std::vector<double> fifo(delay_samples, 0.0);
    std::size_t fifo_pos = 0;

    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * h;
        tr.time[k] = t;
        tr.reference[k] = config.setpoint;
        tr.output[k] = linear ? lin.output() : nl.output();

        const double eta = config.factors.b_noise ? uniform_pm(rng, 0.1) : 0.0;
        tr.measured[k] = tr.output[k] * (1.0 + eta);
        tr.error[k] = tr.reference[k] - tr.measured[k];

        const double u_sat = ctl.step(tr.error[k]);
        tr.control_raw[k] = ctl.last_raw();
        const double dist =
            (config.factors.c_disturbance && t >= config.disturbance_time)
                ? 0.2 * config.setpoint
                : 0.0;
        tr.control_applied[k] = u_sat + dist;

        double u_plant = tr.control_applied[k];
        if (delay_samples > 0) {
            u_plant = fifo[fifo_pos];
            fifo[fifo_pos] = tr.control_applied[k];
            fifo_pos = (fifo_pos + 1) % delay_samples;
        }
        if (k + 1 < n) {
            if (linear) lin.advance(u_plant);
            else nl.advance(u_plant);
        }
    }
    return tr;
}

ResponseMetrics metrics(const SimTrace& trace) {
    const std::size_t n = trace.time.size();
    if (n == 0) throw std::invalid_argument("metrics: empty trace");
    const double h = n > 1 ? trace.time[1] - trace.time[0] : 0.0;

    ResponseMetrics m;
    for (double e : trace.error) m.ise += e * e;
    m.ise *= h;

    const auto mean_of = [n](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(n);
    };
    const auto pop_std = [n, &mean_of](const std::vector<double>& v) {
        const double mu = mean_of(v);
        double s = 0.0;
        for (double x : v) s += (x - mu) * (x - mu);
        return std::sqrt(s / static_cast<double>(n));
    };
    m.step_std = pop_std(trace.output);
    m.control_mean = mean_of(trace.control_applied);
    m.control_std = pop_std(trace.control_applied);
    return m;
}

double settling_time(const std::vector<double>& time, const std::vector<double>& y,
                     double final_value, double band) {
    if (time.size() != y.size() || time.empty()) {
        throw std::invalid_argument("settling_time: bad arrays");
    }
    const double tol = band * std::abs(final_value);
    std::size_t idx = y.size();
    for (std::size_t k = y.size(); k-- > 0;) {
        if (std::abs(y[k] - final_value) > tol) break;
        idx = k;
    }
    return idx == y.size() ? time.back() : time[idx];
}

} // namespace fracbench
