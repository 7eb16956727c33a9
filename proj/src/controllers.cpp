#include "fracbench/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracbench/fracops.hpp"

namespace fracbench {

void ControllerParams::validate() const {
    if (!(k > 0.0)) throw std::invalid_argument("ControllerParams: k must be > 0");
    if (!(tau_i > 0.0)) throw std::invalid_argument("ControllerParams: tau_i must be > 0");
    if (tau_d < 0.0) throw std::invalid_argument("ControllerParams: tau_d must be >= 0");
    if (!(lambda > 0.0 && lambda < 2.0))
        throw std::invalid_argument("ControllerParams: lambda must be in (0, 2)");
    if (!(mu >= 0.0 && mu < 2.0))
        throw std::invalid_argument("ControllerParams: mu must be in [0, 2)");
}

FopidController::FopidController(ControllerParams params, double step,
                                 SaturationLimits limits, bool anti_windup)
    : params_(params), step_(step), limits_(limits), anti_windup_(anti_windup) {
    params_.validate();
    if (!(step_ > 0.0)) throw std::invalid_argument("FopidController: step must be > 0");
    wi_.push_back(1.0);
    wd_.push_back(1.0);
}

void FopidController::reset() {
    errors_.clear();
    integ_input_.clear();
    integ_sum_ = 0.0;
    last_raw_ = last_integral_ = last_derivative_ = 0.0;
}

double FopidController::step(double error) {
    if (!std::isfinite(error)) {
        throw std::invalid_argument("FopidController::step: non-finite error");
    }
    errors_.push_back(error);
    const std::size_t n = errors_.size();
    while (wi_.size() < n) {
        const double j = static_cast<double>(wi_.size());
        wi_.push_back(wi_.back() * (1.0 - (-params_.lambda + 1.0) / j));
        wd_.push_back(wd_.back() * (1.0 - (params_.mu + 1.0) / j));
    }

    // Conditional integration: while the output is pinned at a limit and the
    // error keeps pushing the same way, feed zero into the integral history.
    double integ_sample = error;
    if (anti_windup_ && n > 1) {
        const bool high = last_raw_ > limits_.high && error > 0.0;
        const bool low = last_raw_ < limits_.low && error < 0.0;
        if (high || low) integ_sample = 0.0;
    }
    integ_input_.push_back(integ_sample);

    double integral;
    if (params_.lambda == 1.0) {
        integ_sum_ += integ_sample;
        integral = step_ * integ_sum_;
    } else {
        double acc = 0.0;
        const double* e = integ_input_.data() + (n - 1);
        #pragma omp simd reduction(+ : acc)
        for (std::size_t j = 0; j < n; ++j) {
            acc += wi_[j] * e[-static_cast<std::ptrdiff_t>(j)];
        }
        integral = std::pow(step_, params_.lambda) * acc;
    }

    double derivative;
    if (params_.mu == 1.0) {
        const double prev = n > 1 ? errors_[n - 2] : 0.0;
        derivative = (error - prev) / step_;
    } else if (params_.mu == 0.0) {
        derivative = error;
    } else {
        double acc = 0.0;
        const double* e = errors_.data() + (n - 1);
        #pragma omp simd reduction(+ : acc)
        for (std::size_t j = 0; j < n; ++j) {
            acc += wd_[j] * e[-static_cast<std::ptrdiff_t>(j)];
        }
        derivative = std::pow(step_, -params_.mu) * acc;
    }

    last_integral_ = integral;
    last_derivative_ = derivative;
    last_raw_ = params_.k * (error + integral / params_.tau_i + params_.tau_d * derivative);
    return std::clamp(last_raw_, limits_.low, limits_.high);
}

std::complex<double> controller_frequency_response(const ControllerParams& params,
                                                   double omega) {
    if (!(omega > 0.0)) {
        throw std::invalid_argument("controller_frequency_response: omega must be > 0");
    }
    const std::complex<double> integral = s_power(-params.lambda, omega) / params.tau_i;
    const std::complex<double> derivative = params.tau_d * s_power(params.mu, omega);
    return params.k * (1.0 + integral + derivative);
}

ControllerParams simc_tune(const TransferFunction& plant, double tau_c) {
    if (plant.dc_gain() == 0.0) {
        throw std::invalid_argument("simc_tune: plant gain must be nonzero");
    }
    if (!(tau_c > 0.0)) {
        throw std::invalid_argument("simc_tune: tau_c must be > 0");
    }
    const double horizon = tau_c + plant.delay;
    ControllerParams p;
    p.k = plant.tau1 / (plant.dc_gain() * horizon);
    p.tau_i = std::min(plant.tau1, 4.0 * horizon);
    p.tau_d = plant.tau2;
    p.lambda = 1.0;
    p.mu = 1.0;
    return p;
}

const std::map<std::string, PresetEntry>& table1_presets() {
    static const std::map<std::string, PresetEntry> presets = {
        {"FOPID", {{0.46, 0.64, 3.2, 0.85, 0.67}, 0.73, 0.29}},
        {"SIMC PID", {{4.94, 10.2, 0.002, 1.0, 1.0}, 1.56, 0.76}},
        {"IOPID", {{0.76, 1.4, 0.003, 1.0, 1.0}, 0.82, 0.33}},
    };
    return presets;
}

const PresetEntry* find_preset(const std::string& name) {
    std::string key = name;
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    std::string canonical;
    if (key == "fopid") canonical = "FOPID";
    else if (key == "simc" || key == "simc pid" || key == "simc_pid") canonical = "SIMC PID";
    else if (key == "iopid") canonical = "IOPID";
    else canonical = name;
    const auto& all = table1_presets();
    auto it = all.find(canonical);
    return it == all.end() ? nullptr : &it->second;
}

} // namespace fracbench
