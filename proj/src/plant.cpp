#include "fracbench/plant.hpp"

#include <cmath>
#include <stdexcept>

namespace fracbench {

TransferFunction TransferFunction::from_time_constants(double dc_gain, double tau1,
                                                       double tau2, double delay) {
    if (!(tau1 >= tau2) || !(tau2 > 0.0)) {
        throw std::invalid_argument("TransferFunction: requires tau1 >= tau2 > 0");
    }
    if (delay < 0.0) {
        throw std::invalid_argument("TransferFunction: delay must be >= 0");
    }
    TransferFunction tf;
    tf.tau1 = tau1;
    tf.tau2 = tau2;
    tf.delay = delay;
    tf.b0 = 1.0 / (tau1 * tau2);
    tf.b1 = 1.0 / tau1 + 1.0 / tau2;
    tf.num = dc_gain * tf.b0;
    return tf;
}

std::pair<double, double> tank_dynamics(const TankState& state, double u) {
    if (state.x1 < 0.0 || state.x2 < 0.0) {
        throw std::domain_error("tank_dynamics: negative tank level");
    }
    const double s1 = std::sqrt(state.x1);
    const double s2 = std::sqrt(state.x2);
    return {-s1 + u, s1 - s2};
}

LieBundle lie_bundle(const TankState& state) {
    if (!(state.x1 > 0.0) || !(state.x2 > 0.0)) {
        throw std::domain_error("lie_bundle: singular at zero tank level");
    }
    const double s1 = std::sqrt(state.x1);
    const double s2 = std::sqrt(state.x2);
    LieBundle b;
    b.lfh = s1 - s2;
    b.lf2h = -0.5 * s1 / s2;
    b.lglfh = 0.5 / s1;
    return b;
}

double linearizing_control(const TankState& state, double v) {
    if (!(state.x1 > 0.0) || !(state.x2 > 0.0)) {
        throw std::domain_error("linearizing_control: singular at zero tank level");
    }
    const double s1 = std::sqrt(state.x1);
    const double s2 = std::sqrt(state.x2);
    return 2.0 * s1 * (-0.666 * state.x2 - 1.66 * (s1 - s2) + 0.5 * s1 / s2 + v);
}

CharacteristicPolynomial characteristic_polynomial() {
    return {{1.0, 1.66, 0.666}, {-0.8471, -0.7864}};
}

TransferFunction design_plant() {
    TransferFunction tf;
    tf.num = 2.0;
    tf.b1 = 1.66;
    tf.b0 = 0.666;
    tf.delay = 0.5;
    tf.tau1 = 1.0 / 0.7864;
    tf.tau2 = 1.0 / 0.8471;
    return tf;
}

} // namespace fracbench
