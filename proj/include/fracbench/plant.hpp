/**
 * @file plant.hpp
 * @brief Two-tank nonlinear level system, its feedback-linearizing control
 *        law, and the second-order-plus-dead-time design model.
 */
#pragma once

#include <array>
#include <utility>

namespace fracbench {

/// Levels of the two non-interacting tanks. Both must stay nonnegative.
struct TankState {
    double x1 = 0.0;
    double x2 = 0.0;
};

/// Lie derivatives of the output map h(x) = x2 along the drift and input
/// fields, evaluated at one state.
struct LieBundle {
    double lfh = 0.0;   // l_f h
    double lf2h = 0.0;  // l_f^2 h
    double lglfh = 0.0; // l_g l_f h, > 0 for x1 > 0
};

/// Second-order-plus-dead-time model
///   G(s) = num * e^{-delay*s} / (s^2 + b1*s + b0),
/// also carried in time-constant form k/((tau1*s+1)(tau2*s+1)) with
/// tau1 >= tau2 > 0. The canonical design model keeps its stated pole
/// factorization, which rounds slightly differently from (b1, b0); all
/// frequency/time evaluation uses the polynomial form.
struct TransferFunction {
    double num = 1.0;
    double b1 = 2.0;
    double b0 = 1.0;
    double delay = 0.0;
    double tau1 = 1.0;
    double tau2 = 1.0;

    double dc_gain() const { return num / b0; }
    std::array<double, 2> poles() const { return {-1.0 / tau1, -1.0 / tau2}; }

    static TransferFunction from_time_constants(double dc_gain, double tau1,
                                                double tau2, double delay);
};

/// Tank dynamics of the two-tank system:
/// dx1 = -sqrt(x1) + u, dx2 = sqrt(x1) - sqrt(x2).
std::pair<double, double> tank_dynamics(const TankState& state, double u);

/// Closed-form Lie derivatives; requires x1 > 0 and x2 > 0.
LieBundle lie_bundle(const TankState& state);

/// Input-output linearizing state feedback with the fixed pole placement
/// (beta0 = 0.666, beta1 = 1.66):
///   u = 2*sqrt(x1) * [ -0.666*x2 - 1.66*(sqrt(x1)-sqrt(x2))
///                      + 0.5*sqrt(x1/x2) + v ].
double linearizing_control(const TankState& state, double v);

struct CharacteristicPolynomial {
    std::array<double, 3> coefficients; // {1, b1, b0}
    std::array<double, 2> roots;
};

/// Target closed-loop polynomial s^2 + 1.66 s + 0.666 and its stated
/// factored roots.
CharacteristicPolynomial characteristic_polynomial();

/// The canonical linearized design model 2 e^{-0.5 s}/(s^2 + 1.66 s + 0.666).
TransferFunction design_plant();

} // namespace fracbench
