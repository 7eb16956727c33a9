#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fracbench/plant.hpp"
#include "oracles.hpp"

using namespace fracbench;

TEST_CASE("tank dynamics") {
    auto [d1, d2] = tank_dynamics({1.0, 1.0}, 0.0);
    CHECK(d1 == doctest::Approx(-1.0));
    CHECK(d2 == doctest::Approx(0.0));

    std::tie(d1, d2) = tank_dynamics({4.0, 1.0}, 0.0);
    CHECK(d1 == doctest::Approx(-2.0));
    CHECK(d2 == doctest::Approx(1.0));

    std::tie(d1, d2) = tank_dynamics({0.0, 0.0}, 0.5);
    CHECK(d1 == doctest::Approx(0.5));
    CHECK(d2 == doctest::Approx(0.0));

    CHECK_THROWS_AS(tank_dynamics({-0.1, 1.0}, 0.0), std::domain_error);
}

TEST_CASE("lie bundle worked values") {
    auto b = lie_bundle({1.0, 1.0});
    CHECK(b.lfh == doctest::Approx(0.0));
    CHECK(b.lf2h == doctest::Approx(-0.5));
    CHECK(b.lglfh == doctest::Approx(0.5));

    b = lie_bundle({4.0, 1.0});
    CHECK(b.lfh == doctest::Approx(1.0));
    CHECK(b.lf2h == doctest::Approx(-1.0));
    CHECK(b.lglfh == doctest::Approx(0.25));

    b = lie_bundle({1.0, 4.0});
    CHECK(b.lfh == doctest::Approx(-1.0));
    CHECK(b.lf2h == doctest::Approx(-0.25));
    CHECK(b.lglfh == doctest::Approx(0.5));

    CHECK_THROWS_AS(lie_bundle({0.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(lie_bundle({1.0, 0.0}), std::domain_error);
}

TEST_CASE("lie derivatives match finite differences on a state grid") {
    const auto h = [](double, double x2) { return x2; };
    const auto lfh_field = [](double x1, double x2) {
        return std::sqrt(x1) - std::sqrt(x2);
    };
    for (double x1 = 0.25; x1 <= 4.0; x1 += 0.75) {
        for (double x2 = 0.25; x2 <= 4.0; x2 += 0.75) {
            const auto b = lie_bundle({x1, x2});
            const double f1 = -std::sqrt(x1);
            const double f2 = std::sqrt(x1) - std::sqrt(x2);
            // l_f h and l_g h from h(x) = x2
            const double lfh_fd = oracles::directional_derivative(h, x1, x2, f1, f2);
            const double lgh_fd = oracles::directional_derivative(h, x1, x2, 1.0, 0.0);
            CHECK(std::abs(b.lfh - lfh_fd) < 1e-6);
            CHECK(std::abs(lgh_fd) < 1e-9); // relative degree: l_g h == 0
            // l_f^2 h and l_g l_f h from l_f h
            const double lf2h_fd =
                oracles::directional_derivative(lfh_field, x1, x2, f1, f2);
            const double lglfh_fd =
                oracles::directional_derivative(lfh_field, x1, x2, 1.0, 0.0);
            CHECK(std::abs(b.lf2h - lf2h_fd) < 1e-6);
            CHECK(std::abs(b.lglfh - lglfh_fd) < 1e-6);
            CHECK(b.lglfh > 0.0);
        }
    }
}

TEST_CASE("linearizing control worked values") {
    CHECK(linearizing_control({1.0, 1.0}, 0.0) == doctest::Approx(-0.332));
    CHECK(linearizing_control({1.0, 1.0}, 0.666) == doctest::Approx(1.0));
    CHECK(linearizing_control({4.0, 4.0}, 0.0) == doctest::Approx(-8.656));
    CHECK_THROWS_AS(linearizing_control({0.0, 1.0}, 0.0), std::domain_error);
}

TEST_CASE("characteristic polynomial") {
    const auto cp = characteristic_polynomial();
    CHECK(cp.coefficients[0] == 1.0);
    CHECK(cp.coefficients[1] == doctest::Approx(1.66));
    CHECK(cp.coefficients[2] == doctest::Approx(0.666));
    CHECK(cp.roots[0] == doctest::Approx(-0.8471));
    CHECK(cp.roots[1] == doctest::Approx(-0.7864));
    CHECK(cp.roots[0] * cp.roots[1] == doctest::Approx(0.666).epsilon(2e-3));
}

TEST_CASE("design plant") {
    const auto tf = design_plant();
    CHECK(tf.dc_gain() == doctest::Approx(2.0 / 0.666));
    CHECK(tf.delay == 0.5);
    const auto poles = tf.poles();
    const auto roots = characteristic_polynomial().roots;
    CHECK(std::min(poles[0], poles[1]) == doctest::Approx(std::min(roots[0], roots[1])));
    CHECK(std::max(poles[0], poles[1]) == doctest::Approx(std::max(roots[0], roots[1])));
}

TEST_CASE("time-constant construction round trip") {
    const auto tf = TransferFunction::from_time_constants(3.0, 2.0, 0.5, 0.1);
    CHECK(tf.dc_gain() == doctest::Approx(3.0));
    CHECK(tf.b0 == doctest::Approx(1.0));
    CHECK(tf.b1 == doctest::Approx(2.5));
    CHECK(tf.num == doctest::Approx(3.0));
    CHECK_THROWS_AS(TransferFunction::from_time_constants(1.0, 0.5, 2.0, 0.0),
                    std::invalid_argument);
}

namespace {

struct NlRun {
    std::vector<double> t, y;
};

// Tanks under the linearizing law with a held synthetic input.
NlRun simulate_linearized_tanks(double v, double h, double t_end, TankState x0) {
    NlRun run;
    std::array<double, 2> x{x0.x1, x0.x2};
    const auto deriv = [v](const std::array<double, 2>& s) -> std::array<double, 2> {
        const TankState ts{std::max(s[0], 1e-300), std::max(s[1], 1e-300)};
        const double u = linearizing_control(ts, v);
        auto [d1, d2] = tank_dynamics(ts, u);
        return {d1, d2};
    };
    for (double t = 0.0; t <= t_end + 1e-9; t += h) {
        run.t.push_back(t);
        run.y.push_back(x[1]);
        x = oracles::rk4_step(x, h, deriv);
    }
    return run;
}

} // namespace

TEST_CASE("exact linearization reproduces the delay-free linear model") {
    const double h = 1e-3, r = 1.0;
    const double v = 0.666 * r;
    const auto nl = simulate_linearized_tanks(v, h, 30.0, {0.01, 0.01});

    // Linear reference ydd + 1.66 yd + 0.666 y = v with matched initial state
    // (y0 = x2(0), yd0 = lfh(x0) = 0).
    std::array<double, 2> x{0.01, 0.0};
    const auto deriv = [v](const std::array<double, 2>& s) -> std::array<double, 2> {
        return {s[1], -0.666 * s[0] - 1.66 * s[1] + v};
    };
    double sq = 0.0;
    for (std::size_t k = 0; k < nl.t.size(); ++k) {
        const double d = nl.y[k] - x[0];
        sq += d * d;
        x = oracles::rk4_step(x, h, deriv);
    }
    const double rms = std::sqrt(sq / nl.t.size());
    CHECK(rms < 1e-2);
    MESSAGE("linearization equivalence RMS = ", rms);
}

TEST_CASE("open-loop unit step: no overshoot, stated settling time") {
    const double h = 1e-3;
    std::array<double, 2> x{0.0, 0.0};
    const auto deriv = [](const std::array<double, 2>& s) -> std::array<double, 2> {
        auto [d1, d2] = tank_dynamics({std::max(s[0], 0.0), std::max(s[1], 0.0)}, 1.0);
        return {d1, d2};
    };
    std::vector<double> t, y;
    for (double tt = 0.0; tt <= 30.0 + 1e-9; tt += h) {
        t.push_back(tt);
        y.push_back(x[1]);
        x = oracles::rk4_step(x, h, deriv);
    }
    const double yf = 1.0; // steady state of u = 1
    double ymax = 0.0, settle_half_pct = 0.0, settle_two_pct = 0.0;
    for (double v : y) ymax = std::max(ymax, v);
    CHECK(ymax <= yf + 1e-9); // no overshoot
    for (std::size_t k = y.size(); k-- > 0;) {
        if (std::abs(y[k] - yf) > 0.005 * yf && settle_half_pct == 0.0)
            settle_half_pct = t[k + 1];
        if (std::abs(y[k] - yf) > 0.02 * yf) {
            settle_two_pct = t[k + 1];
            break;
        }
    }
    // The stated 14 s settling corresponds to a 0.5% band on this model; the
    // conventional 2% band settles earlier (reported for reference).
    CHECK(settle_half_pct == doctest::Approx(14.0).epsilon(1.5 / 14.0));
    MESSAGE("settling: 0.5% band = ", settle_half_pct, " s, 2% band = ", settle_two_pct,
            " s");
    CHECK(settle_two_pct < settle_half_pct);
}
