// Test-only oracles, independent of the library implementation paths they
// check: Gamma-function GL weights, the analytic fractional power rule,
// finite-difference Lie derivatives, a textbook discrete PID, plain RK4
// integrators, and a brute-force least-squares ANOVA decomposition.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

// (-1)^j * binom(alpha, j) via the Gamma function.
inline double gl_weight(double alpha, int j) {
    const double binom =
        std::tgamma(alpha + 1.0) /
        (std::tgamma(static_cast<double>(j) + 1.0) * std::tgamma(alpha - j + 1.0));
    return (j % 2 == 0 ? 1.0 : -1.0) * binom;
}

// D^alpha t^p = Gamma(p+1)/Gamma(p+1-alpha) * t^(p-alpha)
inline double frac_power_rule(double p, double alpha, double t) {
    return std::tgamma(p + 1.0) / std::tgamma(p + 1.0 - alpha) * std::pow(t, p - alpha);
}

// Directional derivative of a scalar field along a vector field by central
// differences.
inline double directional_derivative(const std::function<double(double, double)>& phi,
                                     double x1, double x2, double v1, double v2,
                                     double eps = 1e-6) {
    return (phi(x1 + eps * v1, x2 + eps * v2) - phi(x1 - eps * v1, x2 - eps * v2)) /
           (2.0 * eps);
}

// Textbook discrete PID: rectangular integral including the current sample,
// backward-difference derivative, zero history before the first sample.
class DiscretePid {
  public:
    DiscretePid(double k, double ti, double td, double h)
        : k_(k), ti_(ti), td_(td), h_(h) {}

    double step(double e) {
        sum_ += e;
        const double deriv = (e - prev_) / h_;
        prev_ = e;
        return k_ * (e + h_ * sum_ / ti_ + td_ * deriv);
    }

  private:
    double k_, ti_, td_, h_;
    double sum_ = 0.0, prev_ = 0.0;
};

// Fixed-step RK4 for a 2-state system with time-invariant input callback.
template <typename Deriv>
inline std::array<double, 2> rk4_step(const std::array<double, 2>& x, double h,
                                      const Deriv& f) {
    const auto k1 = f(x);
    const auto k2 = f({x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1]});
    const auto k3 = f({x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1]});
    const auto k4 = f({x[0] + h * k3[0], x[1] + h * k3[1]});
    return {x[0] + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            x[1] + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
}

// Gaussian elimination with partial pivoting.
inline std::vector<double> solve(std::vector<std::vector<double>> a,
                                 std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        if (a[col][col] == 0.0) throw std::runtime_error("singular system");
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

// Least-squares residual sum of squares of y against the given columns
// (intercept added), via the normal equations.
inline double regression_rss(const std::vector<std::vector<double>>& cols,
                             const std::vector<double>& y) {
    const std::size_t n = y.size();
    const std::size_t p = cols.size() + 1;
    std::vector<std::vector<double>> xtx(p, std::vector<double>(p, 0.0));
    std::vector<double> xty(p, 0.0);
    const auto col = [&](std::size_t j, std::size_t row) {
        return j == 0 ? 1.0 : cols[j - 1][row];
    };
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t r = 0; r < n; ++r) xtx[i][j] += col(i, r) * col(j, r);
        }
        for (std::size_t r = 0; r < n; ++r) xty[i] += col(i, r) * y[r];
    }
    const auto beta = solve(xtx, xty);
    double rss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double fit = 0.0;
        for (std::size_t j = 0; j < p; ++j) fit += beta[j] * col(j, r);
        rss += (y[r] - fit) * (y[r] - fit);
    }
    return rss;
}

// Effect sums of squares of a 2^3 design by model comparison: SS(effect) =
// RSS(model without the effect) - RSS(full model). Runs are (coded levels,
// response) pairs; codes are the 7 effect columns in A,B,AB,C,AC,BC,ABC
// order.
inline std::array<double, 7> regression_effect_ss(
    const std::vector<std::array<double, 7>>& codes, const std::vector<double>& y) {
    std::vector<std::vector<double>> full(7, std::vector<double>(y.size()));
    for (std::size_t r = 0; r < y.size(); ++r) {
        for (int e = 0; e < 7; ++e) full[e][r] = codes[r][e];
    }
    const double rss_full = regression_rss(full, y);
    std::array<double, 7> ss{};
    for (int drop = 0; drop < 7; ++drop) {
        std::vector<std::vector<double>> reduced;
        for (int e = 0; e < 7; ++e) {
            if (e != drop) reduced.push_back(full[e]);
        }
        ss[drop] = regression_rss(reduced, y) - rss_full;
    }
    return ss;
}

} // namespace oracles
