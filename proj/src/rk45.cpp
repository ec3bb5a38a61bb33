#include "igo/rk45.hpp"

#include <algorithm>
#include <cmath>

#include "igo/errors.hpp"

namespace igo {

namespace {

// Dormand–Prince tableau. Row 7 doubles as the 5th-order weights (FSAL).
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kC[7] = {0.0,     1.0 / 5, 3.0 / 10, 4.0 / 5,
                          8.0 / 9, 1.0,     1.0};
// Difference between the 5th- and 4th-order weights.
constexpr double kE[7] = {
    35.0 / 384 - 5179.0 / 57600,      0.0,
    500.0 / 1113 - 7571.0 / 16695,    125.0 / 192 - 393.0 / 640,
    -2187.0 / 6784 + 92097.0 / 339200, 11.0 / 84 - 187.0 / 2100,
    -1.0 / 40};

void check_finite(const std::vector<double>& v, double t, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw DivergedSample(std::string(what) + " non-finite at t=" +
                                 std::to_string(t));
        }
    }
}

}  // namespace

std::vector<double> rk45_integrate(const OdeField& field,
                                   std::vector<double> x0, double t0,
                                   double t1, double rtol, double atol) {
    if (!(rtol > 0.0) || !(atol > 0.0)) {
        throw ConfigError("rk45: tolerances must be positive");
    }
    if (t0 == t1) {
        throw ConfigError("rk45: empty integration interval");
    }
    const double dir = t1 > t0 ? 1.0 : -1.0;
    const std::size_t n = x0.size();

    double t = t0;
    std::vector<double> x = std::move(x0);
    check_finite(x, t, "state");

    std::vector<double> k[7];
    k[0] = field(x, t);
    check_finite(k[0], t, "field");

    double h = dir * std::min(0.01 * std::abs(t1 - t0), std::abs(t1 - t0));
    double err_prev = 1e-4;
    std::vector<double> stage(n), x_new(n);

    const std::size_t max_steps = 10'000'000;
    for (std::size_t step = 0; step < max_steps; ++step) {
        if (dir * (t - t1) >= 0.0) return x;
        if (std::abs(h) < 1e-12) {
            throw StepSizeUnderflow("rk45: step size " + std::to_string(h) +
                                    " at t=" + std::to_string(t));
        }
        bool last = false;
        if (dir * (t + h - t1) >= 0.0) {
            h = t1 - t;
            last = true;
        }

        for (int s = 1; s < 7; ++s) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < s; ++j) acc += kA[s][j] * k[j][i];
                stage[i] = x[i] + h * acc;
            }
            k[s] = field(stage, t + kC[s] * h);
            check_finite(k[s], t + kC[s] * h, "field");
        }
        // Stage 7 is evaluated at x_new (the c=1, b-row stage).
        x_new = stage;

        double err_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double diff = 0.0;
            for (int j = 0; j < 7; ++j) diff += kE[j] * k[j][i];
            diff *= h;
            const double sc =
                atol + rtol * std::max(std::abs(x[i]), std::abs(x_new[i]));
            err_sq += (diff / sc) * (diff / sc);
        }
        const double err = std::sqrt(err_sq / static_cast<double>(n));

        if (err <= 1.0) {
            t = last ? t1 : t + h;
            x = x_new;
            k[0] = k[6];  // FSAL
            const double e = std::max(err, 1e-10);
            const double fac =
                std::clamp(0.9 * std::pow(e, -0.17) * std::pow(err_prev, 0.04),
                           0.2, 5.0);
            err_prev = e;
            h *= fac;
        } else {
            const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
            h *= fac;
        }
    }
    throw DivergedSample("rk45: step budget exhausted before reaching t1");
}

}  // namespace igo
