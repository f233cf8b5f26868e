#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace hhlab {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 1e-4;
    double min_step_rel = 1e-14;  // step underflow below min_step_rel * max(|r|, 1e-6)
    long max_steps = 5'000'000;
};

enum class OdeStatus { completed, stopped, step_underflow, non_finite, max_steps };

/// Endpoint data of one accepted step, enough for cubic Hermite dense output.
struct StepData {
    double r0, r1;
    const std::vector<double>* y0;
    const std::vector<double>* dy0;
    const std::vector<double>* y1;
    const std::vector<double>* dy1;

    double eval(std::size_t i, double r) const {
        const double h = r1 - r0, t = (r - r0) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * (*y0)[i] + (t3 - 2 * t2 + t) * h * (*dy0)[i] +
               (-2 * t3 + 3 * t2) * (*y1)[i] + (t3 - t2) * h * (*dy1)[i];
    }

    /// First r in [r0, r1] where component i crosses `level` going from the
    /// r0 side, by bisection on the Hermite interpolant. Assumes a sign change.
    double crossing(std::size_t i, double level) const {
        double lo = r0, hi = r1;
        const double s0 = (*y0)[i] - level;
        // scan for the first sign change so multiple crossings inside one step resolve to the earliest
        const int probes = 16;
        for (int k = 1; k <= probes; ++k) {
            const double r = r0 + (r1 - r0) * k / probes;
            if ((eval(i, r) - level) * s0 <= 0.0) {
                hi = r;
                lo = r0 + (r1 - r0) * (k - 1) / probes;
                break;
            }
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            if ((eval(i, mid) - level) * s0 > 0.0) lo = mid;
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    }
};

/// Dormand-Prince 5(4) with FSAL and elementary step-size control. `rhs(r, y, dy)`
/// fills dy; `observer(step)` runs after every accepted step and returns
/// false to stop. On return `y` and `r` hold the last accepted point.
template <class Rhs, class Observer>
OdeStatus integrate_dopri(Rhs&& rhs, double& r, std::vector<double>& y, double r_end, const OdeOptions& opt,
                          Observer&& observer) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    const std::size_t dim = y.size();
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), tmp(dim), ynew(dim);
    rhs(r, y, k1);
    double h = std::min(opt.initial_step, r_end - r);
    long steps = 0;
    while (r < r_end) {
        if (++steps > opt.max_steps) return OdeStatus::max_steps;
        if (r + h > r_end) h = r_end - r;
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        rhs(r + c2 * h, tmp, k2);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(r + c3 * h, tmp, k3);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(r + c4 * h, tmp, k4);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(r + c5 * h, tmp, k5);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(r + h, tmp, k6);
        for (std::size_t i = 0; i < dim; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(r + h, ynew, k7);

        double err = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < dim; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (e / sc) * (e / sc);
            if (!std::isfinite(ynew[i]) || !std::isfinite(k7[i])) finite = false;
        }
        err = std::sqrt(err / static_cast<double>(dim));
        if (!finite) err = 1e10;

        if (err <= 1.0) {
            const double r_new = r + h;
            StepData step{r, r_new, &y, &k1, &ynew, &k7};
            const bool go_on = observer(step);
            r = r_new;
            std::swap(y, ynew);
            std::swap(k1, k7);
            if (!go_on) return OdeStatus::stopped;
            const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h *= fac;
        } else {
            if (!finite && h < opt.min_step_rel * std::max(std::abs(r), 1e-6)) return OdeStatus::non_finite;
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
        }
        if (r < r_end && h < opt.min_step_rel * std::max(std::abs(r), 1e-6)) return OdeStatus::step_underflow;
    }
    return OdeStatus::completed;
}

}  // namespace hhlab
