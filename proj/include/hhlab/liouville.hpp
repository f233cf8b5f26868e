#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hhlab/errors.hpp"
#include "hhlab/kernels.hpp"
#include "hhlab/ode.hpp"
#include "hhlab/radial.hpp"
#include "hhlab/special.hpp"

namespace hhlab {

struct ShootConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    double blowup_threshold = 1e8;
    double sign_tolerance = 1e-10;
    double hardy_start = 1e-6;   // starting radius when a > 0
    int monitored_layers = -1;   // layers 0..monitored_layers-1 must stay positive; -1 = all
    bool record_trace = false;
    std::size_t max_trace = 4000;
    long max_steps = 5'000'000;

    ShootConfig halved() const {
        ShootConfig c = *this;
        c.rtol *= 0.5;
        c.atol *= 0.5;
        return c;
    }
};

struct TracePoint {
    double r;
    std::vector<double> layers;  // u_0 .. u_{m-1}
};

enum class OutcomeKind { blow_up, sign_loss, survived };

inline const char* to_string(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::blow_up: return "blow_up";
        case OutcomeKind::sign_loss: return "sign_loss";
        case OutcomeKind::survived: return "survived";
    }
    return "?";
}

struct ShootingOutcome {
    OutcomeKind kind = OutcomeKind::survived;
    int layer = -1;        // sign_loss only
    double r_star = 0.0;   // event radius; r_max for survivors
    double r_max = 0.0;
    std::vector<double> final_state;  // (u_0, u_0', u_1, u_1', ...) where integration stopped
    std::vector<TracePoint> trace;
};

namespace detail {

/// First-order form of the radial system: y = (u_0, u_0', ..., u_{m-1}, u_{m-1}'),
///   u_i'' + (n-1)/r u_i' = -u_{i+1},  u_{m-1}'' + (n-1)/r u_{m-1}' = -(u_+^p r^{-a} + t).
/// At r = 0 the regularized form u_i''(0) = -(source)/n is used.
inline auto radial_system(const HardyHenonParams& params) {
    return [params](double r, const std::vector<double>& y, std::vector<double>& dy) {
        const int m = params.m;
        const double n = params.n;
        for (int i = 0; i < m; ++i) {
            const std::size_t k = static_cast<std::size_t>(2 * i);
            double src;
            if (i + 1 < m) {
                src = y[k + 2];
            } else {
                const double u = std::max(y[0], 0.0);
                const double weight = params.a == 0.0 ? 1.0 : (r == 0.0 ? (params.a < 0 ? 0.0 : HUGE_VAL) : std::pow(r, -params.a));
                src = std::pow(u, params.p) * weight + params.t;
            }
            dy[k] = y[k + 1];
            dy[k + 1] = r == 0.0 ? -src / n : -(n - 1.0) / r * y[k + 1] - src;
        }
    };
}

}  // namespace detail

/// Integrates the radial system from an arbitrary state at r_start >= 0 out
/// to r_max and classifies the trajectory: BlowUp when |u| passes the
/// threshold or the step size collapses, SignLoss when a monitored layer
/// drops below -sign_tolerance, Survived otherwise. Non-finite values before
/// either event raise IntegratorFailure.
inline ShootingOutcome shoot_from(double r_start, std::vector<double> state, const HardyHenonParams& params,
                                  double r_max, const ShootConfig& cfg = {}) {
    params.validate();
    const int m = params.m;
    if (state.size() != static_cast<std::size_t>(2 * m)) throw DomainError("shoot_from: state must have 2m entries");
    if (!(r_max > r_start)) throw DomainError("shoot_from: r_max must exceed the start radius");
    const int monitored = cfg.monitored_layers < 0 ? m : std::min(cfg.monitored_layers, m);

    ShootingOutcome out;
    out.r_max = r_max;
    auto record = [&](double r, const std::vector<double>& y) {
        if (!cfg.record_trace) return;
        TracePoint tp{r, {}};
        for (int i = 0; i < m; ++i) tp.layers.push_back(y[static_cast<std::size_t>(2 * i)]);
        out.trace.push_back(std::move(tp));
    };

    for (int i = 0; i < monitored; ++i) {
        if (state[static_cast<std::size_t>(2 * i)] < -cfg.sign_tolerance) {
            out.kind = OutcomeKind::sign_loss;
            out.layer = i;
            out.r_star = r_start;
            out.final_state = state;
            record(r_start, state);
            return out;
        }
    }
    record(r_start, state);

    auto observer = [&](const StepData& step) {
        double best = HUGE_VAL;
        int best_layer = -1;
        OutcomeKind best_kind = OutcomeKind::survived;
        for (int i = 0; i < monitored; ++i) {
            const std::size_t k = static_cast<std::size_t>(2 * i);
            if ((*step.y1)[k] < -cfg.sign_tolerance) {
                const double rc = (*step.y0)[k] < -cfg.sign_tolerance ? step.r0 : step.crossing(k, -cfg.sign_tolerance);
                if (rc < best) {
                    best = rc;
                    best_layer = i;
                    best_kind = OutcomeKind::sign_loss;
                }
            }
        }
        if (std::abs((*step.y1)[0]) > cfg.blowup_threshold) {
            const double level = (*step.y1)[0] > 0 ? cfg.blowup_threshold : -cfg.blowup_threshold;
            const double rc = step.crossing(0, level);
            if (rc < best) {
                best = rc;
                best_layer = -1;
                best_kind = OutcomeKind::blow_up;
            }
        }
        if (best_kind != OutcomeKind::survived) {
            out.kind = best_kind;
            out.layer = best_layer;
            out.r_star = best;
            record(step.r1, *step.y1);
            return false;
        }
        if (cfg.record_trace) record(step.r1, *step.y1);
        return true;
    };

    OdeOptions opt;
    opt.rtol = cfg.rtol;
    opt.atol = cfg.atol;
    opt.max_steps = cfg.max_steps;
    opt.initial_step = std::min(1e-4, 1e-3 * (r_max - r_start));
    double r = r_start;
    const OdeStatus status = integrate_dopri(detail::radial_system(params), r, state, r_max, opt, observer);
    out.final_state = state;
    switch (status) {
        case OdeStatus::stopped:
            break;
        case OdeStatus::completed:
            out.kind = OutcomeKind::survived;
            out.r_star = r_max;
            break;
        case OdeStatus::step_underflow:
            out.kind = OutcomeKind::blow_up;
            out.r_star = r;
            break;
        case OdeStatus::non_finite:
            throw IntegratorFailure("shoot: non-finite state at r=" + std::to_string(r));
        case OdeStatus::max_steps:
            throw IntegratorFailure("shoot: step budget exhausted at r=" + std::to_string(r));
    }
    if (cfg.record_trace && out.trace.size() > cfg.max_trace) {
        const std::size_t stride = (out.trace.size() + cfg.max_trace - 1) / cfg.max_trace;
        std::vector<TracePoint> thin;
        for (std::size_t i = 0; i < out.trace.size(); i += stride) thin.push_back(out.trace[i]);
        if (thin.back().r != out.trace.back().r) thin.push_back(out.trace.back());
        out.trace = std::move(thin);
    }
    return out;
}

/// Initial state at the starting radius for origin data u_i(0) = init[i],
/// u_i'(0) = 0. For a <= 0 this is r = 0 itself; for 0 < a < 2 the start is
/// r0 = cfg.hardy_start with the Taylor terms
///   u_i(r0) = u_i(0) - u_{i+1}(0) r0^2 / (2n),
///   u_{m-1}(r0) = u_{m-1}(0) - u(0)^p r0^{2-a} / ((2-a)(n-a)) - t r0^2/(2n).
inline std::pair<double, std::vector<double>> origin_state(const std::vector<double>& init,
                                                           const HardyHenonParams& params, const ShootConfig& cfg) {
    const int m = params.m;
    const double n = params.n;
    if (init.size() != static_cast<std::size_t>(m)) throw DomainError("shoot: need one initial value per layer");
    if (!(init[0] > 0.0)) throw DomainError("shoot: u(0) must be positive");
    if (params.a >= 2.0) throw DomainError("shoot: origin data requires a < 2 (the top layer is unbounded otherwise)");
    std::vector<double> y(static_cast<std::size_t>(2 * m), 0.0);
    if (params.a <= 0.0) {
        for (int i = 0; i < m; ++i) y[static_cast<std::size_t>(2 * i)] = init[static_cast<std::size_t>(i)];
        return {0.0, y};
    }
    const double r0 = cfg.hardy_start, a = params.a;
    for (int i = 0; i < m; ++i) {
        const std::size_t k = static_cast<std::size_t>(2 * i);
        if (i + 1 < m) {
            const double next = init[static_cast<std::size_t>(i + 1)];
            y[k] = init[static_cast<std::size_t>(i)] - next * r0 * r0 / (2.0 * n);
            y[k + 1] = -next * r0 / n;
        } else {
            const double up = std::pow(init[0], params.p);
            y[k] = init[static_cast<std::size_t>(i)] - up * std::pow(r0, 2.0 - a) / ((2.0 - a) * (n - a)) -
                   params.t * r0 * r0 / (2.0 * n);
            y[k + 1] = -up * std::pow(r0, 1.0 - a) / (n - a) - params.t * r0 / n;
        }
    }
    return {r0, y};
}

/// Shooting from origin data (u(0), u_1(0), ..., u_{m-1}(0)) with zero slopes.
inline ShootingOutcome shoot(const std::vector<double>& init, const HardyHenonParams& params, double r_max,
                             const ShootConfig& cfg = {}) {
    params.validate();
    if (!(r_max > 0.0)) throw DomainError("shoot: r_max must be positive");
    auto [r0, y] = origin_state(init, params, cfg);
    return shoot_from(r0, std::move(y), params, r_max, cfg);
}

struct ScanCell {
    std::size_t index = 0;
    std::vector<double> init;
    std::optional<ShootingOutcome> outcome;
    std::string failure;  // integrator failure message, empty when the shot completed
    double quadratic_ratio = 0.0;  // u(r_max) / r_max^2 for survivors
};

struct ScanTally {
    std::size_t blow_up = 0;
    std::size_t sign_loss = 0;
    std::size_t survived = 0;
    std::size_t failed = 0;
    /// Survivors: every monitored layer stayed positive up to r_max.
    std::size_t all_positive_survivors() const { return survived; }
    std::size_t total() const { return blow_up + sign_loss + survived + failed; }
};

struct ScanResult {
    std::vector<ScanCell> cells;
    ScanTally tally;
};

/// Cartesian product of per-layer axes (first axis varies slowest); shots run
/// on `workers` threads and merge by cell index, so output order and values
/// do not depend on scheduling.
inline ScanResult scan(const std::vector<std::vector<double>>& axes, const HardyHenonParams& params, double r_max,
                       const ShootConfig& cfg = {}, unsigned workers = 1) {
    params.validate();
    if (axes.size() != static_cast<std::size_t>(params.m)) throw DomainError("scan: need one axis per layer");
    std::size_t total = axes.empty() ? 0 : 1;
    for (const auto& ax : axes) total *= ax.size();
    ScanResult res;
    res.cells.resize(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        std::vector<double> init(axes.size());
        for (std::size_t d = axes.size(); d-- > 0;) {
            init[d] = axes[d][rem % axes[d].size()];
            rem /= axes[d].size();
        }
        res.cells[idx].index = idx;
        res.cells[idx].init = std::move(init);
    }

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t idx = next++; idx < total; idx = next++) {
            ScanCell& cell = res.cells[idx];
            try {
                cell.outcome = shoot(cell.init, params, r_max, cfg);
                if (cell.outcome->kind == OutcomeKind::survived)
                    cell.quadratic_ratio = cell.outcome->final_state[0] / (r_max * r_max);
            } catch (const Error& e) {
                cell.failure = e.what();
            }
        }
    };
    workers = std::max(1u, workers);
    if (workers == 1 || total < 2) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    for (const auto& cell : res.cells) {
        if (!cell.outcome) { ++res.tally.failed; continue; }
        switch (cell.outcome->kind) {
            case OutcomeKind::blow_up: ++res.tally.blow_up; break;
            case OutcomeKind::sign_loss: ++res.tally.sign_loss; break;
            case OutcomeKind::survived: ++res.tally.survived; break;
        }
    }
    return res;
}

/// `count` equally spaced values on [lo, hi] (count >= 1).
inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> v;
    if (count == 0) return v;
    if (count == 1) return {lo};
    for (std::size_t i = 0; i < count; ++i) v.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    v.back() = hi;
    return v;
}

/// (n(n-2))^{(n-2)/4} (1 + r^2)^{-(n-2)/2}: the entire positive solution of
/// -Delta u = u^{(n+2)/(n-2)}.
inline double bubble_value(int n, double r) {
    return std::pow(n * (n - 2.0), (n - 2.0) / 4.0) * std::pow(1.0 + r * r, -(n - 2.0) / 2.0);
}

inline RadialField bubble_oracle(int n, const RadialGrid& grid) {
    if (n < 3) throw DomainError("bubble_oracle: n must be >= 3");
    return RadialField::sample(grid, [n](double r) { return bubble_value(n, r); });
}

struct RepresentationCheck {
    double potential_at_0;   // R_{2,n} |S^{n-1}| \int r f(r) dr over the grid
    double direct;           // u(0) of the decaying whole-space radial solve
    double tail_estimate;    // potential contribution beyond the grid, from a power-law fit of f
    bool truncation_dominated;  // tail_estimate above 1% of the value
};

/// Compares the Newtonian potential of a radial source at the origin with
/// the value at 0 of the radial whole-space solution of -Delta u = f.
inline RepresentationCheck representation_check(const RadialField& f, int n) {
    if (n < 3) throw DomainError("representation_check: n must be >= 3");
    const double kernel = riesz_constant(2.0, n) * unit_sphere_area(n);
    // \int r f dr is the n = 2 radial moment
    const double moment = detail::radial_moment(f, 2).back();
    RepresentationCheck out{};
    out.potential_at_0 = kernel * moment;
    out.direct = poisson_solve_whole_space(f, n)[0];

    const std::size_t N = f.size();
    const double r1 = f.r(N - 2), r2 = f.r(N - 1), f1 = f[N - 2], f2 = f[N - 1];
    if (f2 == 0.0) {
        out.tail_estimate = 0.0;
    } else if (f1 != 0.0 && (f1 > 0) == (f2 > 0) && r1 > 0.0) {
        const double q = -std::log(f2 / f1) / std::log(r2 / r1);
        out.tail_estimate = q > 2.0 ? kernel * f2 * r2 * r2 / (q - 2.0) : HUGE_VAL;
    } else {
        out.tail_estimate = HUGE_VAL;
    }
    out.truncation_dominated = !(std::abs(out.tail_estimate) <= 0.01 * std::abs(out.potential_at_0));
    return out;
}

}  // namespace hhlab
