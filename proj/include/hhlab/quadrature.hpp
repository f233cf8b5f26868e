#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "hhlab/errors.hpp"

namespace hhlab {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

inline void legendre_with_derivative(int k, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= k; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = k * (x * p1 - p0) / (x * x - 1.0);
}

inline GaussRule compute_gauss_legendre(int k) {
    GaussRule rule;
    if (k == 1) {
        rule.nodes = {0.0};
        rule.weights = {2.0};
        return rule;
    }
    rule.nodes.resize(k);
    rule.weights.resize(k);
    for (int i = 0; i < (k + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (k + 0.5));
        double p = 0.0, dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            legendre_with_derivative(k, x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        legendre_with_derivative(k, x, p, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[k - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[k - 1 - i] = w;
    }
    if (k % 2 == 1) rule.nodes[k / 2] = 0.0;
    return rule;
}

}  // namespace detail

/// Cached k-point Gauss-Legendre rule. Thread-safe; references stay valid.
inline const GaussRule& gauss_legendre(int k) {
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(k);
    if (it == cache.end()) it = cache.emplace(k, detail::compute_gauss_legendre(k)).first;
    return it->second;
}

/// Fixed Gauss-Legendre sum of f over [a, b].
template <class F>
double gauss_integrate(F&& f, double a, double b, const GaussRule& rule) {
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-300;
    int max_intervals = 2000;  // the quadrature budget
    int order = 10;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
    bool converged = false;
};

/// Globally adaptive Gauss-Legendre. Each panel is estimated by one k-point
/// rule on the panel and on its two halves; the difference is the error
/// estimate and the panel with the largest estimate is split next.
template <class F>
QuadResult adaptive_integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
    const GaussRule& rule = gauss_legendre(opt.order);
    struct Panel {
        double a, b, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    auto make_panel = [&](double lo, double hi) {
        const double mid = 0.5 * (lo + hi);
        const double whole = gauss_integrate(f, lo, hi, rule);
        const double halves = gauss_integrate(f, lo, mid, rule) + gauss_integrate(f, mid, hi, rule);
        return Panel{lo, hi, halves, std::abs(whole - halves)};
    };

    std::priority_queue<Panel> panels;
    panels.push(make_panel(a, b));
    double total = panels.top().value, err = panels.top().error;
    QuadResult res;
    while (true) {
        if (err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
            res.converged = true;
            break;
        }
        if (static_cast<int>(panels.size()) >= opt.max_intervals) break;
        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) break;
        Panel left = make_panel(worst.a, mid), right = make_panel(mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }
    // Re-sum to drop the drift of the running totals.
    res.value = 0.0;
    res.error = 0.0;
    res.intervals = static_cast<int>(panels.size());
    while (!panels.empty()) {
        res.value += panels.top().value;
        res.error += panels.top().error;
        panels.pop();
    }
    if (!res.converged)
        res.converged = res.error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(res.value));
    return res;
}

/// As adaptive_integrate, but raises QuadratureFailure when the budget runs out.
template <class F>
double integrate_or_throw(F&& f, double a, double b, const QuadOptions& opt, const char* what) {
    QuadResult r = adaptive_integrate(f, a, b, opt);
    if (!r.converged)
        throw QuadratureFailure(std::string(what) + ": no convergence within " +
                                std::to_string(opt.max_intervals) + " panels (error estimate " +
                                std::to_string(r.error) + ")");
    return r.value;
}

}  // namespace hhlab
