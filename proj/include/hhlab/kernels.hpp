#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hhlab/errors.hpp"
#include "hhlab/quadrature.hpp"
#include "hhlab/special.hpp"

namespace hhlab {

/// Normalizing constant of the Riesz potential of order alpha in R^n:
///   Gamma((n - alpha)/2) / (pi^{n/2} 2^alpha Gamma(alpha/2)).
inline double riesz_constant(double alpha, int n) {
    if (n < 1 || !(alpha > 0.0 && alpha < n))
        throw DomainError("riesz_constant: need 0 < alpha < n (alpha=" + std::to_string(alpha) +
                          ", n=" + std::to_string(n) + ")");
    // log-gamma keeps large n finite
    const double log_c = std::lgamma(0.5 * (n - alpha)) - 0.5 * n * std::log(std::numbers::pi) -
                         alpha * std::numbers::ln2 - std::lgamma(0.5 * alpha);
    return std::exp(log_c);
}

struct RieszKernel {
    double alpha;
    int n;
    double constant;

    RieszKernel(double alpha_, int n_) : alpha(alpha_), n(n_), constant(riesz_constant(alpha_, n_)) {}

    /// R_{alpha,n} |x - y|^{alpha - n} as a function of the distance.
    double operator()(double distance) const {
        if (!(distance > 0.0)) throw DomainError("RieszKernel: zero distance");
        return constant * std::pow(distance, alpha - n);
    }
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace detail

/// Dirichlet Green's function of -Delta on the ball B_R(0) in R^n, n >= 3.
/// Zero when either point lies outside the open ball. The reflected factor
/// |x| |R x/|x|^2 - y/R| is evaluated as sqrt(R^2 - 2 x.y + |x|^2 |y|^2 / R^2),
/// which is R at x = 0 without a special case.
inline double green_ball(std::span<const double> x, std::span<const double> y, double R) {
    const int n = static_cast<int>(x.size());
    if (n < 3 || y.size() != x.size()) throw DomainError("green_ball: need matching points with n >= 3");
    if (!(R > 0.0)) throw DomainError("green_ball: radius must be positive");
    const double xx = detail::dot(x, x), yy = detail::dot(y, y);
    if (xx >= R * R || yy >= R * R) return 0.0;
    const double d = detail::distance(x, y);
    if (d == 0.0) throw DomainError("green_ball: x == y");
    const double reflected = std::sqrt(std::max(0.0, R * R - 2.0 * detail::dot(x, y) + xx * yy / (R * R)));
    const double c = riesz_constant(2.0, n);
    return c * (std::pow(d, 2.0 - n) - std::pow(reflected, 2.0 - n));
}

struct BallGreen {
    double radius;
    int n;

    BallGreen(double R, int n_) : radius(R), n(n_) {
        if (!(R > 0.0) || n < 3) throw DomainError("BallGreen: need R > 0 and n >= 3");
    }
    double operator()(std::span<const double> x, std::span<const double> y) const {
        if (static_cast<int>(x.size()) != n) throw DomainError("BallGreen: dimension mismatch");
        return green_ball(x, y, radius);
    }
};

struct ComposeResult {
    double lhs;  // quadrature of the convolution of the two kernels
    double rhs;  // closed form R_{a1+a2,n} |x - z|^{a1+a2-n}
};

/// Numerical check of the Riesz semigroup identity
///   \int R_{a1}|x-y|^{a1-n} R_{a2}|y-z|^{a2-n} dy = R_{a1+a2}|x-z|^{a1+a2-n}.
///
/// The integrand depends on y only through (|y - x|, angle to the x->z axis),
/// so the n-dimensional integral reduces to two dimensions. R^n is split into
///   A: the ball of radius d/2 about x, in polar coordinates about x,
///   B: the ball of radius d/2 about z, in polar coordinates about z,
///   C: the rest, in polar coordinates about x, with an annular shell
///      d/2 <= rho <= 3d/2 that excludes B, and an unbounded tail.
/// In A and B the radial substitution rho = (d/2) s^{1/alpha} turns
/// rho^{alpha-1} d rho into a constant times ds; in the tail
/// rho = (3d/2) s^{-1/gamma}, gamma = n - a1 - a2, does the same at infinity.
/// `quadrature_budget` caps the panels of every adaptive 1-D integration.
inline ComposeResult riesz_compose_check(double alpha1, double alpha2, std::span<const double> x,
                                         std::span<const double> z, int n, int quadrature_budget = 400) {
    if (n < 2) throw DomainError("riesz_compose_check: n >= 2 required");
    if (static_cast<int>(x.size()) != n || static_cast<int>(z.size()) != n)
        throw DomainError("riesz_compose_check: point dimension mismatch");
    if (!(alpha1 > 0 && alpha1 < n && alpha2 > 0 && alpha2 < n && alpha1 + alpha2 < n))
        throw DomainError("riesz_compose_check: need alpha1, alpha2, alpha1 + alpha2 in (0, n)");
    const double d = detail::distance(x, z);
    if (d == 0.0) throw DomainError("riesz_compose_check: x == z");

    const double c1 = riesz_constant(alpha1, n), c2 = riesz_constant(alpha2, n);
    const double gamma = n - alpha1 - alpha2;
    const double sphere_factor = (n == 2) ? 2.0 : unit_sphere_area(n - 1);  // |S^{n-2}|
    const double weight_exp = n - 2.0;

    QuadOptions inner{1e-11, 1e-300, quadrature_budget, 10};
    QuadOptions outer{1e-9, 1e-300, quadrature_budget, 10};

    auto sin_weight = [&](double th) { return weight_exp == 0.0 ? 1.0 : std::pow(std::sin(th), weight_exp); };

    // angular integral of |y - other|^{alpha - n} sin^{n-2} over theta in [lo, pi]
    // where |y - other|^2 = rho^2 + d^2 + sign * 2 rho d cos(theta)
    auto angular = [&](double rho, double alpha, double sign, double lo) {
        auto g = [&](double th) {
            const double q2 = rho * rho + d * d + sign * 2.0 * rho * d * std::cos(th);
            return std::pow(std::max(q2, 1e-300), 0.5 * (alpha - n)) * sin_weight(th);
        };
        return integrate_or_throw(g, lo, std::numbers::pi, inner, "riesz_compose_check(angular)");
    };

    const double half = 0.5 * d;

    // Region A: rho = half * s^{1/alpha1}, rho^{alpha1-1} d rho = half^{alpha1}/alpha1 ds.
    auto region_a = [&](double s) {
        const double rho = half * std::pow(s, 1.0 / alpha1);
        return angular(rho, alpha2, -1.0, 0.0);
    };
    const double a_val = c1 * c2 * std::pow(half, alpha1) / alpha1 *
                         integrate_or_throw(region_a, 0.0, 1.0, outer, "riesz_compose_check(A)");

    // Region B: polar about z; |y - x|^2 = sigma^2 + d^2 + 2 sigma d cos(theta).
    auto region_b = [&](double s) {
        const double sigma = half * std::pow(s, 1.0 / alpha2);
        return angular(sigma, alpha1, +1.0, 0.0);
    };
    const double b_val = c1 * c2 * std::pow(half, alpha2) / alpha2 *
                         integrate_or_throw(region_b, 0.0, 1.0, outer, "riesz_compose_check(B)");

    // Region C shell: rho in [d/2, 3d/2] via rho = d/2 + d (1 - cos(pi v))/2,
    // which smooths the square-root behaviour of the excluded cap at both ends.
    auto region_c_shell = [&](double v) {
        const double rho = half + 0.5 * d * (1.0 - std::cos(std::numbers::pi * v));
        const double drho = 0.5 * d * std::numbers::pi * std::sin(std::numbers::pi * v);
        const double cstar = (rho * rho + 0.75 * d * d) / (2.0 * rho * d);
        const double lo = cstar >= 1.0 ? 0.0 : std::acos(cstar);
        return std::pow(rho, alpha1 - 1.0) * angular(rho, alpha2, -1.0, lo) * drho;
    };
    const double c_shell = c1 * c2 * integrate_or_throw(region_c_shell, 0.0, 1.0, outer, "riesz_compose_check(C)");

    // Region C tail: rho = 1.5 d s^{-1/gamma}; rho^{-gamma-1} d rho = (1.5d)^{-gamma}/gamma ds.
    const double far_limit = polar_weight_integral(n);
    auto region_c_tail = [&](double s) {
        const double rho = 1.5 * d * std::pow(s, -1.0 / gamma);
        if (!std::isfinite(rho) || rho > 1e12 * d) return far_limit;
        return std::pow(rho, n - alpha2) * angular(rho, alpha2, -1.0, 0.0);
    };
    const double c_tail = c1 * c2 * std::pow(1.5 * d, -gamma) / gamma *
                          integrate_or_throw(region_c_tail, 0.0, 1.0, outer, "riesz_compose_check(tail)");

    ComposeResult out;
    out.lhs = sphere_factor * (a_val + b_val + c_shell + c_tail);
    out.rhs = riesz_constant(alpha1 + alpha2, n) * std::pow(d, alpha1 + alpha2 - n);
    return out;
}

/// Riesz potential \int R_{alpha,n} |x - y|^{alpha-n} f(|y|) dy of a radial
/// source supported in [0, support], evaluated at a point with |x| = x_norm.
inline double riesz_potential_radial(double alpha, int n, const std::function<double(double)>& f,
                                     double x_norm, double support, int quadrature_budget = 400) {
    const double c = riesz_constant(alpha, n);
    if (!(support > 0.0)) throw DomainError("riesz_potential_radial: support must be positive");
    QuadOptions opt{1e-11, 1e-300, quadrature_budget, 10};
    if (x_norm == 0.0) {
        auto g = [&](double r) { return std::pow(r, alpha - 1.0) * f(r); };
        return c * unit_sphere_area(n) * integrate_or_throw(g, 0.0, support, opt, "riesz_potential_radial");
    }
    const double sphere_factor = (n == 2) ? 2.0 : unit_sphere_area(n - 1);
    auto shell = [&](double rho) {
        if (rho == 0.0) return 0.0;
        auto g = [&](double th) {
            const double q2 = rho * rho + x_norm * x_norm - 2.0 * rho * x_norm * std::cos(th);
            const double w = n == 2 ? 1.0 : std::pow(std::sin(th), n - 2.0);
            return std::pow(std::max(q2, 1e-300), 0.5 * (alpha - n)) * w;
        };
        return std::pow(rho, n - 1.0) * f(rho) *
               integrate_or_throw(g, 0.0, std::numbers::pi, opt, "riesz_potential_radial(angular)");
    };
    double total = 0.0;
    const double split = std::min(x_norm, support);
    total += integrate_or_throw(shell, 0.0, split, opt, "riesz_potential_radial");
    if (split < support) total += integrate_or_throw(shell, split, support, opt, "riesz_potential_radial");
    return c * sphere_factor * total;
}

struct ComposeSample {
    double alpha1;
    double alpha2;
    int n;
    std::vector<double> x;
    std::vector<double> z;
};

/// Reproducible admissible configurations for riesz_compose_check: orders
/// with alpha1, alpha2 >= 0.4 and alpha1 + alpha2 <= n - 0.4, points in the
/// cube [-1, 1]^n at distance >= 0.2.
inline std::vector<ComposeSample> random_compose_samples(std::uint64_t seed, std::size_t count,
                                                         const std::vector<int>& dims = {4, 5}) {
    if (dims.empty()) throw DomainError("random_compose_samples: no dimensions given");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<ComposeSample> out;
    for (std::size_t i = 0; i < count; ++i) {
        ComposeSample s;
        s.n = dims[i % dims.size()];
        const double room = s.n - 1.2;
        s.alpha1 = 0.4 + room * unit(rng);
        s.alpha2 = 0.4 + (s.n - 0.4 - s.alpha1 - 0.4) * unit(rng);
        do {
            s.x.assign(static_cast<std::size_t>(s.n), 0.0);
            s.z.assign(static_cast<std::size_t>(s.n), 0.0);
            for (int j = 0; j < s.n; ++j) {
                s.x[static_cast<std::size_t>(j)] = 2.0 * unit(rng) - 1.0;
                s.z[static_cast<std::size_t>(j)] = 2.0 * unit(rng) - 1.0;
            }
        } while (detail::distance(s.x, s.z) < 0.2);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace hhlab
