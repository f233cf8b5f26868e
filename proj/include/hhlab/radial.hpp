#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hhlab/errors.hpp"
#include "hhlab/fd.hpp"
#include "hhlab/grid.hpp"
#include "hhlab/quadrature.hpp"

namespace hhlab {

enum class OrderRegime { subcritical, critical, supercritical };

inline const char* to_string(OrderRegime r) {
    switch (r) {
        case OrderRegime::subcritical: return "subcritical";
        case OrderRegime::critical: return "critical";
        case OrderRegime::supercritical: return "supercritical";
    }
    return "?";
}

/// Coefficients of (-Delta)^m u = u^p / |x|^a + t in R^n.
struct HardyHenonParams {
    int n = 4;
    int m = 2;
    double a = 0.0;
    double p = 2.0;
    double t = 0.0;

    void validate() const {
        std::ostringstream os;
        if (n < 2) os << "n must be >= 2; ";
        if (m < 1) os << "m must be >= 1; ";
        if (!(a < n)) os << "a must be < n; ";
        if (!(p > 1.0)) os << "p must be > 1; ";
        if (!(t >= 0.0)) os << "t must be >= 0; ";
        if (!std::isfinite(a) || !std::isfinite(p) || !std::isfinite(t)) os << "parameters must be finite; ";
        if (!os.str().empty()) throw DomainError("HardyHenonParams: " + os.str());
    }

    /// critical iff 2m = n, super-critical iff 2m > n.
    OrderRegime regime() const {
        if (2 * m == n) return OrderRegime::critical;
        return 2 * m > n ? OrderRegime::supercritical : OrderRegime::subcritical;
    }

    /// Exponent s with u_lambda(x) = lambda^s u(lambda x) mapping solutions to
    /// solutions: (2m - a)/(p - 1), i.e. (n - a)/(p - 1) at critical order.
    double scaling_exponent() const { return (2.0 * m - a) / (p - 1.0); }
};

/// (u, u_1, ..., u_{m-1}) with u_i = (-Delta)^i u; layers[0] is u.
struct PolyharmonicState {
    std::vector<RadialField> layers;

    const RadialField& u() const { return layers.front(); }
    std::size_t order() const { return layers.size(); }
};

/// Returns -Delta f = -(f'' + (n-1)/r f') by Fornberg finite differences of
/// accuracy `order` (2, 4 or 6) on the grid nodes, uniform or not. Centered
/// stencils in the interior; near r = 0 with r_0 = 0 the profile is extended
/// evenly and the value at the origin is the regularized -n f''(0); at other
/// ends the stencil is shifted inward and widened by one node.
inline RadialField radial_laplacian(const RadialField& f, int n, int order = 2) {
    if (order != 2 && order != 4 && order != 6) throw DomainError("radial_laplacian: order must be 2, 4 or 6");
    const std::size_t N = f.size();
    const std::size_t k = static_cast<std::size_t>(order / 2);
    if (N < std::max<std::size_t>(5, 2 * k + 3))
        throw GridTooCoarse("radial_laplacian: need at least " + std::to_string(std::max<std::size_t>(5, 2 * k + 3)) +
                            " nodes");
    const RadialGrid& g = f.grid();
    const bool even_origin = g.front() == 0.0;
    std::vector<double> out(N), xs, vs;
    for (std::size_t i = 0; i < N; ++i) {
        xs.clear();
        vs.clear();
        const long li = static_cast<long>(i), lk = static_cast<long>(k), lN = static_cast<long>(N);
        if (li - lk < 0 && even_origin) {
            for (long j = li - lk; j <= li + lk; ++j) {
                const std::size_t aj = static_cast<std::size_t>(std::labs(j));
                xs.push_back((j < 0 ? -g[aj] : g[aj]) - g[i]);
                vs.push_back(f[aj]);
            }
        } else {
            long start = li - lk, width = 2 * lk + 1;
            if (start < 0) {
                start = 0;
                width += 1;
            } else if (li + lk > lN - 1) {
                width += 1;
                start = lN - width;
            }
            for (long j = start; j < start + width; ++j) {
                xs.push_back(g[static_cast<std::size_t>(j)] - g[i]);
                vs.push_back(f[static_cast<std::size_t>(j)]);
            }
        }
        const auto w = fornberg_weights(0.0, xs, 2);  // local coordinates keep the weights accurate
        double d1 = 0.0, d2 = 0.0;
        for (std::size_t j = 0; j < xs.size(); ++j) {
            d1 += w[1][j] * vs[j];
            d2 += w[2][j] * vs[j];
        }
        out[i] = g[i] == 0.0 ? -n * d2 : -(d2 + (n - 1.0) / g[i] * d1);
    }
    return RadialField(g, std::move(out));
}

/// Applies radial_laplacian `times` times: (-Delta)^times f.
inline RadialField iterated_laplacian(const RadialField& f, int n, int times, int order = 2) {
    RadialField out = f;
    for (int i = 0; i < times; ++i) out = radial_laplacian(out, n, order);
    return out;
}

namespace detail {

inline void check_source(const RadialField& f, int n) {
    if (n < 2) throw DomainError("radial Poisson solve: n must be >= 2");
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double w = f[i] * std::pow(f.r(i), n - 1.0);
        if (!std::isfinite(f[i]) || !std::isfinite(w))
            throw NonIntegrableSource("source is not integrable against r^{n-1} at r=" + std::to_string(f.r(i)));
    }
}

/// 4-node Lagrange stencil start covering cell [i, i+1].
inline std::size_t cubic_stencil(std::size_t i, std::size_t N) {
    if (i == 0) return 0;
    return std::min(i - 1, N - 4);
}

/// Lagrange interpolant through (x[0..3], y[0..3]) evaluated at t.
inline double lagrange4(const double* x, const double* y, double t) {
    double s = 0.0;
    for (int a = 0; a < 4; ++a) {
        double l = 1.0;
        for (int b = 0; b < 4; ++b)
            if (b != a) l *= (t - x[b]) / (x[a] - x[b]);
        s += l * y[a];
    }
    return s;
}

/// F_i = \int_0^{r_i} t^{n-1} f(t) dt by product integration of the piecewise
/// cubic interpolant of f (exact for cubic f). With r_0 > 0 the head
/// [0, r_0] is closed by a power-law fit f ~ c r^beta through the first two
/// nodes; beta <= -n means the source is not integrable at the origin.
inline std::vector<double> radial_moment(const RadialField& f, int n) {
    check_source(f, n);
    const RadialGrid& g = f.grid();
    const std::size_t N = g.size();
    if (N < 4) throw GridTooCoarse("radial_moment: need at least four nodes");
    std::vector<double> F(N, 0.0);
    if (g.front() > 0.0) {
        const double r0 = g[0], r1 = g[1];
        double beta = 0.0;
        if (f[0] != 0.0 && f[1] != 0.0 && (f[0] > 0) == (f[1] > 0)) beta = std::log(f[1] / f[0]) / std::log(r1 / r0);
        if (!(beta > -n))
            throw NonIntegrableSource("source behaves like r^" + std::to_string(beta) + " at the inner edge");
        F[0] = f[0] * std::pow(r0, n) / (n + beta);
    }
    const GaussRule& rule = gauss_legendre((n + 4) / 2 + 1);
    for (std::size_t i = 0; i + 1 < N; ++i) {
        const std::size_t s = cubic_stencil(i, N);
        const double* xs = &g.nodes()[s];
        const double* ys = &f.values()[s];
        const double lo = g[i], hi = g[i + 1];
        auto integrand = [&](double t) { return std::pow(t, n - 1.0) * lagrange4(xs, ys, t); };
        F[i + 1] = F[i] + gauss_integrate(integrand, lo, hi, rule);
    }
    return F;
}

/// Cumulative \int_{r_i}^{r_N} g by piecewise cubic interpolation.
inline std::vector<double> tail_integral(const RadialGrid& grid, const std::vector<double>& gv) {
    const std::size_t N = grid.size();
    std::vector<double> U(N, 0.0);
    const GaussRule& rule = gauss_legendre(2);
    for (std::size_t i = N - 1; i-- > 0;) {
        const std::size_t s = cubic_stencil(i, N);
        const double* xs = &grid.nodes()[s];
        const double* ys = &gv[s];
        auto integrand = [&](double t) { return lagrange4(xs, ys, t); };
        U[i] = U[i + 1] + gauss_integrate(integrand, grid[i], grid[i + 1], rule);
    }
    return U;
}

inline std::vector<double> flux_profile(const RadialGrid& grid, const std::vector<double>& F, int n) {
    std::vector<double> gv(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) gv[i] = grid[i] == 0.0 ? 0.0 : std::pow(grid[i], 1.0 - n) * F[i];
    return gv;
}

}  // namespace detail

/// Radial solution of -Delta u = f in B_R with u(R) = 0:
///   u(r) = \int_r^R s^{1-n} \int_0^s t^{n-1} f(t) dt ds.
/// The field's grid must end at R.
inline RadialField poisson_solve_ball(const RadialField& f, double R, int n) {
    if (!(R > 0.0)) throw DomainError("poisson_solve_ball: R must be positive");
    const RadialGrid& g = f.grid();
    if (std::abs(g.back() - R) > 1e-12 * R) throw DomainError("poisson_solve_ball: grid must end at R");
    const auto F = detail::radial_moment(f, n);
    const auto U = detail::tail_integral(g, detail::flux_profile(g, F, n));
    return RadialField(g, U);
}

/// Whole-space radial solution of -Delta u = f decaying at infinity (n >= 3),
/// with f taken as zero beyond the last node. The far-field contribution
/// F(r_N) r_N^{2-n} / (n - 2) is added to every node.
inline RadialField poisson_solve_whole_space(const RadialField& f, int n) {
    if (n < 3) throw DomainError("poisson_solve_whole_space: n must be >= 3");
    const RadialGrid& g = f.grid();
    const auto F = detail::radial_moment(f, n);
    auto U = detail::tail_integral(g, detail::flux_profile(g, F, n));
    const double far = F.back() * std::pow(g.back(), 2.0 - n) / (n - 2.0);
    for (double& v : U) v += far;
    return RadialField(g, std::move(U));
}

/// m-fold Dirichlet solve. layers[m-1] = G f and layers[i] = G layers[i+1],
/// so layers[0] is the final potential and layers[i] = (-Delta)^i layers[0];
/// every layer vanishes at R (Navier data).
inline PolyharmonicState iterated_green(const RadialField& f, double R, int n, int m) {
    if (m < 1) throw DomainError("iterated_green: m must be >= 1");
    std::vector<RadialField> layers(static_cast<std::size_t>(m));
    RadialField cur = f;
    for (int i = m - 1; i >= 0; --i) {
        cur = poisson_solve_ball(cur, R, n);
        layers[static_cast<std::size_t>(i)] = cur;
    }
    return PolyharmonicState{std::move(layers)};
}

/// Number of Gauss-Legendre nodes for the polar angle of a sphere average.
inline int polar_nodes(int n) { return static_cast<int>(std::ceil(20.0 + 5.0 * n)); }

/// Average of g(|x|) over the sphere of radius r whose center lies at distance
/// d from the origin:
///   \int_0^pi g(sqrt(d^2 + r^2 + 2 d r cos t)) sin^{n-2} t dt / \int_0^pi sin^{n-2} t dt.
/// Numerator and denominator share one quadrature, so constants average exactly.
template <class G>
double sphere_average(G&& g, double d, double r, int n) {
    if (n < 2) throw DomainError("sphere_average: n must be >= 2");
    if (!(d >= 0.0) || !(r >= 0.0)) throw DomainError("sphere_average: d and r must be >= 0");
    const GaussRule& rule = gauss_legendre(polar_nodes(n));
    const double half = 0.5 * std::numbers::pi;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double th = half * (rule.nodes[i] + 1.0);
        const double w = rule.weights[i] * (n == 2 ? 1.0 : std::pow(std::sin(th), n - 2.0));
        const double rho = std::sqrt(std::max(0.0, d * d + r * r + 2.0 * d * r * std::cos(th)));
        num += w * g(rho);
        den += w;
    }
    return num / den;
}

namespace detail {

inline void check_average_range(const RadialField& f, double d, double r) {
    const double lo = std::abs(d - r), hi = d + r;
    const double slack = 1e-12 * std::max(1.0, f.grid().back());
    if (lo < f.grid().front() - slack || hi > f.grid().back() + slack) {
        std::ostringstream os;
        os << "sphere average needs [" << lo << ", " << hi << "] but the field covers [" << f.grid().front()
           << ", " << f.grid().back() << "]";
        throw ExtrapolationError(os.str());
    }
}

}  // namespace detail

/// Re-centered spherical average of a radial profile (monotone cubic interpolation).
inline double recenter_average(const RadialField& f, double d, double r, int n) {
    detail::check_average_range(f, d, r);
    const MonotoneCubic interp(f);
    return sphere_average(interp, d, r, n);
}

/// avg(f^p) - avg(f)^p over the re-centered sphere; >= 0 up to rounding since
/// both averages use the same positive quadrature weights.
inline double jensen_gap(const RadialField& f, double p, double d, double r, int n) {
    if (!(p > 1.0)) throw DomainError("jensen_gap: p must be > 1");
    detail::check_average_range(f, d, r);
    const MonotoneCubic interp(f);
    auto checked = [&](double rho) {
        const double v = interp(rho);
        if (v < 0.0) throw DomainError("jensen_gap: profile is negative on the sphere");
        return v;
    };
    const double mean_pow = sphere_average([&](double rho) { return std::pow(checked(rho), p); }, d, r, n);
    const double mean = sphere_average(checked, d, r, n);
    return mean_pow - std::pow(mean, p);
}

struct WeightBounds {
    double lower;
    double upper;
};

/// Pointwise bounds of the Hardy weight |x|^{-a} over a sphere of radius r
/// centered at distance d: |x| ranges over [|d - r|, d + r]. For a >= 0 the
/// lower bound comes from the far point, for a < 0 from the near point.
inline WeightBounds hardy_weight_bounds(double a, double d, double r) {
    const double near = std::abs(d - r), far = d + r;
    auto w = [a](double s) {
        if (s == 0.0) return a > 0 ? std::numeric_limits<double>::infinity() : (a == 0 ? 1.0 : 0.0);
        return std::pow(s, -a);
    };
    if (a >= 0) return {w(far), w(near)};
    return {w(near), w(far)};
}

struct SingularSolution {
    double sigma;
    double C;
};

/// u = C |x|^{-sigma} with sigma = (2m - a)/(p - 1). Since
/// -Delta r^{-s} = s (n - 2 - s) r^{-s-2}, the m-fold operator produces
/// P = prod_{j<m} (sigma + 2j)(n - 2 - sigma - 2j) and C = P^{1/(p-1)};
/// returns nullopt when P <= 0.
inline std::optional<SingularSolution> singular_solution(const HardyHenonParams& params) {
    params.validate();
    const double sigma = params.scaling_exponent();
    if (!(sigma > 0.0)) throw DomainError("singular_solution: need 2m > a");
    double P = 1.0;
    for (int j = 0; j < params.m; ++j) P *= (sigma + 2.0 * j) * (params.n - 2.0 - sigma - 2.0 * j);
    if (!(P > 0.0)) return std::nullopt;
    return SingularSolution{sigma, std::pow(P, 1.0 / (params.p - 1.0))};
}

struct ProfileResidual {
    double sup_abs;  // max |(-Delta)^m u - u^p r^{-a}|
    double sup_rel;  // the same divided pointwise by u^p r^{-a}
};

/// Residual of a sampled profile under (-Delta)^m u - u^p r^{-a} - t, using
/// iterated finite differences of the given order; nodes outside
/// [eval_lo, eval_hi] are ignored so stencil edge effects stay out.
inline ProfileResidual profile_residual(const RadialField& u, const HardyHenonParams& params, double eval_lo,
                                        double eval_hi, int order = 2) {
    const RadialField L = iterated_laplacian(u, params.n, params.m, order);
    ProfileResidual res{0.0, 0.0};
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = u.r(i);
        if (r < eval_lo || r > eval_hi) continue;
        const double src = std::pow(std::max(u[i], 0.0), params.p) * std::pow(r, -params.a) + params.t;
        const double diff = std::abs(L[i] - src);
        res.sup_abs = std::max(res.sup_abs, diff);
        if (src != 0.0) res.sup_rel = std::max(res.sup_rel, diff / std::abs(src));
    }
    return res;
}

/// Residual of the exact singular profile C r^{-sigma} sampled with spacing h
/// on [lo, hi], padded on both sides so the nested stencils stay centered
/// inside the evaluation window.
inline ProfileResidual singular_residual(const HardyHenonParams& params, double lo, double hi, double h,
                                         int order = 6) {
    const auto sol = singular_solution(params);
    if (!sol) throw DomainError("singular_residual: no singular solution for these parameters");
    if (!(lo > 0.0 && hi > lo && h > 0.0)) throw DomainError("singular_residual: need 0 < lo < hi and h > 0");
    const double pad = h * params.m * (order / 2 + 1);
    if (!(lo - pad > 0.0)) throw DomainError("singular_residual: padding reaches r = 0; reduce h");
    const auto count = static_cast<std::size_t>(std::llround((hi - lo + 2.0 * pad) / h)) + 1;
    const RadialGrid grid = RadialGrid::uniform(lo - pad, hi + pad, count);
    const RadialField u = RadialField::sample(grid, [&](double r) { return sol->C * std::pow(r, -sol->sigma); });
    return profile_residual(u, params, lo - 1e-12, hi + 1e-12, order);
}

/// u_lambda(r) = lambda^s u(lambda r), s = params.scaling_exponent(), sampled
/// on the induced grid r_i / lambda so no interpolation is involved.
inline RadialField rescale(const RadialField& u, double lambda, const HardyHenonParams& params) {
    if (!(lambda > 0.0)) throw DomainError("rescale: lambda must be positive");
    const double factor = std::pow(lambda, params.scaling_exponent());
    std::vector<double> v(u.values());
    for (double& x : v) x *= factor;
    return RadialField(u.grid().scaled(1.0 / lambda), std::move(v));
}

}  // namespace hhlab
