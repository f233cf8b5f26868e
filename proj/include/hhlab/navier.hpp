#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "hhlab/errors.hpp"
#include "hhlab/grid.hpp"
#include "hhlab/liouville.hpp"
#include "hhlab/ode.hpp"
#include "hhlab/radial.hpp"
#include "hhlab/special.hpp"

namespace hhlab {

/// (-Delta)^m u = u^p + t in B_R with Navier data u = Delta u = ... = 0 on the sphere.
struct NavierProblem {
    HardyHenonParams params;
    double R = 1.0;

    void validate() const {
        params.validate();
        if (params.a != 0.0) throw DomainError("NavierProblem: the ball solver supports a = 0 only");
        if (!(R > 0.0)) throw DomainError("NavierProblem: R must be positive");
    }
    double diam() const { return 2.0 * R; }
    int n() const { return params.n; }
    int m() const { return params.m; }
};

struct SolverConfig {
    std::size_t nodes = 513;
    double tol = 1e-8;          // relative fixed-point residual
    double inner_tol = 1e-12;   // normalized-iteration step size at fixed amplitude
    int max_inner = 5000;
    int max_bisection = 200;
    int max_doublings = 60;
};

struct Certificate {
    std::string name;
    std::string tag;
    bool ok = false;
    double value = 0.0;
    double bound = 0.0;
};

struct NavierSolution {
    PolyharmonicState state;
    double residual = 0.0;
    double sup_norm = 0.0;
    double amplitude = 0.0;  // bracketing variable s at convergence
    int bisection_steps = 0;
    std::vector<Certificate> certificates;

    const RadialField& u() const { return state.u(); }
    bool all_ok() const {
        return std::all_of(certificates.begin(), certificates.end(), [](const Certificate& c) { return c.ok; });
    }
};

struct EigenPair {
    double lambda1 = 0.0;
    RadialField phi;       // sup-norm 1
    double residual = 0.0; // || G^m(lambda1 phi) - phi ||_inf
    int iterations = 0;
};

namespace detail {

inline RadialField navier_source(const RadialField& u, const NavierProblem& problem) {
    const double p = problem.params.p, t = problem.params.t;
    return u.map([p, t](double v) { return std::pow(std::max(v, 0.0), p) + t; });
}

inline double sup_diff(const RadialField& a, const RadialField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

}  // namespace detail

/// K_t(u) = G^m (u^p + t): the m-fold Dirichlet solve of the nonlinear source.
/// Fixed points are Navier solutions.
inline RadialField apply_K(const RadialField& u, const NavierProblem& problem) {
    problem.validate();
    if (u.min() < -1e-12 * std::max(1.0, u.sup_norm())) throw DomainError("apply_K: u must be nonnegative");
    return iterated_green(detail::navier_source(u, problem), problem.R, problem.n(), problem.m()).layers.front();
}

/// || u - K_t(u) ||_inf / || u ||_inf.
inline double fixed_point_residual(const RadialField& u, const NavierProblem& problem) {
    const double s = u.sup_norm();
    if (s == 0.0) throw ZeroField("fixed_point_residual: zero field");
    return detail::sup_diff(u, apply_K(u, problem)) / s;
}

/// (sqrt(2n) / diam)^{2m/(p-1)}: any positive solution has at least this sup-norm.
inline double rho_radius(const NavierProblem& problem) {
    problem.params.validate();
    return std::pow(std::sqrt(2.0 * problem.n()) / problem.diam(), 2.0 * problem.m() / (problem.params.p - 1.0));
}

/// First Navier eigenpair of (-Delta)^m on B_R by inverse power iteration on
/// the m-fold Green operator. On a ball this is mu_1^m with mu_1 the first
/// Dirichlet eigenvalue of -Delta.
inline EigenPair first_eigenpair(const NavierProblem& problem, const RadialGrid& grid, double tol = 1e-10,
                                 int max_iterations = 10000) {
    problem.params.validate();
    if (!(tol > 0.0)) throw DomainError("first_eigenpair: tol must be positive");
    const double R = problem.R;
    const int n = problem.n(), m = problem.m();
    RadialField phi = RadialField::sample(grid, [R](double r) { return 1.0 - (r / R) * (r / R); });
    EigenPair out;
    for (int it = 1; it <= max_iterations; ++it) {
        const RadialField psi = iterated_green(phi, R, n, m).layers.front();
        const double norm = psi.sup_norm();
        const RadialField next = (1.0 / norm) * psi;
        const double change = detail::sup_diff(next, phi);
        phi = next;
        out.lambda1 = 1.0 / norm;
        out.iterations = it;
        if (change < 0.1 * tol) {
            const RadialField back = iterated_green(out.lambda1 * phi, R, n, m).layers.front();
            out.residual = detail::sup_diff(back, phi);
            if (out.residual < tol) {
                out.phi = phi;
                return out;
            }
        }
    }
    throw NoConvergence("first_eigenpair: no convergence after " + std::to_string(max_iterations) + " iterations");
}

inline EigenPair first_eigenpair(const NavierProblem& problem, std::size_t nodes, double tol = 1e-10) {
    return first_eigenpair(problem, RadialGrid::uniform(0.0, problem.R, nodes), tol);
}

/// u'(r) <= tol ||u|| between consecutive nodes.
inline bool radial_monotonicity_check(const RadialField& u, double tol = 1e-12) {
    const double scale = std::max(u.sup_norm(), 1e-300);
    for (std::size_t i = 1; i < u.size(); ++i)
        if (u[i] - u[i - 1] > tol * scale) return false;
    return true;
}

inline bool radial_monotonicity_check(const NavierSolution& sol, double tol = 1e-12) {
    return radial_monotonicity_check(sol.u(), tol);
}

struct EnergyBound {
    double lhs;  // \int_B u^p phi
    double rhs;  // lambda1^{p/(p-1)} |B|
    bool ok;
};

/// Tests \int u^p phi <= lambda1^{p'} |B_R|, p' = p/(p-1).
inline EnergyBound energy_bound_check(const RadialField& u, const EigenPair& eig, const NavierProblem& problem) {
    const double p = problem.params.p;
    const int n = problem.n();
    const MonotoneCubic phi(eig.phi);
    const RadialField integrand = RadialField::sample(u.grid(), [&](double) { return 0.0; });
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = std::pow(std::max(u[i], 0.0), p) * phi(u.r(i));
    const double lhs = unit_sphere_area(n) * detail::radial_moment(RadialField(u.grid(), std::move(v)), n).back();
    const double rhs = std::pow(eig.lambda1, p / (p - 1.0)) * ball_volume(n, problem.R);
    return {lhs, rhs, lhs <= rhs * (1.0 + 1e-8)};
}

inline EnergyBound energy_bound_check(const NavierSolution& sol, const EigenPair& eig, const NavierProblem& problem) {
    return energy_bound_check(sol.u(), eig, problem);
}

/// Appends the energy-bound certificate to a solution.
inline void add_energy_certificate(NavierSolution& sol, const EigenPair& eig, const NavierProblem& problem) {
    const EnergyBound e = energy_bound_check(sol, eig, problem);
    sol.certificates.push_back({"energy_bound", "eq:3-41", e.ok, e.lhs, e.rhs});
}

/// Torsion function: -Delta h = 1 in B_R, h = 0 on the sphere.
inline RadialField torsion_function(const NavierProblem& problem, const RadialGrid& grid) {
    return poisson_solve_ball(RadialField::sample(grid, [](double) { return 1.0; }), problem.R, problem.n());
}

struct TorsionBound {
    bool ok;
    double sup;         // max h
    double bound;       // diam^2 / (2n)
    double zeta_margin; // min over the open ball of zeta - h, zeta(r) = (diam^2 - r^2)/(2n)
};

/// 0 <= h < zeta <= diam^2/(2n), zeta the comparison paraboloid about the center.
inline TorsionBound torsion_bound_check(const RadialField& h, const NavierProblem& problem) {
    const double d2 = problem.diam() * problem.diam();
    const double n = problem.n();
    TorsionBound out{true, h.sup_norm(), d2 / (2.0 * n), HUGE_VAL};
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double r = h.r(i);
        if (h[i] < -1e-14) out.ok = false;
        if (h[i] > out.bound) out.ok = false;
        const double zeta = (d2 - r * r) / (2.0 * n);
        out.zeta_margin = std::min(out.zeta_margin, zeta - h[i]);
    }
    if (!(out.zeta_margin > 0.0)) out.ok = false;
    return out;
}

/// Origin-centered inversion of a radial profile: ubar(s) = s^{2-n} u(1/s),
/// sampled on the reversed reciprocal grid. The grid must avoid r = 0.
inline RadialField kelvin_transform(const RadialField& u, int n) {
    if (!(u.grid().front() > 0.0)) throw DomainError("kelvin_transform: grid must stay away from r = 0");
    const std::size_t N = u.size();
    std::vector<double> s(N), v(N);
    for (std::size_t j = 0; j < N; ++j) {
        const std::size_t i = N - 1 - j;
        s[j] = 1.0 / u.r(i);
        v[j] = std::pow(s[j], 2.0 - n) * u[i];
    }
    return RadialField(RadialGrid(std::move(s)), std::move(v));
}

/// If -Delta u = f, then -Delta ubar(s) = s^{-n-2} f(1/s). Returns the sup of
/// the mismatch over the transformed grid (skipping `edge` nodes at each end),
/// relative to max(1, sup of the right-hand side).
inline double kelvin_pde_check(const RadialField& u, const RadialField& f, int n, int order = 4, std::size_t edge = 4) {
    if (f.size() != u.size()) throw DomainError("kelvin_pde_check: u and f must share a grid");
    const RadialField ubar = kelvin_transform(u, n);
    const RadialField lhs = radial_laplacian(ubar, n, order);
    const std::size_t N = u.size();
    double worst = 0.0, scale = 1.0;
    for (std::size_t j = edge; j + edge < N; ++j) {
        const double s = ubar.r(j);
        const double rhs = std::pow(s, -n - 2.0) * f[N - 1 - j];
        worst = std::max(worst, std::abs(lhs[j] - rhs));
        scale = std::max(scale, std::abs(rhs));
    }
    return worst / scale;
}

struct BlowupScaling {
    RadialField v;       // v(r) = u(lambda r) / M on the grid r_i / lambda
    double lambda;       // M^{(1-p)/(2m)}
    double amplitude;    // M = ||u||_inf
};

/// Blow-up normalization of a radial profile peaking at the origin:
/// v(x) = u(lambda x)/M with lambda = M^{(1-p)/(2m)}, so that
/// (-Delta)^m v = v^p + t / M^p on the dilated ball of radius R / lambda.
inline BlowupScaling blowup_normalize(const RadialField& u, const HardyHenonParams& params) {
    params.validate();
    const double M = u.sup_norm();
    if (!(M > 0.0)) throw ZeroField("blowup_normalize: zero field");
    const double lambda = std::pow(M, (1.0 - params.p) / (2.0 * params.m));
    std::vector<double> v(u.values());
    for (double& x : v) x /= M;
    return {RadialField(u.grid().scaled(1.0 / lambda), std::move(v)), lambda, M};
}

/// The problem solved by the normalized profile: same (n, m, p), ball radius
/// R / lambda, forcing t / M^p.
inline NavierProblem blowup_problem(const NavierProblem& problem, const BlowupScaling& b) {
    NavierProblem out = problem;
    out.R = problem.R / b.lambda;
    out.params.t = problem.params.t / std::pow(b.amplitude, problem.params.p);
    return out;
}

namespace detail {

struct AmplitudeProbe {
    double kappa;       // ||K_t(u)|| / s at the converged direction
    RadialField w;      // direction with sup-norm 1
};

/// Normalized Picard iteration u <- s K_t(u)/||K_t(u)|| at fixed amplitude s.
inline AmplitudeProbe probe_amplitude(double s, RadialField w, const NavierProblem& problem, const SolverConfig& cfg) {
    RadialField u = s * w;
    for (int it = 0; it < cfg.max_inner; ++it) {
        const RadialField v = apply_K(u, problem);
        const double nv = v.sup_norm();
        if (!(nv > 0.0) || !std::isfinite(nv)) throw NoConvergence("solve_positive: K(u) vanished or overflowed");
        const RadialField next = (s / nv) * v;
        const double change = sup_diff(next, u) / s;
        u = next;
        if (change < cfg.inner_tol) {
            const double kappa = apply_K(u, problem).sup_norm() / s;
            return {kappa, (1.0 / s) * u};
        }
    }
    throw NoConvergence("solve_positive: normalized iteration did not settle at amplitude " + std::to_string(s));
}

}  // namespace detail

/// Positive radial solution of the Navier problem on a uniform grid.
///
/// For an amplitude s the normalized map u <- s K_t(u)/||K_t(u)|| is iterated
/// to a direction w with K_t(s w) = kappa(s) s w. Small amplitudes give
/// kappa < 1 (the map contracts to 0), large ones kappa > 1; the bracket
/// starts at s = rho, where kappa < 1 is guaranteed for t = 0, and doubles
/// upward. False position with the Illinois modification on
/// (log s, log kappa) then drives kappa to 1. The trivial fixed point is
/// never returned since every probe has sup-norm s >= rho.
inline NavierSolution solve_positive(const NavierProblem& problem, const SolverConfig& cfg = {}) {
    problem.validate();
    if (2 * problem.m() < problem.n())
        throw DomainError("solve_positive: needs 2m >= n (order at least the dimension)");
    if (!(cfg.tol > 0.0) || !(cfg.inner_tol > 0.0)) throw DomainError("solve_positive: tolerances must be positive");
    const RadialGrid grid = RadialGrid::uniform(0.0, problem.R, cfg.nodes);
    const double rho = rho_radius(problem);

    RadialField w = iterated_green(RadialField::sample(grid, [](double) { return 1.0; }), problem.R, problem.n(),
                                   problem.m()).layers.front();
    w = (1.0 / w.sup_norm()) * w;

    double s_lo = rho;
    detail::AmplitudeProbe lo = detail::probe_amplitude(s_lo, w, problem, cfg);
    if (!(lo.kappa < 1.0))
        throw DegenerateBracket("solve_positive: K does not contract at the amplitude rho = " + std::to_string(rho));
    double s_hi = s_lo;
    detail::AmplitudeProbe hi = lo;
    int doublings = 0;
    while (hi.kappa <= 1.0) {
        if (++doublings > cfg.max_doublings)
            throw DegenerateBracket("solve_positive: no amplitude with kappa > 1 after " +
                                    std::to_string(cfg.max_doublings) + " doublings");
        s_lo = s_hi;
        lo = hi;
        s_hi *= 2.0;
        hi = detail::probe_amplitude(s_hi, hi.w, problem, cfg);
    }

    double x_lo = std::log(s_lo), x_hi = std::log(s_hi);
    double f_lo = std::log(lo.kappa), f_hi = std::log(hi.kappa);
    int side = 0;
    double s = s_hi;
    detail::AmplitudeProbe cur = hi;
    int steps = 0;
    for (;; ++steps) {
        if (steps >= cfg.max_bisection) throw NoConvergence("solve_positive: amplitude search did not converge");
        double x = (x_lo * f_hi - x_hi * f_lo) / (f_hi - f_lo);
        if (!(x > x_lo && x < x_hi)) x = 0.5 * (x_lo + x_hi);
        s = std::exp(x);
        cur = detail::probe_amplitude(s, cur.w, problem, cfg);
        const double f = std::log(cur.kappa);
        if (std::abs(f) < 1e-3 * cfg.tol || x_hi - x_lo < 1e-15) break;
        if (f < 0.0) {
            x_lo = x;
            f_lo = f;
            if (side == -1) f_hi *= 0.5;
            side = -1;
        } else {
            x_hi = x;
            f_hi = f;
            if (side == +1) f_lo *= 0.5;
            side = +1;
        }
    }

    NavierSolution sol;
    sol.amplitude = s;
    sol.bisection_steps = steps + 1;
    sol.state = iterated_green(detail::navier_source(s * cur.w, problem), problem.R, problem.n(), problem.m());
    const RadialField& u = sol.state.u();
    sol.sup_norm = u.sup_norm();
    sol.residual = fixed_point_residual(u, problem);

    sol.certificates.push_back({"fixed_point", "eq:4-30", sol.residual < cfg.tol, sol.residual, cfg.tol});

    double min_interior = HUGE_VAL, boundary = 0.0;
    for (const RadialField& layer : sol.state.layers) {
        for (std::size_t i = 0; i + 1 < layer.size(); ++i) min_interior = std::min(min_interior, layer[i]);
        boundary = std::max(boundary, std::abs(layer[layer.size() - 1]));
    }
    sol.certificates.push_back({"layers_positive", "eq:3-3", min_interior > 0.0, min_interior, 0.0});
    sol.certificates.push_back({"navier_boundary", "eq:tNavier", boundary <= 1e-10 * std::max(1.0, sol.sup_norm),
                                boundary, 1e-10 * std::max(1.0, sol.sup_norm)});
    const char* bound_tag = problem.params.regime() == OrderRegime::critical ? "eq:1.8" : "eq:1.10";
    sol.certificates.push_back({"lower_bound", bound_tag, sol.sup_norm >= rho - 1e-9, sol.sup_norm, rho});
    sol.certificates.push_back({"radial_monotonicity", "eq:3-50", radial_monotonicity_check(u), 0.0, 0.0});
    return sol;
}

struct ShootingSolution {
    std::vector<double> init;    // u_i(0), i = 0..m-1
    double boundary_residual;    // max_i |u_i(R)| relative to u(0)
    int iterations;
};

namespace detail {

inline std::vector<double> shoot_to_boundary(const std::vector<double>& init, const NavierProblem& problem,
                                             double rtol) {
    const int m = problem.m();
    std::vector<double> y(static_cast<std::size_t>(2 * m), 0.0);
    for (int i = 0; i < m; ++i) y[static_cast<std::size_t>(2 * i)] = init[static_cast<std::size_t>(i)];
    OdeOptions opt;
    opt.rtol = rtol;
    opt.atol = 1e-14 * std::max(1.0, std::abs(init[0]));
    opt.initial_step = 1e-4 * problem.R;
    double r = 0.0;
    const OdeStatus st = integrate_dopri(radial_system(problem.params), r, y, problem.R, opt,
                                         [](const StepData&) { return true; });
    if (st != OdeStatus::completed) throw IntegratorFailure("shooting_newton: integration to R failed");
    std::vector<double> out(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(2 * i)];
    return out;
}

/// Dense Gaussian elimination with partial pivoting; A is row-major k x k.
inline std::vector<double> solve_dense(std::vector<double> A, std::vector<double> b) {
    const std::size_t k = b.size();
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < k; ++r)
            if (std::abs(A[r * k + c]) > std::abs(A[piv * k + c])) piv = r;
        if (A[piv * k + c] == 0.0) throw NoConvergence("shooting_newton: singular Jacobian");
        for (std::size_t j = 0; j < k; ++j) std::swap(A[c * k + j], A[piv * k + j]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < k; ++r) {
            const double f = A[r * k + c] / A[c * k + c];
            for (std::size_t j = c; j < k; ++j) A[r * k + j] -= f * A[c * k + j];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(k);
    for (std::size_t c = k; c-- > 0;) {
        double s = b[c];
        for (std::size_t j = c + 1; j < k; ++j) s -= A[c * k + j] * x[j];
        x[c] = s / A[c * k + c];
    }
    return x;
}

}  // namespace detail

/// Independent route to the same solution: shoot the radial ODE system from
/// origin data (u(0), u_1(0), ...) and solve u_i(R) = 0 for all i by damped
/// Newton with a finite-difference Jacobian.
inline ShootingSolution shooting_newton(const NavierProblem& problem, std::vector<double> guess, double tol = 1e-10,
                                        int max_iterations = 100) {
    problem.validate();
    const std::size_t m = static_cast<std::size_t>(problem.m());
    if (guess.size() != m) throw DomainError("shooting_newton: need one initial value per layer");
    const double rtol = 1e-12;
    auto norm = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s = std::max(s, std::abs(x));
        return s;
    };
    std::vector<double> F = detail::shoot_to_boundary(guess, problem, rtol);
    for (int it = 1; it <= max_iterations; ++it) {
        const double scale = std::max(1.0, std::abs(guess[0]));
        if (norm(F) < tol * scale) return {guess, norm(F) / scale, it - 1};
        std::vector<double> J(m * m);
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<double> c = guess;
            const double h = 1e-7 * std::max(1.0, std::abs(c[j]));
            c[j] += h;
            const auto Fp = detail::shoot_to_boundary(c, problem, rtol);
            for (std::size_t i = 0; i < m; ++i) J[i * m + j] = (Fp[i] - F[i]) / h;
        }
        std::vector<double> rhs(m);
        for (std::size_t i = 0; i < m; ++i) rhs[i] = -F[i];
        const auto delta = detail::solve_dense(J, rhs);
        double step = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
            std::vector<double> trial = guess;
            for (std::size_t i = 0; i < m; ++i) trial[i] += step * delta[i];
            if (!(trial[0] > 0.0)) continue;
            const auto Ft = detail::shoot_to_boundary(trial, problem, rtol);
            if (norm(Ft) < norm(F)) {
                guess = trial;
                F = Ft;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    const double scale = std::max(1.0, std::abs(guess[0]));
    if (norm(F) < tol * scale) return {guess, norm(F) / scale, max_iterations};
    throw NoConvergence("shooting_newton: boundary conditions not met");
}

}  // namespace hhlab
