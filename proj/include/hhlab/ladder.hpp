#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hhlab/errors.hpp"
#include "hhlab/radial.hpp"

namespace hhlab {

/// Default starting exponent max{1, 2n/p}.
inline double default_alpha0(const HardyHenonParams& params) { return std::max(1.0, 2.0 * params.n / params.p); }

/// C0 = min{(1 + M)^{-a}, 1}.
inline double geometry_constant(double a, double M) {
    if (!(M >= 0.0)) throw DomainError("geometry_constant: M must be >= 0");
    return std::min(std::pow(1.0 + M, -a), 1.0);
}

/// One rung of the blow-up ladder. The amplitude is held as log(l) since
/// l_k grows doubly exponentially.
struct LadderState {
    int k = 0;
    double log_l = 0.0;
    double alpha = 1.0;
    double alpha0 = 1.0;
    double C0 = 1.0;
    double M = 0.0;
    HardyHenonParams params;

    static LadderState initial(const HardyHenonParams& params, double l0, double M, double alpha0) {
        params.validate();
        if (!(l0 > 0.0)) throw DomainError("LadderState: l0 must be positive");
        if (!(alpha0 >= 1.0)) throw DomainError("LadderState: alpha0 must be >= 1");
        LadderState s;
        s.log_l = std::log(l0);
        s.alpha = s.alpha0 = alpha0;
        s.C0 = geometry_constant(params.a, M);
        s.M = M;
        s.params = params;
        return s;
    }
    static LadderState initial(const HardyHenonParams& params, double l0, double M) {
        return initial(params, l0, M, default_alpha0(params));
    }
    /// Same, with the amplitude given as its logarithm.
    static LadderState initial_log(const HardyHenonParams& params, double log_l0, double M) {
        LadderState s = initial(params, 1.0, M);
        s.log_l = log_l0;
        return s;
    }
    /// Starts exactly at the divergence threshold for (M, alpha0).
    static LadderState at_threshold(const HardyHenonParams& params, double M, double alpha0);

    double l() const { return std::exp(log_l); }

    /// alpha_k p + 2n <= alpha_{k+1} = 2 alpha_k p, needed for the monomial
    /// bound to feed the next rung. Holds for every k once alpha0 >= 2n/p.
    bool exponent_inequality_holds() const { return alpha * params.p + 2.0 * params.n <= 2.0 * alpha * params.p; }
};

/// l_{k+1} = C0 l_k^p / (2 alpha_k p)^n,  alpha_{k+1} = 2 alpha_k p.
inline LadderState ladder_advance(const LadderState& s) {
    const double p = s.params.p;
    const int n = s.params.n;
    LadderState next = s;
    next.k = s.k + 1;
    next.log_l = std::log(s.C0) + p * s.log_l - n * std::log(2.0 * s.alpha * p);
    next.alpha = 2.0 * s.alpha * p;
    return next;
}

/// The same step in linear space; overflows to inf once l^p leaves the range.
inline double ladder_advance_direct(double l, double alpha, double C0, int n, double p) {
    return C0 * std::pow(l, p) / std::pow(2.0 * alpha * p, n);
}

/// log of the ladder's affine offset
///   A = (n p log(2p)/(p-1) - log C0 + n log alpha0) / (p-1).
/// The recurrence is log l_{k+1} - A - B(k+1) = p (log l_k - A - B k) with
/// B = n log(2p)/(p-1), so A is also the log of the divergence threshold.
inline double ladder_offset(const HardyHenonParams& params, double log_C0, double alpha0) {
    const double p = params.p, n = params.n;
    return (n * p * std::log(2.0 * p) / (p - 1.0) - log_C0 + n * std::log(alpha0)) / (p - 1.0);
}

inline double ladder_slope(const HardyHenonParams& params) {
    return params.n * std::log(2.0 * params.p) / (params.p - 1.0);
}

struct LadderClosedForm {
    double log_exact;  // log l_k
    double log_bound;  // B k + p^k (log l0 - A): the exact value minus A >= 0
};

/// Closed form of l_k in terms of the initial state s0 (k = 0):
///   log l_k = A + B k + p^k (log l0 - A).
/// Only the initial excess log l0 - A is amplified by p^k, so unlike
/// iterating the recurrence this stays accurate for large k near l0 = e^A.
inline LadderClosedForm ladder_closed_form(int k, const LadderState& s0) {
    if (k < 0) throw DomainError("ladder_closed_form: k must be >= 0");
    const double A = ladder_offset(s0.params, std::log(s0.C0), s0.alpha0);
    const double excess = s0.log_l - A;
    const double grown = k == 0 ? excess : std::pow(s0.params.p, k) * excess;
    LadderClosedForm out;
    out.log_bound = ladder_slope(s0.params) * k + grown;
    out.log_exact = k == 0 ? s0.log_l : A + out.log_bound;
    return out;
}

/// log of max{(1 + M)^{a/(p-1)}, 1} (2p)^{np/(p-1)^2} alpha0^{n/(p-1)}.
inline double log_divergence_threshold(const HardyHenonParams& params, double M, double alpha0) {
    params.validate();
    if (!(M >= 0.0)) throw DomainError("divergence_threshold: M must be >= 0");
    return ladder_offset(params, std::log(geometry_constant(params.a, M)), alpha0);
}

inline LadderState LadderState::at_threshold(const HardyHenonParams& params, double M, double alpha0) {
    LadderState s = initial(params, 1.0, M, alpha0);
    s.log_l = log_divergence_threshold(params, M, alpha0);
    return s;
}

inline double divergence_threshold(const HardyHenonParams& params, double M) {
    return std::exp(log_divergence_threshold(params, M, default_alpha0(params)));
}

/// Amplitude produced by one radial double integration of r^beta from 0:
/// -Delta u = r^beta with u(0) = 0 gives u = -r^{beta+2} / ((beta+2)(beta+n)).
inline double monomial_poisson_coefficient(double beta, int n) {
    if (!(beta > -n)) throw DomainError("monomial_poisson_coefficient: need beta > -n");
    if (beta == -2.0) throw DomainError("monomial_poisson_coefficient: beta = -2 is singular");
    return 1.0 / ((beta + 2.0) * (beta + n));
}

struct LadderRow {
    int k;
    double log_l;
    double alpha;
};

/// Runs the recurrence from s0 for `steps` steps, rows k = 0..steps.
inline std::vector<LadderRow> ladder_table(const LadderState& s0, int steps) {
    std::vector<LadderRow> rows;
    LadderState s = s0;
    rows.push_back({s.k, s.log_l, s.alpha});
    for (int i = 0; i < steps; ++i) {
        s = ladder_advance(s);
        rows.push_back({s.k, s.log_l, s.alpha});
    }
    return rows;
}

}  // namespace hhlab
