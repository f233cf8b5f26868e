#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hhlab/ladder.hpp"
#include "hhlab/radial.hpp"

using namespace hhlab;

TEST(Ladder, FirstStep) {
    const HardyHenonParams p{4, 2, 0, 2, 0};
    const LadderState s0 = LadderState::initial(p, 1.0, 0.0, 1.0);
    const LadderState s1 = ladder_advance(s0);
    EXPECT_EQ(s1.k, 1);
    EXPECT_NEAR(s1.l(), 1.0 / 256.0, 1e-16);
    EXPECT_DOUBLE_EQ(s1.alpha, 4.0);
    EXPECT_DOUBLE_EQ(s1.C0, 1.0);
}

TEST(Ladder, ExponentsAreGeometric) {
    const HardyHenonParams p{4, 2, 0, 2, 0};
    LadderState s = LadderState::initial(p, 1.0, 0.0, 1.0);
    for (int k = 0; k <= 10; ++k) {
        EXPECT_DOUBLE_EQ(s.alpha, std::pow(4.0, k));
        s = ladder_advance(s);
    }
}

TEST(Ladder, LogAndDirectAgree) {
    const HardyHenonParams p{6, 3, 0.5, 2.5, 0};
    LadderState s = LadderState::initial(p, 3.0, 0.7);
    double l = s.l();
    for (int k = 0; k < 4; ++k) {
        const double direct = ladder_advance_direct(l, s.alpha, s.C0, p.n, p.p);
        s = ladder_advance(s);
        ASSERT_TRUE(std::isfinite(direct) && direct > 0.0);
        EXPECT_NEAR(std::log(direct), s.log_l, 1e-12 * std::max(1.0, std::abs(s.log_l)));
        l = direct;
    }
}

TEST(Ladder, InitialValidation) {
    const HardyHenonParams p{4, 2, 0, 2, 0};
    EXPECT_THROW(LadderState::initial(p, 0.0, 0.0), DomainError);
    EXPECT_THROW(LadderState::initial(p, 1.0, 0.0, 0.5), DomainError);
    EXPECT_THROW(LadderState::initial({4, 2, 0, 1.0, 0}, 1.0, 0.0), DomainError);
}

TEST(Ladder, GeometryConstant) {
    EXPECT_DOUBLE_EQ(geometry_constant(0.0, 5.0), 1.0);
    EXPECT_DOUBLE_EQ(geometry_constant(2.0, 1.0), 0.25);
    EXPECT_DOUBLE_EQ(geometry_constant(-1.0, 3.0), 1.0);
    EXPECT_THROW(geometry_constant(1.0, -0.5), DomainError);
}

TEST(LadderClosedForm, KZeroIsInitialValue) {
    const LadderState s0 = LadderState::initial({4, 2, 0, 2, 0}, 17.0, 0.0);
    EXPECT_NEAR(ladder_closed_form(0, s0).log_exact, std::log(17.0), 1e-15);
    EXPECT_THROW(ladder_closed_form(-1, s0), DomainError);
}

TEST(LadderClosedForm, MatchesRecurrenceOnRandomStates) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int ns[] = {2, 4, 6, 8};
    for (int trial = 0; trial < 15; ++trial) {
        HardyHenonParams p;
        p.n = ns[trial % 4];
        p.m = p.n / 2;
        p.p = 1.2 + 3.0 * u(rng);
        p.a = -1.0 + 2.5 * u(rng);
        const LadderState s0 = LadderState::initial_log(p, 40.0 * u(rng) - 10.0, 3.0 * u(rng));
        LadderState s = s0;
        for (int k = 0; k <= 12; ++k) {
            const LadderClosedForm cf = ladder_closed_form(k, s0);
            EXPECT_LE(std::abs(cf.log_exact - s.log_l) / std::max(1.0, std::abs(s.log_l)), 1e-9)
                << "trial " << trial << " k " << k;
            EXPECT_LE(cf.log_bound, s.log_l + 1e-9 * std::max(1.0, std::abs(s.log_l)));
            s = ladder_advance(s);
        }
    }
}

TEST(LadderThreshold, CriticalValue) {
    const HardyHenonParams p{4, 2, 0, 2, 0};
    EXPECT_NEAR(divergence_threshold(p, 0.0), 16777216.0, 1e-6);
    EXPECT_NEAR(divergence_threshold(p, 12.5), 16777216.0, 1e-6);  // a = 0 removes M
    EXPECT_DOUBLE_EQ(default_alpha0(p), 4.0);
}

TEST(LadderThreshold, NondecreasingInMForPositiveA) {
    const HardyHenonParams p{4, 2, 1.5, 3, 0};
    double prev = divergence_threshold(p, 0.0);
    for (double M = 0.25; M < 10.0; M += 0.25) {
        const double t = divergence_threshold(p, M);
        EXPECT_GE(t, prev);
        prev = t;
    }
}

TEST(LadderThreshold, GrowthFromThreshold) {
    for (const HardyHenonParams& p : {HardyHenonParams{4, 2, 0, 2, 0}, HardyHenonParams{6, 3, 1.0, 3.0, 0},
                                      HardyHenonParams{4, 2, -0.5, 1.5, 0}}) {
        const double M = 0.8;
        const LadderState s0 = LadderState::at_threshold(p, M, default_alpha0(p));
        const double slope = p.n / (p.p - 1.0) * std::log(2.0 * p.p);
        for (int k = 0; k <= 40; ++k) {
            const LadderClosedForm cf = ladder_closed_form(k, s0);
            EXPECT_GE(cf.log_exact, slope * k) << "k=" << k;
            EXPECT_GE(cf.log_bound, slope * k - 1e-9 * std::max(1.0, cf.log_bound));
        }
        EXPECT_GT(ladder_closed_form(40, s0).log_exact, 100.0);
    }
}

TEST(LadderThreshold, RecurrenceGrowthWhenWellConditioned) {
    // rounding in log l_j is amplified by p^{k-j}; for p <= 2 and k <= 40
    // that stays far below the margin A over the straight line
    for (const HardyHenonParams& p : {HardyHenonParams{4, 2, 0, 2, 0}, HardyHenonParams{4, 2, -0.5, 1.5, 0}}) {
        LadderState s = LadderState::at_threshold(p, 0.8, default_alpha0(p));
        const double slope = p.n / (p.p - 1.0) * std::log(2.0 * p.p);
        for (int k = 0; k <= 40; ++k) {
            EXPECT_GE(s.log_l, slope * k) << "k=" << k;
            const LadderState next = ladder_advance(s);
            EXPECT_GT(next.log_l, s.log_l);
            s = next;
        }
    }
}

TEST(LadderThreshold, OffsetIsAnExactTrajectoryShift) {
    // starting at the threshold, log l_k - B k stays equal to A
    const HardyHenonParams p{6, 3, 1.0, 3.0, 0};
    const LadderState s0 = LadderState::at_threshold(p, 0.8, default_alpha0(p));
    const double A = s0.log_l;
    LadderState s = s0;
    for (int k = 0; k <= 8; ++k) {
        EXPECT_NEAR(s.log_l - ladder_slope(p) * k, A, 1e-9 * std::max(1.0, std::abs(s.log_l)));
        s = ladder_advance(s);
    }
}

TEST(LadderThreshold, BelowThresholdCanCollapse) {
    const HardyHenonParams p{4, 2, 0, 2, 0};
    const LadderState s0 = LadderState::initial(p, 1.0, 0.0);
    const auto rows = ladder_table(s0, 10);
    EXPECT_LT(rows.back().log_l, rows.front().log_l);
}

TEST(LadderExponents, InequalityHoldsWithDefaultAlpha0) {
    for (int n : {2, 4, 6, 8})
        for (double pp : {1.1, 1.5, 2.0, 3.0, 7.0}) {
            LadderState s = LadderState::initial({n, n / 2, 0, pp, 0}, 1.0, 0.0);
            for (int k = 0; k < 20; ++k) {
                EXPECT_TRUE(s.exponent_inequality_holds()) << n << " " << pp;
                s = ladder_advance(s);
            }
        }
    // an override below 2n/p breaks it on the first rung
    const LadderState bad = LadderState::initial({4, 2, 0, 2, 0}, 1.0, 0.0, 1.0);
    EXPECT_FALSE(bad.exponent_inequality_holds());
}

TEST(LadderTable, Rows) {
    const auto rows = ladder_table(LadderState::initial({4, 2, 0, 2, 0}, 1.0, 0.0, 1.0), 3);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[3].k, 3);
    EXPECT_DOUBLE_EQ(rows[3].alpha, 64.0);
}

TEST(MonomialCoefficient, Values) {
    EXPECT_DOUBLE_EQ(monomial_poisson_coefficient(0.0, 4), 1.0 / 8.0);
    EXPECT_DOUBLE_EQ(monomial_poisson_coefficient(8.0, 4), 1.0 / 120.0);
    EXPECT_THROW(monomial_poisson_coefficient(-4.0, 4), DomainError);
    EXPECT_THROW(monomial_poisson_coefficient(-2.0, 4), DomainError);
    EXPECT_THROW(monomial_poisson_coefficient(-5.0, 4), DomainError);
}

TEST(MonomialCoefficient, NumericalSolveRecoversIt) {
    for (int n : {4, 6})
        for (double beta : {0.0, 1.0, 2.5, 8.0}) {
            const double R = 3.0;
            const RadialGrid g = RadialGrid::uniform(0.0, R, 1025);
            const RadialField u = poisson_solve_ball(RadialField::sample(g, [&](double r) { return std::pow(r, beta); }), R, n);
            // u(0) - u(r) = c r^{beta+2}
            const double r = g[512];
            const double c = (u[0] - u[512]) / std::pow(r, beta + 2.0);
            EXPECT_NEAR(c, monomial_poisson_coefficient(beta, n), 1e-6) << n << " " << beta;
        }
}
