#include <gtest/gtest.h>

#include <cmath>

#include "hhlab/liouville.hpp"

using namespace hhlab;

namespace {

const HardyHenonParams critical{4, 2, 0, 2, 0};
const HardyHenonParams supercritical{4, 3, 0, 2, 0};
const HardyHenonParams yamabe{4, 1, 0, 3, 0};

bool same_classification(const ScanResult& a, const ScanResult& b, double* worst_shift) {
    if (a.cells.size() != b.cells.size()) return false;
    *worst_shift = 0.0;
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        const auto& x = a.cells[i].outcome;
        const auto& y = b.cells[i].outcome;
        if (!x || !y) return false;
        if (x->kind != y->kind || x->layer != y->layer) return false;
        *worst_shift = std::max(*worst_shift, std::abs(x->r_star / y->r_star - 1.0));
    }
    return true;
}

}  // namespace

TEST(Shoot, NegativeLaplacianLayerNeverSurvives) {
    for (double c : {0.1, 1.0, 5.0}) {
        const ShootingOutcome o = shoot({1.0, -c}, critical, 50.0);
        EXPECT_NE(o.kind, OutcomeKind::survived) << c;
        EXPECT_LE(o.r_star, o.r_max);
    }
}

TEST(Shoot, NegativeLayerGrowsQuadratically) {
    ShootConfig cfg;
    cfg.record_trace = true;
    cfg.monitored_layers = 1;  // follow u itself past the sign change of u_1
    const double c = 2.0, u0 = 1.0;
    const ShootingOutcome o = shoot({u0, -c}, critical, 5.0, cfg);
    ASSERT_FALSE(o.trace.empty());
    for (const auto& tp : o.trace) EXPECT_GE(tp.layers[0], u0 + c * tp.r * tp.r / 8.0 - 1e-9);
}

TEST(Shoot, ZeroHigherLayersLoseSign) {
    const ShootingOutcome o = shoot({1.0, 0.0}, critical, 50.0);
    EXPECT_EQ(o.kind, OutcomeKind::sign_loss);
    EXPECT_EQ(o.layer, 1);
    EXPECT_LT(o.r_star, 1e-3);
}

TEST(Shoot, InitialNegativeLayerIsImmediateSignLoss) {
    const ShootingOutcome o = shoot({1.0, -1.0}, critical, 50.0);
    EXPECT_EQ(o.kind, OutcomeKind::sign_loss);
    EXPECT_EQ(o.layer, 1);
    EXPECT_EQ(o.r_star, 0.0);
}

TEST(Shoot, LargeDataBlowsUp) {
    // u_1 strongly positive bends u down only slowly; with monitoring of u alone
    // a large amplitude under u^2 still reaches the blow-up threshold
    ShootConfig cfg;
    cfg.monitored_layers = 1;
    const ShootingOutcome o = shoot({1.0, -5.0}, critical, 50.0, cfg);
    EXPECT_EQ(o.kind, OutcomeKind::blow_up);
    EXPECT_LT(o.r_star, 50.0);
}

TEST(Shoot, SingularProfileIsTracked) {
    const auto s = *singular_solution(critical);
    const double r0 = 0.5;
    auto u = [&](double r) { return s.C * std::pow(r, -s.sigma); };
    // layers: u, -Delta u = sigma (n - 2 - sigma) ... with -Delta r^{-4} = -8 r^{-6}
    const double C = s.C;
    std::vector<double> state{u(r0), -4.0 * C * std::pow(r0, -5.0), -8.0 * C * std::pow(r0, -6.0),
                              48.0 * C * std::pow(r0, -7.0)};
    // perturbations of the singular profile grow along r, so integrate tightly
    ShootConfig cfg;
    cfg.rtol = 1e-13;
    cfg.atol = 1e-13;
    cfg.record_trace = true;
    cfg.monitored_layers = 1;
    const ShootingOutcome o = shoot_from(r0, state, critical, 4.0, cfg);
    EXPECT_EQ(o.kind, OutcomeKind::survived);
    for (const auto& tp : o.trace) EXPECT_NEAR(tp.layers[0] / u(tp.r), 1.0, 1e-6) << tp.r;
}

TEST(Shoot, BubbleSurvives) {
    ShootConfig cfg;
    cfg.record_trace = true;
    const ShootingOutcome o = shoot({2.0 * std::sqrt(2.0)}, yamabe, 50.0, cfg);
    EXPECT_EQ(o.kind, OutcomeKind::survived);
    EXPECT_DOUBLE_EQ(o.r_star, 50.0);
    for (const auto& tp : o.trace) EXPECT_NEAR(tp.layers[0], bubble_value(4, tp.r), 1e-6);
}

TEST(Shoot, HardyWeightStartsOffOrigin) {
    const HardyHenonParams hardy{4, 2, 1.0, 2, 0};
    const ShootingOutcome o = shoot({1.0, 0.5}, hardy, 20.0);
    EXPECT_NE(o.kind, OutcomeKind::survived);
    EXPECT_THROW(shoot({1.0, 0.5}, HardyHenonParams{4, 2, 2.5, 2, 0}, 20.0), DomainError);
}

TEST(Shoot, Errors) {
    EXPECT_THROW(shoot({0.0, 1.0}, critical, 10.0), DomainError);
    EXPECT_THROW(shoot({1.0}, critical, 10.0), DomainError);
    EXPECT_THROW(shoot({1.0, 1.0}, critical, -1.0), DomainError);
    ShootConfig cfg;
    cfg.max_steps = 3;
    EXPECT_THROW(shoot({2.0 * std::sqrt(2.0)}, yamabe, 50.0, cfg), IntegratorFailure);
}

TEST(Scan, CriticalReferenceHasNoSurvivors) {
    const auto res = scan({linspace(0.1, 10, 21), linspace(-10, 10, 21)}, critical, 50.0, {}, 4);
    EXPECT_EQ(res.cells.size(), 441u);
    EXPECT_EQ(res.tally.total(), 441u);
    EXPECT_EQ(res.tally.failed, 0u);
    EXPECT_EQ(res.tally.all_positive_survivors(), 0u);
}

TEST(Scan, SupercriticalReferenceHasNoSurvivors) {
    const auto res = scan({linspace(0.1, 10, 21), linspace(-10, 10, 21), {1.0}}, supercritical, 50.0, {}, 4);
    EXPECT_EQ(res.cells.size(), 441u);
    EXPECT_EQ(res.tally.failed, 0u);
    EXPECT_EQ(res.tally.all_positive_survivors(), 0u);
}

TEST(Scan, SubcriticalControlFindsBubble) {
    const auto res = scan({{2.0 * std::sqrt(2.0), 1.0}}, yamabe, 50.0);
    ASSERT_EQ(res.cells.size(), 2u);
    EXPECT_EQ(res.cells[0].outcome->kind, OutcomeKind::survived);
    EXPECT_GE(res.tally.survived, 1u);
    EXPECT_GT(res.cells[0].quadratic_ratio, 0.0);
    EXPECT_LT(res.cells[0].quadratic_ratio, 1e-5);
}

TEST(Scan, ClassificationsStableUnderTolerance) {
    const std::vector<std::vector<double>> axes{linspace(0.1, 10, 21), linspace(-10, 10, 21)};
    const auto a = scan(axes, critical, 50.0, {}, 4);
    const auto b = scan(axes, critical, 50.0, ShootConfig{}.halved(), 4);
    double shift = 0.0;
    EXPECT_TRUE(same_classification(a, b, &shift));
    EXPECT_LT(shift, 1e-2);
}

TEST(Scan, DeterministicAcrossWorkerCounts) {
    const std::vector<std::vector<double>> axes{linspace(0.5, 3, 5), linspace(-2, 2, 5)};
    const auto a = scan(axes, critical, 20.0, {}, 1);
    const auto b = scan(axes, critical, 20.0, {}, 6);
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        EXPECT_EQ(a.cells[i].init, b.cells[i].init);
        EXPECT_EQ(a.cells[i].outcome->r_star, b.cells[i].outcome->r_star);
    }
}

TEST(Scan, EmptyAndIndexOrder) {
    const auto empty = scan({{}, linspace(0, 1, 3)}, critical, 10.0);
    EXPECT_TRUE(empty.cells.empty());
    EXPECT_EQ(empty.tally.total(), 0u);
    const auto res = scan({{1.0, 2.0}, {3.0, 4.0, 5.0}}, critical, 1.0);
    ASSERT_EQ(res.cells.size(), 6u);
    EXPECT_EQ(res.cells[1].init, (std::vector<double>{1.0, 4.0}));
    EXPECT_EQ(res.cells[3].init, (std::vector<double>{2.0, 3.0}));
    EXPECT_THROW(scan({{1.0}}, critical, 1.0), DomainError);
}

TEST(Scan, RecordsFailuresPerCell) {
    ShootConfig cfg;
    cfg.max_steps = 2;
    const auto res = scan({{2.0 * std::sqrt(2.0)}}, yamabe, 50.0, cfg);
    EXPECT_EQ(res.tally.failed, 1u);
    EXPECT_FALSE(res.cells[0].failure.empty());
}

TEST(Scan, JensenLowerBoundAlongTrajectory) {
    // at sampled radii the pointwise source u^p dominates the Jensen bound
    // (average of u)^p of the recentered sphere average
    ShootConfig cfg;
    cfg.record_trace = true;
    const ShootingOutcome o = shoot({2.0 * std::sqrt(2.0)}, yamabe, 10.0, cfg);
    std::vector<double> r, v;
    for (const auto& tp : o.trace) {
        if (!r.empty() && tp.r <= r.back()) continue;
        r.push_back(tp.r);
        v.push_back(tp.layers[0]);
    }
    const RadialField u(RadialGrid(r), v);
    for (double d : {0.5, 1.0, 2.0})
        for (double rad : {0.25, 0.5}) {
            const double avg = recenter_average(u, d, rad, 4);
            const double avg_pow = recenter_average(u.map([](double x) { return x * x * x; }), d, rad, 4);
            EXPECT_GE(avg_pow, std::pow(avg, 3.0) - 1e-10);
        }
}

TEST(Bubble, OracleValues) {
    EXPECT_NEAR(bubble_value(4, 0.0), 2.0 * std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(bubble_value(3, 0.0), std::pow(3.0, 0.25), 1e-15);
    EXPECT_THROW(bubble_oracle(2, RadialGrid::uniform(0, 1, 64)), DomainError);
}

TEST(Bubble, SolvesYamabeEquation) {
    const RadialGrid g = RadialGrid::uniform(0.0, 10.0, 10001);
    const RadialField u = bubble_oracle(4, g);
    const RadialField L = radial_laplacian(u, 4, 6);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(L[i] - std::pow(u[i], 3.0)));
    EXPECT_LT(worst, 1e-8);
}

TEST(Representation, BubblePotentialAtOrigin) {
    const RadialGrid g = RadialGrid::uniform(0.0, 200.0, 20001);
    const RadialField f = bubble_oracle(4, g).map([](double v) { return v * v * v; });
    const RepresentationCheck rc = representation_check(f, 4);
    EXPECT_NEAR(rc.potential_at_0, 2.0 * std::sqrt(2.0), 1e-3);
    EXPECT_NEAR(rc.direct, rc.potential_at_0, 1e-6);
    EXPECT_FALSE(rc.truncation_dominated);
    EXPECT_GT(rc.tail_estimate, 0.0);
}

TEST(Representation, TruncationIsFlagged) {
    const RadialGrid g = RadialGrid::uniform(0.0, 2.0, 401);
    const RadialField f = bubble_oracle(4, g).map([](double v) { return v * v * v; });
    EXPECT_TRUE(representation_check(f, 4).truncation_dominated);
}

TEST(Representation, CompactAndZeroSources) {
    const RadialGrid g = RadialGrid::uniform(0.0, 2.0, 401);
    const RadialField bump = RadialField::sample(g, [](double r) { return r < 1 ? (1 - r * r) * (1 - r * r) : 0.0; });
    const RepresentationCheck rc = representation_check(bump, 5);
    EXPECT_GT(rc.potential_at_0, 0.0);
    EXPECT_NEAR(rc.potential_at_0, rc.direct, 1e-6);
    EXPECT_FALSE(rc.truncation_dominated);
    const RadialField zero = RadialField::sample(g, [](double) { return 0.0; });
    EXPECT_EQ(representation_check(zero, 4).potential_at_0, 0.0);
}
