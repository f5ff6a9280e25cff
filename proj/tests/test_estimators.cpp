#include "rbvix/estimators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace rbvix;

namespace {

// MSE study setting.
ModelParams fig3() {
    ModelParams p;
    p.hurst = 0.1;
    p.eta = 0.5;
    p.maturity = 0.5;
    p.window = 1.0 / 12.0;
    p.x0 = std::log(0.235 * 0.235);
    return p;
}

ModelParams flat(double x0) {
    auto p = fig3();
    p.eta = 0.0;
    p.x0 = x0;
    return p;
}

}  // namespace

TEST(Lambda, FrozenValue) {
    // mpmath, 40 digits
    EXPECT_NEAR(lambda_constant(fig3()), 0.028571454354328898727, 1e-14);
    EXPECT_EQ(lambda_constant(flat(-3.0)), 0.0);
}

TEST(Lambda, HypothesesEnforced) {
    auto p = fig3();
    p.hurst = 0.6;
    EXPECT_THROW(lambda_constant(p), UnsupportedHypothesis);
    p = fig3();
    p.x0 = ForwardCurve({0.5, 0.6}, {-3.0, -2.9}, Interpolation::Linear);
    EXPECT_THROW(lambda_constant(p), UnsupportedHypothesis);
}

TEST(Lambda, BracketNonNegativeOnRandomParameters) {
    std::mt19937_64 rng(17);
    auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    for (int k = 0; k < 200; ++k) {
        ModelParams p;
        p.hurst = u(0.02, 0.49);
        p.eta = u(0.0, 3.0);
        p.maturity = u(0.01, 3.0);
        p.window = u(0.005, 0.5);
        EXPECT_GE(lambda_bracket(p), -1e-12) << "H=" << p.hurst;
    }
}

TEST(McPrice, FlatModelIsDeterministic) {
    const double x0 = -2.896;
    const auto with_cv = mc_price(SchemeKind::Rectangle, 10, 1000, Payoff::call(0.1), true, flat(x0), {1});
    EXPECT_EQ(with_cv.value, std::exp(x0 / 2) - 0.1);
    EXPECT_EQ(with_cv.std_error, 0.0);
    const auto plain = mc_price(SchemeKind::Trapezoid, 10, 1000, Payoff::call(0.1), false, flat(x0), {1});
    EXPECT_NEAR(plain.value, std::exp(x0 / 2) - 0.1, 1e-16);
    EXPECT_EQ(plain.std_error, 0.0);
    EXPECT_EQ(plain.cost, 100.0 * 1000.0);
}

TEST(McPrice, IndependentOfWorkerCount) {
    const auto a = mc_price(SchemeKind::Trapezoid, 20, 5000, Payoff::call(0.1), true, fig3(), {4}, {1, 512});
    const auto b = mc_price(SchemeKind::Trapezoid, 20, 5000, Payoff::call(0.1), true, fig3(), {4}, {3, 512});
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.std_error, b.std_error);
}

TEST(McPrice, RejectsBadArguments) {
    EXPECT_THROW(mc_price(SchemeKind::Rectangle, 0, 100, Payoff::call(0.1), false, fig3(), {}), UsageError);
    EXPECT_THROW(mc_price(SchemeKind::Rectangle, 4, 1, Payoff::call(0.1), false, fig3(), {}), UsageError);
    EXPECT_THROW(mc_price(SchemeKind::Rectangle, 4, 10, Payoff::call(-0.1), false, fig3(), {}), UsageError);
}

TEST(MlmcPlan, MatchesIndependentFormulaEvaluation) {
    // c1, c2, L and M0 cross-checked with an independent mpmath script.
    struct Row {
        double eps;
        int L;
        std::int64_t m0;
    };
    for (const auto& r : {Row{0.04, 0, 8}, Row{0.02, 1, 57}, Row{0.01, 2, 341}, Row{0.005, 3, 1815}}) {
        const auto plan = mlmc_plan(r.eps, 6, SchemeKind::Rectangle, Payoff::call(0.1), fig3());
        EXPECT_EQ(plan.L, r.L) << r.eps;
        EXPECT_EQ(plan.m0, r.m0) << r.eps;
        EXPECT_NEAR(plan.c1, 0.023809545295274082, 1e-15);
        EXPECT_NEAR(plan.c2, 0.0056689444716770819, 1e-16);
        EXPECT_FALSE(plan.pilot);
    }
}

TEST(MlmcPlan, LevelStructure) {
    for (auto scheme : {SchemeKind::Rectangle, SchemeKind::Trapezoid}) {
        const auto plan = mlmc_plan(0.001, 6, scheme, Payoff::call(0.1), fig3());
        ASSERT_EQ(plan.n_levels.size(), static_cast<std::size_t>(plan.L + 1));
        const double decay = scheme == SchemeKind::Rectangle ? 2.0 : 2.1;
        for (int l = 0; l <= plan.L; ++l) {
            EXPECT_EQ(plan.n_levels[l], 6 << l);
            EXPECT_EQ(plan.m_levels[l], static_cast<std::int64_t>(std::ceil(plan.m0 * std::exp2(-decay * l))));
            EXPECT_GE(plan.m_levels[l], 1);
            if (l > 0) {
                EXPECT_LE(plan.m_levels[l], plan.m_levels[l - 1]);
            }
        }
    }
    const auto r = mlmc_plan(0.003, 6, SchemeKind::Rectangle, Payoff::call(0.1), fig3());
    const auto t = mlmc_plan(0.003, 6, SchemeKind::Trapezoid, Payoff::call(0.1), fig3());
    EXPECT_EQ(r.L, t.L);
    EXPECT_EQ(r.m0, t.m0);
}

TEST(MlmcPlan, SingleLevelAtThreshold) {
    const auto base = mlmc_plan(0.01, 6, SchemeKind::Rectangle, Payoff::call(0.1), fig3());
    const auto plan = plan_from_constants(std::sqrt(2.0) * base.c1, 6, SchemeKind::Rectangle, 0.1, base.c1, base.c2);
    EXPECT_EQ(plan.L, 0);
}

TEST(MlmcPlan, ErrorsAndFallbacks) {
    EXPECT_THROW(mlmc_plan(0.0, 6, SchemeKind::Rectangle, Payoff::call(0.1), fig3()), UsageError);
    EXPECT_THROW(mlmc_plan(0.01, 6, SchemeKind::Rectangle, Payoff::future(), fig3(), PlanMode::Analytic), UsageError);
    auto rough_off = fig3();
    rough_off.hurst = 0.6;
    EXPECT_THROW(mlmc_plan(0.01, 6, SchemeKind::Rectangle, Payoff::call(0.1), rough_off, PlanMode::Analytic),
                 UnsupportedHypothesis);
    const auto pilot = mlmc_plan(0.01, 6, SchemeKind::Rectangle, Payoff::call(0.1), rough_off, PlanMode::Auto, {3},
                                 {1000, 3});
    EXPECT_TRUE(pilot.pilot);
    EXPECT_GT(pilot.c2, 0.0);
    const auto future = mlmc_plan(0.01, 6, SchemeKind::Trapezoid, Payoff::future(), fig3(), PlanMode::Auto, {3},
                                  {1000, 3});
    EXPECT_TRUE(future.pilot);
}

TEST(MlmcPlan, JsonRoundTrip) {
    const auto plan = mlmc_plan(0.005, 6, SchemeKind::Trapezoid, Payoff::call(0.1), fig3());
    const nlohmann::json j = plan;
    const auto back = j.get<MlmcPlan>();
    EXPECT_EQ(back.n_levels, plan.n_levels);
    EXPECT_EQ(back.m_levels, plan.m_levels);
    EXPECT_EQ(back.c1, plan.c1);
    EXPECT_EQ(back.lambda, plan.lambda);
    EXPECT_EQ(back.scheme, plan.scheme);
}

TEST(MlmcPrice, FlatModelHasZeroCorrections) {
    const auto p = flat(-2.8);
    const auto plan = plan_from_constants(0.002, 6, SchemeKind::Rectangle, 0.1, 0.02, 0.005);
    ASSERT_GT(plan.L, 0);
    const auto e = mlmc_price(plan, Payoff::call(0.1), p, {2});
    for (std::size_t l = 1; l < e.levels.size(); ++l) {
        EXPECT_EQ(e.levels[l].mean, 0.0);
        EXPECT_EQ(e.levels[l].variance, 0.0);
    }
    EXPECT_EQ(e.value, payoff_eval(Payoff::call(0.1), std::exp(-2.8)));
    EXPECT_EQ(e.std_error, 0.0);
}

TEST(MlmcPrice, SingleLevelCoincidesWithPlainMc) {
    const auto plan = plan_from_constants(0.05, 6, SchemeKind::Trapezoid, 0.1, 0.0, 0.01);
    ASSERT_EQ(plan.L, 0);
    const auto ml = mlmc_price(plan, Payoff::call(0.1), fig3(), {8});
    const auto mc = mc_price(SchemeKind::Trapezoid, 6, plan.m0, Payoff::call(0.1), false, fig3(), {8});
    EXPECT_EQ(ml.value, mc.value);
    EXPECT_EQ(ml.cost, mc.cost);
}

TEST(MlmcPrice, TelescopesToFinestLevelAndReportsConsistentStatistics) {
    const auto plan = mlmc_plan(0.002, 6, SchemeKind::Rectangle, Payoff::call(0.1), fig3());
    const auto ml = mlmc_price(plan, Payoff::call(0.1), fig3(), {12});
    const auto n_l = plan.n_levels.back();
    const auto mc = mc_price(SchemeKind::Rectangle, n_l, 100000, Payoff::call(0.1), false, fig3(), {13});
    EXPECT_NEAR(ml.value, mc.value, 4 * std::hypot(ml.std_error, mc.std_error));

    double var = 0.0, cost = 0.0, ident = 0.0, slack = 0.0;
    for (const auto& s : ml.levels) {
        var += s.variance / static_cast<double>(s.samples);
        cost += static_cast<double>(s.samples) * s.steps * s.steps;
        slack += static_cast<double>(s.steps * s.steps);
    }
    ident = 36.0 * plan.m0 * (plan.L + 1);
    EXPECT_DOUBLE_EQ(ml.std_error * ml.std_error, var);
    EXPECT_EQ(ml.cost, cost);
    EXPECT_GE(ml.cost, ident);
    EXPECT_LE(ml.cost, ident + slack);
    EXPECT_EQ(ml.bias_proxy, std::abs(ml.levels.back().mean));
}

TEST(LevelStatistics, FlatModelHasNoCorrectionVariance) {
    const auto stats = level_statistics(6, 3, SchemeKind::Trapezoid, Payoff::call(0.1), flat(-3.0), 200, {1});
    ASSERT_EQ(stats.size(), 4u);
    for (std::size_t l = 1; l < stats.size(); ++l) EXPECT_EQ(stats[l].variance, 0.0);
    EXPECT_THROW(level_statistics(6, 3, SchemeKind::Trapezoid, Payoff::call(0.1), flat(-3.0), 50, {1}), UsageError);
}

TEST(LevelStatistics, CorrectionVarianceDecays) {
    const auto stats = level_statistics(6, 3, SchemeKind::Trapezoid, Payoff::call(0.1), fig3(), 4000, {1});
    for (std::size_t l = 2; l < stats.size(); ++l) EXPECT_LT(stats[l].variance, stats[l - 1].variance);
}
