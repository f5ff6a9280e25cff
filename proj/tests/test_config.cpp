#include "rbvix/config.hpp"

#include <gtest/gtest.h>

using namespace rbvix;

namespace {

std::string violations_text(const RunConfig& c) {
    std::string out;
    for (const auto& v : c.violations()) out += v + "\n";
    return out;
}

}  // namespace

TEST(Presets, PopulateValidConfigs) {
    const std::vector<std::pair<std::string, Command>> native = {
        {"fig1", Command::StrongError},     {"fig1-h0.1", Command::StrongError}, {"fig1-h0.2", Command::StrongError},
        {"fig1-h0.3", Command::StrongError}, {"fig2", Command::WeakError},         {"fig3", Command::MseCost}};
    ASSERT_EQ(preset_names().size(), native.size());
    for (const auto& [name, own] : native) {
        for (bool paper : {false, true}) {
            for (auto cmd : {Command::Price, own}) {
                auto c = preset_config(name, paper, cmd);
                if (cmd == Command::Price) c.schemes = {SchemeKind::Rectangle};
                EXPECT_TRUE(c.violations().empty()) << name << " " << to_string(cmd) << "\n" << violations_text(c);
            }
        }
    }
}

TEST(Presets, MseStudyValues) {
    const auto c = preset_config("fig3", false, Command::MseCost);
    EXPECT_EQ(c.model.hurst, 0.1);
    EXPECT_EQ(c.model.maturity, 0.5);
    EXPECT_EQ(c.epsilons, (std::vector<double>{0.04, 0.02, 0.01, 0.005}));
    EXPECT_EQ(c.N_mse, 100);
    EXPECT_EQ(*c.reference_price, 0.121971);
    EXPECT_EQ(preset_config("fig3", true, Command::MseCost).N_mse, 400);
    EXPECT_THROW(preset_config("fig9", false, Command::Price), UsageError);
}

TEST(Presets, StrongStudyUsesDivisors) {
    for (bool paper : {false, true}) {
        const auto c = preset_config("fig1", paper, Command::StrongError);
        for (auto n : c.n_values) EXPECT_EQ(c.n_ref % n, 0);
    }
}

TEST(Validate, AnalyticPlanOutsideHypothesesSuggestsPilot) {
    auto c = preset_config("fig3", false, Command::Price);
    c.estimator = EstimatorKind::Mlmc;
    c.cv = false;
    c.plan = PlanMode::Analytic;
    c.model.hurst = 0.6;
    try {
        c.validate();
        FAIL() << "expected UsageError";
    } catch (const UsageError& e) {
        EXPECT_NE(std::string(e.what()).find("--plan pilot"), std::string::npos);
    }
    c.plan = PlanMode::Pilot;
    EXPECT_NO_THROW(c.validate());
}

TEST(Validate, MissingStrikeAndAggregation) {
    RunConfig c;
    c.model.eta = -1.0;
    c.M = 1;
    const auto v = c.violations();
    ASSERT_EQ(v.size(), 3u) << violations_text(c);
    EXPECT_NE(violations_text(c).find("kappa:"), std::string::npos);
    EXPECT_NE(violations_text(c).find("eta:"), std::string::npos);
    EXPECT_NE(violations_text(c).find("M:"), std::string::npos);
    c.payoff = PayoffKind::Future;
    EXPECT_EQ(c.violations().size(), 2u);
}

TEST(Validate, StrongErrorDivisibility) {
    auto c = preset_config("fig1", false, Command::StrongError);
    c.n_values.push_back(100);
    EXPECT_NE(violations_text(c).find("does not divide"), std::string::npos);
}

TEST(Settings, ParseAndReject) {
    RunConfig c;
    apply_setting(c, "n-values", "5, 10,20");
    EXPECT_EQ(c.n_values, (std::vector<Eigen::Index>{5, 10, 20}));
    apply_setting(c, "M", "1e5");
    EXPECT_EQ(c.M, 100000);
    apply_setting(c, "scheme", "both");
    EXPECT_EQ(c.schemes.size(), 2u);
    apply_setting(c, "cv", "true");
    EXPECT_TRUE(c.cv);
    apply_setting(c, "families", "ml-trap");
    EXPECT_EQ(c.families, std::vector<EstimatorFamily>{EstimatorFamily::MlTrap});
    EXPECT_THROW(apply_setting(c, "hurst", "abc"), UsageError);
    EXPECT_THROW(apply_setting(c, "n", "2.5"), UsageError);
    EXPECT_THROW(apply_setting(c, "colour", "red"), UsageError);
    EXPECT_THROW(apply_setting(c, "x0-file", "/nonexistent/curve.csv"), IoError);
}

TEST(Json, RoundTripReproducesConfig) {
    auto c = preset_config("fig2", true, Command::WeakError);
    c.model.x0 = ForwardCurve({0.25, 0.3, 0.4}, {-3.0, -2.9, -2.95}, Interpolation::LeftContinuousStep);
    c.seed = 0xFFFFFFFFFFFFFFFFull;
    c.kappa.reset();
    c.payoff = PayoffKind::Future;
    c.model.window = 1.0 / 12.0;
    const nlohmann::json j = c;
    const auto back = nlohmann::json::parse(j.dump()).get<RunConfig>();
    EXPECT_EQ(back, c);
    EXPECT_EQ(git_blob_hash(nlohmann::json(back).dump()), git_blob_hash(j.dump()));
}
