#pragma once

#include "rbvix/discretization.hpp"
#include "rbvix/model.hpp"
#include "rbvix/payoffs.hpp"
#include "rbvix/rng.hpp"
#include "rbvix/sampler.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace rbvix {

/// Empirical statistics of one MLMC level: P_0 at level 0, P_l - P_{l-1} above.
struct LevelStats {
    int level = 0;
    Eigen::Index steps = 0;
    std::int64_t samples = 0;
    double mean = 0.0;
    double variance = 0.0;
    /// samples * steps^2
    double cost = 0.0;
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    /// Normalized cost, n^2 per Gaussian sample on an n-step grid.
    double cost = 0.0;
    std::vector<std::int64_t> samples_used;
    SchemeKind scheme = SchemeKind::Rectangle;
    bool cv_used = false;
    std::vector<LevelStats> levels;
    /// |mean of the last correction|; 0 for single-level estimates.
    double bias_proxy = 0.0;
    double wall_seconds = 0.0;
};

enum class PlanMode { Auto, Analytic, Pilot };

std::string to_string(PlanMode mode);
PlanMode plan_mode_from_string(const std::string& name);

struct PilotOptions {
    std::int64_t probe_samples = 10000;
    /// Probe levels 0..levels.
    int levels = 4;
};

struct MlmcPlan {
    Eigen::Index n0 = 6;
    int L = 0;
    std::vector<Eigen::Index> n_levels;
    std::vector<std::int64_t> m_levels;
    std::int64_t m0 = 0;
    double lambda = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double epsilon = 0.0;
    SchemeKind scheme = SchemeKind::Rectangle;
    /// c1, c2 estimated from probe runs instead of the closed-form constant.
    bool pilot = false;

    double predicted_cost() const;
};

/// Leading constant of the rectangle L2 strong error, lim n * ||VIX^2 - VIX^2_n||_2.
/// Requires 0 < H < 1/2 and X_0 flat on [T, T + Delta]; throws UnsupportedHypothesis otherwise.
double lambda_constant(const ModelParams& params);
/// The bracket under the square root; nonnegative up to rounding.
double lambda_bracket(const ModelParams& params);

/// Plain Monte Carlo with M samples on the n-step grid, optionally with the lognormal control variate.
Estimate mc_price(SchemeKind scheme, Eigen::Index n, std::int64_t M, const Payoff& payoff, bool use_cv,
                  const ModelParams& params, const StreamKey& key, const SimulationOptions& options = {});

/// Number of levels and M0 from the constants (c1, c2).
MlmcPlan plan_from_constants(double epsilon, Eigen::Index n0, SchemeKind scheme, double hurst, double c1, double c2);

/// Analytic mode uses lambda_constant and the Lipschitz constant; Pilot estimates c1, c2 from
/// level_statistics; Auto picks Analytic when its hypotheses hold.
MlmcPlan mlmc_plan(double epsilon, Eigen::Index n0, SchemeKind scheme, const Payoff& payoff, const ModelParams& params,
                   PlanMode mode = PlanMode::Auto, const StreamKey& pilot_key = {}, const PilotOptions& pilot = {},
                   const SimulationOptions& options = {});

/// Coupled multilevel estimator: level l draws on the n_l grid and the coarse term uses every second point.
Estimate mlmc_price(const MlmcPlan& plan, const Payoff& payoff, const ModelParams& params, const StreamKey& key,
                    const SimulationOptions& options = {});

/// probe_M coupled samples on each level 0..max_level.
std::vector<LevelStats> level_statistics(Eigen::Index n0, int max_level, SchemeKind scheme, const Payoff& payoff,
                                         const ModelParams& params, std::int64_t probe_M, const StreamKey& key,
                                         const SimulationOptions& options = {});
std::vector<LevelStats> level_statistics(const MlmcPlan& plan, const Payoff& payoff, const ModelParams& params,
                                         std::int64_t probe_M, const StreamKey& key,
                                         const SimulationOptions& options = {});

void to_json(nlohmann::json& j, const LevelStats& s);
void to_json(nlohmann::json& j, const Estimate& e);
void to_json(nlohmann::json& j, const MlmcPlan& p);
void from_json(const nlohmann::json& j, MlmcPlan& p);

}  // namespace rbvix
