#include "rbvix/estimators.hpp"

#include "rbvix/statistics.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace rbvix {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Moments of the right-point log mean under the sampled law (uses the factor actually sampled).
CvMoments sampler_cv_moments(const ExactSampler& sampler) {
    const Eigen::Index n = sampler.steps();
    const auto& lower = sampler.factor->lower;
    const double mu = right_point_log_mean(sampler.mean);
    detail::CompensatedSum<double> var;
    for (Eigen::Index k = 0; k <= n; ++k) {
        detail::CompensatedSum<double> col;
        for (Eigen::Index i = std::max<Eigen::Index>(k, 1); i <= n; ++i) col.add(lower(i, k));
        const double v = col.value();
        var.add(v * v);
    }
    const double nn = static_cast<double>(n);
    return {mu, std::sqrt(std::max(var.value(), 0.0)) / nn};
}

void check_positive_count(std::int64_t m, std::int64_t minimum, const char* what) {
    if (m < minimum) throw UsageError(std::string(what) + " must be >= " + std::to_string(minimum));
}

// P_l - P_{l-1} (or P_0) over `count` samples of the n_l grid on stream key.with_level(level).
Moments run_level(SchemeKind scheme, Eigen::Index steps, int level, std::int64_t count, const Payoff& payoff,
                  const ModelParams& params, const StreamKey& key, const SimulationOptions& options) {
    const auto sampler = ExactSampler::build(params, steps);
    const bool coupled = level > 0;
    auto parts = simulate_batches(sampler, count, key.with_level(static_cast<std::uint64_t>(level)), options,
                                  [&](const Eigen::MatrixXd& x) {
                                      Moments m;
                                      for (Eigen::Index j = 0; j < x.cols(); ++j) {
                                          const double* col = x.col(j).data();
                                          double value = payoff_eval(payoff, scheme_vix2(scheme, x.col(j)));
                                          if (coupled)
                                              value -= payoff_eval(payoff, scheme_vix2(scheme, every_kth(col, steps, 2)));
                                          m.add(value);
                                      }
                                      return m;
                                  });
    return merge_ordered(parts);
}

LevelStats to_level_stats(int level, Eigen::Index steps, const Moments& m) {
    const double n = static_cast<double>(steps);
    return {level, steps, m.count, m.mean, m.variance(), static_cast<double>(m.count) * n * n};
}

}  // namespace

std::string to_string(PlanMode mode) {
    switch (mode) {
        case PlanMode::Auto: return "auto";
        case PlanMode::Analytic: return "analytic";
        case PlanMode::Pilot: return "pilot";
    }
    return "auto";
}

PlanMode plan_mode_from_string(const std::string& name) {
    if (name == "auto") return PlanMode::Auto;
    if (name == "analytic") return PlanMode::Analytic;
    if (name == "pilot") return PlanMode::Pilot;
    throw UsageError("plan: expected auto, analytic or pilot, got '" + name + "'");
}

double MlmcPlan::predicted_cost() const {
    double cost = 0.0;
    for (std::size_t l = 0; l < n_levels.size(); ++l) {
        const double n = static_cast<double>(n_levels[l]);
        cost += static_cast<double>(m_levels[l]) * n * n;
    }
    return cost;
}

double lambda_bracket(const ModelParams& p) {
    const double h = p.hurst, eta2 = p.eta * p.eta, t = p.maturity, d = p.window;
    const double a = eta2 * std::pow(t, 2 * h) / (2 * h);
    const double b = eta2 * (std::pow(t + d, 2 * h) - std::pow(d, 2 * h)) / (2 * h);
    const double c = eta2 * lambda_integral(h, t, d);
    return std::expm1(a) + std::expm1(b) - 2.0 * std::expm1(c);
}

double lambda_constant(const ModelParams& p) {
    p.validate();
    if (!(p.hurst < 0.5))
        throw UnsupportedHypothesis("strong-error constant needs H < 1/2 (got H = " + std::to_string(p.hurst) + ")");
    if (!p.has_flat_x0())
        throw UnsupportedHypothesis("strong-error constant needs X_0 constant on [T, T + Delta]");
    const double bracket = lambda_bracket(p);
    return 0.5 * std::exp(p.x0(p.maturity)) * std::sqrt(std::max(bracket, 0.0));
}

Estimate mc_price(SchemeKind scheme, Eigen::Index n, std::int64_t M, const Payoff& payoff, bool use_cv,
                  const ModelParams& params, const StreamKey& key, const SimulationOptions& options) {
    const auto start = Clock::now();
    if (n < 1) throw UsageError("n: number of steps must be >= 1");
    check_positive_count(M, 2, "M");
    payoff.validate();
    const auto sampler = ExactSampler::build(params, n);
    const double cv_n = use_cv ? cv_price(payoff, sampler_cv_moments(sampler)) : 0.0;

    auto parts = simulate_batches(sampler, M, key, options, [&](const Eigen::MatrixXd& x) {
        Moments m;
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const auto col = x.col(j);
            const double vix2 = scheme_vix2(scheme, col);
            if (use_cv) {
                const double cv_sample = std::exp(right_point_log_mean(col));
                m.add(cv_corrected_payoff(payoff, vix2, cv_sample, cv_n));
            } else {
                m.add(payoff_eval(payoff, vix2));
            }
        }
        return m;
    });
    const Moments total = merge_ordered(parts);

    Estimate e;
    e.value = total.mean;
    e.std_error = total.std_error();
    e.cost = static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(M);
    e.samples_used = {M};
    e.scheme = scheme;
    e.cv_used = use_cv;
    e.levels = {to_level_stats(0, n, total)};
    e.wall_seconds = seconds_since(start);
    return e;
}

MlmcPlan plan_from_constants(double epsilon, Eigen::Index n0, SchemeKind scheme, double hurst, double c1, double c2) {
    if (!(epsilon > 0.0)) throw UsageError("epsilon: target RMSE must be > 0");
    if (n0 < 1) throw UsageError("n0: base grid must have >= 1 step");
    if (!(c1 >= 0.0) || !(c2 >= 0.0)) throw NumericError("MLMC constants must be finite and >= 0");
    MlmcPlan plan;
    plan.n0 = n0;
    plan.epsilon = epsilon;
    plan.scheme = scheme;
    plan.c1 = c1;
    plan.c2 = c2;
    const double ratio = std::sqrt(2.0) * c1 / epsilon;
    plan.L = ratio > 1.0 ? static_cast<int>(std::ceil(std::log(ratio) / std::log(2.0))) : 0;
    if (plan.L > 40) throw UsageError("epsilon: too small for the available level range");
    const double m0 = std::ceil(2.0 * c2 * (plan.L + 1) / (epsilon * epsilon));
    if (m0 > 1e15) throw UsageError("epsilon: sample count overflows");
    plan.m0 = std::max<std::int64_t>(1, static_cast<std::int64_t>(m0));
    const double decay = scheme == SchemeKind::Rectangle ? 2.0 : 2.0 + hurst;
    for (int l = 0; l <= plan.L; ++l) {
        plan.n_levels.push_back(n0 << l);
        const double m = std::ceil(static_cast<double>(plan.m0) * std::exp2(-decay * l));
        plan.m_levels.push_back(std::max<std::int64_t>(1, static_cast<std::int64_t>(m)));
    }
    return plan;
}

MlmcPlan mlmc_plan(double epsilon, Eigen::Index n0, SchemeKind scheme, const Payoff& payoff, const ModelParams& params,
                   PlanMode mode, const StreamKey& pilot_key, const PilotOptions& pilot,
                   const SimulationOptions& options) {
    if (!(epsilon > 0.0)) throw UsageError("epsilon: target RMSE must be > 0");
    payoff.validate();
    params.validate();
    if (mode == PlanMode::Auto) {
        const bool analytic_ok = payoff.kind == PayoffKind::Call && params.hurst < 0.5 && params.has_flat_x0();
        mode = analytic_ok ? PlanMode::Analytic : PlanMode::Pilot;
    }
    if (mode == PlanMode::Analytic) {
        const double lip = lipschitz_constant(payoff);
        const double lambda = lambda_constant(params);
        const double nn = static_cast<double>(n0);
        const double c1 = lip * lambda / nn;
        const double c2 = 10.0 * lip * lip * lambda * lambda / (nn * nn);
        auto plan = plan_from_constants(epsilon, n0, scheme, params.hurst, c1, c2);
        plan.lambda = lambda;
        return plan;
    }
    check_positive_count(pilot.probe_samples, 100, "probe_M");
    if (pilot.levels < 1) throw UsageError("pilot levels must be >= 1");
    const auto stats = level_statistics(n0, pilot.levels, scheme, payoff, params, pilot.probe_samples, pilot_key, options);
    double c1 = 0.0, c2 = 0.0;
    for (const auto& s : stats) {
        const double scale = std::exp2(s.level);
        c2 = std::max(c2, s.variance * scale * scale);
        if (s.level >= 1) c1 = std::max(c1, std::abs(s.mean) * scale);
    }
    auto plan = plan_from_constants(epsilon, n0, scheme, params.hurst, c1, c2);
    plan.pilot = true;
    return plan;
}

Estimate mlmc_price(const MlmcPlan& plan, const Payoff& payoff, const ModelParams& params, const StreamKey& key,
                    const SimulationOptions& options) {
    const auto start = Clock::now();
    payoff.validate();
    if (plan.n_levels.size() != static_cast<std::size_t>(plan.L + 1) || plan.m_levels.size() != plan.n_levels.size())
        throw UsageError("mlmc plan: level vectors do not match L");
    Estimate e;
    e.scheme = plan.scheme;
    double variance = 0.0;
    detail::CompensatedSum<double> value;
    for (int l = 0; l <= plan.L; ++l) {
        const auto steps = plan.n_levels[static_cast<std::size_t>(l)];
        const auto count = plan.m_levels[static_cast<std::size_t>(l)];
        check_positive_count(count, 1, "M_l");
        const Moments m = run_level(plan.scheme, steps, l, count, payoff, params, key, options);
        e.levels.push_back(to_level_stats(l, steps, m));
        e.samples_used.push_back(count);
        value.add(m.mean);
        variance += m.variance() / static_cast<double>(count);
        e.cost += e.levels.back().cost;
    }
    e.value = value.value();
    e.std_error = std::sqrt(variance);
    e.bias_proxy = plan.L > 0 ? std::abs(e.levels.back().mean) : 0.0;
    e.wall_seconds = seconds_since(start);
    return e;
}

std::vector<LevelStats> level_statistics(Eigen::Index n0, int max_level, SchemeKind scheme, const Payoff& payoff,
                                         const ModelParams& params, std::int64_t probe_M, const StreamKey& key,
                                         const SimulationOptions& options) {
    check_positive_count(probe_M, 100, "probe_M");
    if (n0 < 1 || max_level < 0) throw UsageError("level_statistics: need n0 >= 1 and max_level >= 0");
    payoff.validate();
    std::vector<LevelStats> out;
    for (int l = 0; l <= max_level; ++l) {
        const Eigen::Index steps = n0 << l;
        out.push_back(to_level_stats(l, steps, run_level(scheme, steps, l, probe_M, payoff, params, key, options)));
    }
    return out;
}

std::vector<LevelStats> level_statistics(const MlmcPlan& plan, const Payoff& payoff, const ModelParams& params,
                                         std::int64_t probe_M, const StreamKey& key, const SimulationOptions& options) {
    return level_statistics(plan.n0, plan.L, plan.scheme, payoff, params, probe_M, key, options);
}

void to_json(nlohmann::json& j, const LevelStats& s) {
    j = {{"level", s.level}, {"steps", s.steps},       {"samples", s.samples},
         {"mean", s.mean},   {"variance", s.variance}, {"cost", s.cost}};
}

void to_json(nlohmann::json& j, const Estimate& e) {
    j = {{"value", e.value},
         {"std_error", e.std_error},
         {"cost", e.cost},
         {"samples_used", e.samples_used},
         {"scheme", to_string(e.scheme)},
         {"cv_used", e.cv_used},
         {"levels", e.levels},
         {"bias_proxy", e.bias_proxy},
         {"wall_seconds", e.wall_seconds}};
}

void to_json(nlohmann::json& j, const MlmcPlan& p) {
    j = {{"n0", p.n0},         {"L", p.L},   {"n_levels", p.n_levels}, {"m_levels", p.m_levels},
         {"m0", p.m0},         {"lambda", p.lambda}, {"c1", p.c1},     {"c2", p.c2},
         {"epsilon", p.epsilon}, {"scheme", to_string(p.scheme)},      {"pilot", p.pilot}};
}

void from_json(const nlohmann::json& j, MlmcPlan& p) {
    j.at("n0").get_to(p.n0);
    j.at("L").get_to(p.L);
    j.at("n_levels").get_to(p.n_levels);
    j.at("m_levels").get_to(p.m_levels);
    j.at("m0").get_to(p.m0);
    j.at("lambda").get_to(p.lambda);
    j.at("c1").get_to(p.c1);
    j.at("c2").get_to(p.c2);
    j.at("epsilon").get_to(p.epsilon);
    p.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    j.at("pilot").get_to(p.pilot);
}

}  // namespace rbvix
