#pragma once

#include "rbvix/estimators.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rbvix {

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares of ln y on ln x. Needs >= 3 positive points and non-constant x.
LogLogFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ErrorCurve {
    std::string experiment;
    SchemeKind scheme = SchemeKind::Rectangle;
    std::vector<Eigen::Index> n_values;
    std::vector<double> errors;
    /// 95% half-widths.
    std::vector<double> ci_halfwidths;
    /// Price estimates per n (weak error only).
    std::vector<double> estimates;
    /// Lambda / n when the rectangle constant applies, otherwise empty.
    std::vector<double> overlay;
    /// NaN when some error is not positive.
    LogLogFit fit{std::nan(""), std::nan(""), std::nan("")};
    nlohmann::json protocol;
};

/// L2 distance between VIX^2 on the n_ref grid and on each coarser n, both taken from the same
/// draw (the n grid is every (n_ref/n)-th point). One curve per scheme, all sharing the draws.
std::vector<ErrorCurve> strong_error_curves(const std::vector<SchemeKind>& schemes,
                                            const std::vector<Eigen::Index>& n_values, Eigen::Index n_ref,
                                            std::int64_t M, const ModelParams& params, const StreamKey& key,
                                            const SimulationOptions& options = {});
ErrorCurve strong_error_curve(SchemeKind scheme, const std::vector<Eigen::Index>& n_values, Eigen::Index n_ref,
                              std::int64_t M, const ModelParams& params, const StreamKey& key,
                              const SimulationOptions& options = {});

/// |MC-with-CV price at n - reference| per n; half-width 1.96 se + reference_ci.
ErrorCurve weak_error_curve(SchemeKind scheme, const std::vector<Eigen::Index>& n_values, const Payoff& payoff,
                            double reference_price, double reference_ci, std::int64_t M, const ModelParams& params,
                            const StreamKey& key, const SimulationOptions& options = {});

enum class EstimatorFamily { McRect, MlRect, MlTrap };

std::string to_string(EstimatorFamily family);
EstimatorFamily family_from_string(const std::string& name);

struct MsePoint {
    double epsilon = 0.0;
    double cost = 0.0;
    double mse = 0.0;
    double ci_halfwidth = 0.0;
    double mean_estimate = 0.0;
    /// Plain MC: grid size n and M. Multilevel: n0, M0 and L.
    Eigen::Index n = 0;
    std::int64_t samples = 0;
    int levels = 0;
};

struct MseCostTable {
    EstimatorFamily family = EstimatorFamily::McRect;
    std::vector<MsePoint> points;
    LogLogFit fit{std::nan(""), std::nan(""), std::nan("")};
    nlohmann::json protocol;
};

/// N_mse independent replications per tolerance. Plain MC uses n = ceil(1/eps), M = ceil(eps^-2);
/// multilevel families use mlmc_plan(eps, n0, ...).
MseCostTable mse_cost_curve(EstimatorFamily family, const std::vector<double>& epsilons, int N_mse,
                            double reference_price, const ModelParams& params, const Payoff& payoff,
                            const StreamKey& key, const SimulationOptions& options = {}, Eigen::Index n0 = 6,
                            PlanMode plan_mode = PlanMode::Auto);

struct CovarianceCheck {
    int pairs = 0;
    double max_rel_deviation = 0.0;
    /// Parameters and points of the worst pair.
    ModelParams worst_params;
    double worst_ui = 0.0, worst_uj = 0.0;
    double seconds = 0.0;
};

/// Closed-form covariance against covariance_quadrature_oracle on random (u_i, u_j, params) with
/// H in [0.05, 0.45], eta in [0.1, 2], T in [0.05, 2], Delta in [1/52, 1/4].
CovarianceCheck covariance_check(int pairs, std::uint64_t seed);

void write_csv(std::ostream& out, const ErrorCurve& curve);
void write_csv(std::ostream& out, const MseCostTable& table);

/// SHA-1 of "blob <size>\0<content>", as git hashes file contents.
std::string git_blob_hash(const std::string& content);

/// Current UTC time as YYYYMMDDTHHMMSSZ.
std::string utc_timestamp();

/// `<experiment>_<scheme>_<timestamp>.<extension>`
std::string artifact_name(const std::string& experiment, const std::string& scheme, const std::string& timestamp,
                          const std::string& extension);

void to_json(nlohmann::json& j, const LogLogFit& f);
void to_json(nlohmann::json& j, const ErrorCurve& c);
void to_json(nlohmann::json& j, const MsePoint& p);
void to_json(nlohmann::json& j, const MseCostTable& t);
void to_json(nlohmann::json& j, const CovarianceCheck& c);

}  // namespace rbvix
