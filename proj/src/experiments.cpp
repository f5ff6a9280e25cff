#include "rbvix/experiments.hpp"

#include "rbvix/statistics.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace rbvix {

namespace {

constexpr double kZ95 = 1.96;

nlohmann::json params_json(const ModelParams& p) {
    nlohmann::json x0;
    if (p.x0.is_constant()) {
        x0 = p.x0.constant_value();
    } else {
        x0 = {{"knots", p.x0.knots()}, {"values", p.x0.values()}, {"interpolation", to_string(p.x0.interpolation())}};
    }
    return {{"hurst", p.hurst}, {"eta", p.eta}, {"maturity", p.maturity}, {"window", p.window}, {"x0", x0}};
}

nlohmann::json key_json(const StreamKey& k) {
    return {{"seed", k.seed}, {"experiment", k.experiment}, {"level", k.level}, {"batch", k.batch}};
}

LogLogFit fit_if_positive(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 3 || std::any_of(y.begin(), y.end(), [](double v) { return !(v > 0.0); }))
        return {std::nan(""), std::nan(""), std::nan("")};
    return fit_loglog_slope(x, y);
}

std::vector<double> as_double(const std::vector<Eigen::Index>& v) { return {v.begin(), v.end()}; }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

LogLogFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw UsageError("fit_loglog_slope: x and y lengths differ");
    if (x.size() < 3) throw UsageError("fit_loglog_slope: need at least 3 points");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw UsageError("fit_loglog_slope: x and y must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw UsageError("fit_loglog_slope: x values are all equal");
    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return fit;
}

std::vector<ErrorCurve> strong_error_curves(const std::vector<SchemeKind>& schemes,
                                            const std::vector<Eigen::Index>& n_values, Eigen::Index n_ref,
                                            std::int64_t M, const ModelParams& params, const StreamKey& key,
                                            const SimulationOptions& options) {
    if (schemes.empty()) throw UsageError("strong_error: no scheme selected");
    if (n_values.empty()) throw UsageError("n_values: empty");
    if (M < 2) throw UsageError("M: need at least 2 samples");
    for (auto n : n_values)
        if (n < 1 || n_ref % n != 0)
            throw UsageError("n_values: " + std::to_string(n) + " does not divide n_ref = " + std::to_string(n_ref));
    params.validate();

    const auto sampler = ExactSampler::build(params, n_ref);
    const std::size_t S = schemes.size(), K = n_values.size();
    using Block = std::vector<Moments>;
    auto parts = simulate_batches(sampler, M, key, options, [&](const Eigen::MatrixXd& x) {
        Block m(S * K);
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double* col = x.col(j).data();
            for (std::size_t s = 0; s < S; ++s) {
                const double ref = scheme_vix2(schemes[s], x.col(j));
                for (std::size_t k = 0; k < K; ++k) {
                    const double v = scheme_vix2(schemes[s], every_kth(col, n_ref, n_ref / n_values[k]));
                    m[s * K + k].add((ref - v) * (ref - v));
                }
            }
        }
        return m;
    });
    Block total(S * K);
    for (const auto& part : parts)
        for (std::size_t i = 0; i < total.size(); ++i) total[i].merge(part[i]);

    double lambda = std::nan("");
    try {
        lambda = lambda_constant(params);
    } catch (const UnsupportedHypothesis&) {
    }

    std::vector<ErrorCurve> curves;
    for (std::size_t s = 0; s < S; ++s) {
        ErrorCurve c;
        c.experiment = "strong-error";
        c.scheme = schemes[s];
        c.n_values = n_values;
        for (std::size_t k = 0; k < K; ++k) {
            const auto& m = total[s * K + k];
            const double err = std::sqrt(std::max(m.mean, 0.0));
            c.errors.push_back(err);
            c.ci_halfwidths.push_back(err > 0.0 ? kZ95 * m.std_error() / (2.0 * err) : 0.0);
            if (schemes[s] == SchemeKind::Rectangle && std::isfinite(lambda))
                c.overlay.push_back(lambda / static_cast<double>(n_values[k]));
        }
        c.fit = fit_if_positive(as_double(n_values), c.errors);
        c.protocol = {{"experiment", c.experiment}, {"scheme", to_string(c.scheme)}, {"n_ref", n_ref},
                      {"M", M},                     {"params", params_json(params)}, {"key", key_json(key)},
                      {"batch_size", options.batch_size}};
        if (std::isfinite(lambda)) c.protocol["lambda"] = lambda;
        curves.push_back(std::move(c));
    }
    return curves;
}

ErrorCurve strong_error_curve(SchemeKind scheme, const std::vector<Eigen::Index>& n_values, Eigen::Index n_ref,
                              std::int64_t M, const ModelParams& params, const StreamKey& key,
                              const SimulationOptions& options) {
    return strong_error_curves({scheme}, n_values, n_ref, M, params, key, options).front();
}

ErrorCurve weak_error_curve(SchemeKind scheme, const std::vector<Eigen::Index>& n_values, const Payoff& payoff,
                            double reference_price, double reference_ci, std::int64_t M, const ModelParams& params,
                            const StreamKey& key, const SimulationOptions& options) {
    if (n_values.empty()) throw UsageError("n_values: empty");
    if (!(reference_ci >= 0.0)) throw UsageError("reference_ci: must be >= 0");
    ErrorCurve c;
    c.experiment = "weak-error";
    c.scheme = scheme;
    c.n_values = n_values;
    for (std::size_t k = 0; k < n_values.size(); ++k) {
        const auto e = mc_price(scheme, n_values[k], M, payoff, true, params,
                                key.with_experiment(key.experiment + k), options);
        c.estimates.push_back(e.value);
        c.errors.push_back(std::abs(e.value - reference_price));
        c.ci_halfwidths.push_back(kZ95 * e.std_error + reference_ci);
    }
    c.fit = fit_if_positive(as_double(n_values), c.errors);
    c.protocol = {{"experiment", c.experiment},
                  {"scheme", to_string(scheme)},
                  {"M", M},
                  {"payoff", to_string(payoff.kind)},
                  {"kappa", payoff.strike},
                  {"reference_price", reference_price},
                  {"reference_ci", reference_ci},
                  {"cv", true},
                  {"params", params_json(params)},
                  {"key", key_json(key)},
                  {"batch_size", options.batch_size}};
    return c;
}

std::string to_string(EstimatorFamily family) {
    switch (family) {
        case EstimatorFamily::McRect: return "mc-rect";
        case EstimatorFamily::MlRect: return "ml-rect";
        case EstimatorFamily::MlTrap: return "ml-trap";
    }
    return "mc-rect";
}

EstimatorFamily family_from_string(const std::string& name) {
    if (name == "mc-rect") return EstimatorFamily::McRect;
    if (name == "ml-rect") return EstimatorFamily::MlRect;
    if (name == "ml-trap") return EstimatorFamily::MlTrap;
    throw UsageError("family: expected mc-rect, ml-rect or ml-trap, got '" + name + "'");
}

MseCostTable mse_cost_curve(EstimatorFamily family, const std::vector<double>& epsilons, int N_mse,
                            double reference_price, const ModelParams& params, const Payoff& payoff,
                            const StreamKey& key, const SimulationOptions& options, Eigen::Index n0,
                            PlanMode plan_mode) {
    if (epsilons.empty()) throw UsageError("epsilons: empty");
    if (N_mse < 2) throw UsageError("N_mse: need at least 2 replications");
    MseCostTable table;
    table.family = family;
    const auto family_tag = static_cast<std::uint64_t>(family) + 1;
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
        const double eps = epsilons[e];
        if (!(eps > 0.0)) throw UsageError("epsilon: must be > 0");
        MsePoint point;
        point.epsilon = eps;
        MlmcPlan plan;
        if (family == EstimatorFamily::McRect) {
            point.n = static_cast<Eigen::Index>(std::ceil(1.0 / eps));
            point.samples = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(1.0 / (eps * eps))));
        } else {
            const auto scheme = family == EstimatorFamily::MlRect ? SchemeKind::Rectangle : SchemeKind::Trapezoid;
            plan = mlmc_plan(eps, n0, scheme, payoff, params, plan_mode,
                             key.with_experiment((family_tag << 40) | (e << 20) | 0xFFFFF), {}, options);
            point.n = plan.n0;
            point.samples = plan.m0;
            point.levels = plan.L;
        }
        Moments sq, est;
        double cost = 0.0;
        for (int r = 0; r < N_mse; ++r) {
            const auto rkey = key.with_experiment((family_tag << 40) | (e << 20) | static_cast<std::uint64_t>(r));
            const Estimate result =
                family == EstimatorFamily::McRect
                    ? mc_price(SchemeKind::Rectangle, point.n, point.samples, payoff, false, params, rkey, options)
                    : mlmc_price(plan, payoff, params, rkey, options);
            const double d = result.value - reference_price;
            sq.add(d * d);
            est.add(result.value);
            cost = result.cost;
        }
        point.cost = cost;
        point.mse = sq.mean;
        point.ci_halfwidth = kZ95 * sq.std_error();
        point.mean_estimate = est.mean;
        table.points.push_back(point);
    }
    std::vector<double> costs, mses;
    for (const auto& p : table.points) {
        costs.push_back(p.cost);
        mses.push_back(p.mse);
    }
    table.fit = fit_if_positive(costs, mses);
    table.protocol = {{"experiment", "mse-cost"},
                      {"family", to_string(family)},
                      {"epsilons", epsilons},
                      {"N_mse", N_mse},
                      {"n0", n0},
                      {"plan", to_string(plan_mode)},
                      {"reference_price", reference_price},
                      {"payoff", to_string(payoff.kind)},
                      {"kappa", payoff.strike},
                      {"params", params_json(params)},
                      {"key", key_json(key)},
                      {"batch_size", options.batch_size}};
    return table;
}

CovarianceCheck covariance_check(int pairs, std::uint64_t seed) {
    if (pairs < 1) throw UsageError("pairs: must be >= 1");
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(seed);
    auto uniform = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    CovarianceCheck out;
    out.pairs = pairs;
    for (int k = 0; k < pairs; ++k) {
        ModelParams p;
        p.hurst = uniform(0.05, 0.45);
        p.eta = uniform(0.1, 2.0);
        p.maturity = uniform(0.05, 2.0);
        p.window = uniform(1.0 / 52.0, 0.25);
        const double ui = p.maturity + uniform(0.0, p.window);
        const double uj = p.maturity + uniform(0.0, p.window);
        const double closed = covariance_entry(ui, uj, p);
        const double oracle = covariance_quadrature_oracle(ui, uj, p);
        const double rel = std::abs(closed - oracle) / std::abs(oracle);
        if (!(rel <= out.max_rel_deviation)) {
            out.max_rel_deviation = rel;
            out.worst_params = p;
            out.worst_ui = ui;
            out.worst_uj = uj;
        }
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

void write_csv(std::ostream& out, const ErrorCurve& c) {
    const bool weak = c.experiment == "weak-error";
    out << "experiment,scheme,n,error,ci_halfwidth," << (weak ? "estimate" : "lambda_over_n") << "\n";
    for (std::size_t k = 0; k < c.n_values.size(); ++k) {
        out << c.experiment << ',' << to_string(c.scheme) << ',' << c.n_values[k] << ',' << fmt(c.errors[k]) << ','
            << fmt(c.ci_halfwidths[k]) << ',';
        if (weak)
            out << fmt(c.estimates[k]);
        else if (k < c.overlay.size())
            out << fmt(c.overlay[k]);
        out << "\n";
    }
}

void write_csv(std::ostream& out, const MseCostTable& t) {
    out << "family,epsilon,n,samples,levels,cost,mse,ci_halfwidth,mean_estimate\n";
    for (const auto& p : t.points) {
        out << to_string(t.family) << ',' << fmt(p.epsilon) << ',' << p.n << ',' << p.samples << ',' << p.levels << ','
            << fmt(p.cost) << ',' << fmt(p.mse) << ',' << fmt(p.ci_halfwidth) << ',' << fmt(p.mean_estimate) << "\n";
    }
}

std::string git_blob_hash(const std::string& content) {
    const std::string blob = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(blob.data(), blob.size(), digest, &length, EVP_sha1(), nullptr) != 1)
        throw NumericError("git_blob_hash: SHA-1 digest failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < length; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return hex.str();
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &utc);
    return stamp;
}

std::string artifact_name(const std::string& experiment, const std::string& scheme, const std::string& timestamp,
                          const std::string& extension) {
    return experiment + "_" + scheme + "_" + timestamp + "." + extension;
}

namespace {
// JSON has no NaN; absent values become null.
nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }
}  // namespace

void to_json(nlohmann::json& j, const LogLogFit& f) {
    j = {{"slope", number_or_null(f.slope)}, {"intercept", number_or_null(f.intercept)}, {"r2", number_or_null(f.r2)}};
}

void to_json(nlohmann::json& j, const ErrorCurve& c) {
    j = {{"experiment", c.experiment},
         {"scheme", to_string(c.scheme)},
         {"n_values", c.n_values},
         {"errors", c.errors},
         {"ci_halfwidths", c.ci_halfwidths},
         {"estimates", c.estimates},
         {"lambda_over_n", c.overlay},
         {"fit", c.fit},
         {"protocol", c.protocol}};
}

void to_json(nlohmann::json& j, const MsePoint& p) {
    j = {{"epsilon", p.epsilon}, {"cost", p.cost},       {"mse", p.mse},         {"ci_halfwidth", p.ci_halfwidth},
         {"mean_estimate", p.mean_estimate}, {"n", p.n}, {"samples", p.samples}, {"levels", p.levels}};
}

void to_json(nlohmann::json& j, const MseCostTable& t) {
    j = {{"family", to_string(t.family)}, {"points", t.points}, {"fit", t.fit}, {"protocol", t.protocol}};
}

void to_json(nlohmann::json& j, const CovarianceCheck& c) {
    j = {{"pairs", c.pairs},
         {"max_rel_deviation", c.max_rel_deviation},
         {"worst",
          {{"hurst", c.worst_params.hurst},
           {"eta", c.worst_params.eta},
           {"maturity", c.worst_params.maturity},
           {"window", c.worst_params.window},
           {"ui", c.worst_ui},
           {"uj", c.worst_uj}}},
         {"seconds", c.seconds}};
}

}  // namespace rbvix
