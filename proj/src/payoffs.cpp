#include "rbvix/payoffs.hpp"

#include <cmath>

namespace rbvix {

std::string to_string(PayoffKind kind) {
    switch (kind) {
        case PayoffKind::Call: return "call";
        case PayoffKind::Put: return "put";
        case PayoffKind::Future: return "future";
    }
    return "call";
}

PayoffKind payoff_kind_from_string(const std::string& name) {
    if (name == "call") return PayoffKind::Call;
    if (name == "put") return PayoffKind::Put;
    if (name == "future") return PayoffKind::Future;
    throw UsageError("payoff: expected call, put or future, got '" + name + "'");
}

void Payoff::validate() const {
    if (kind != PayoffKind::Future && !(strike > 0.0 && std::isfinite(strike)))
        throw UsageError("kappa: strike must be positive for " + to_string(kind));
}

double lipschitz_constant(const Payoff& p) {
    if (p.kind == PayoffKind::Future)
        throw UsageError("lipschitz_constant: sqrt(x) has no finite Lipschitz constant on [0, inf)");
    if (p.kind == PayoffKind::Put)
        throw UsageError("lipschitz_constant: (K - sqrt(x))+ has slope 1/(2 sqrt(x)), unbounded near 0");
    p.validate();
    return 1.0 / (2.0 * p.strike);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double black_scholes(OptionType type, double x, double y, double z) {
    if (!(x > 0.0) || !(y > 0.0)) throw UsageError("black_scholes: forward and strike must be positive");
    if (!(z >= 0.0)) throw UsageError("black_scholes: total volatility must be >= 0");
    if (z == 0.0) return type == OptionType::Call ? std::max(x - y, 0.0) : std::max(y - x, 0.0);
    const double m = std::log(x / y) / z;
    const double d1 = m + 0.5 * z;
    const double d2 = m - 0.5 * z;
    if (type == OptionType::Call) return x * normal_cdf(d1) - y * normal_cdf(d2);
    return y * normal_cdf(-d2) - x * normal_cdf(-d1);
}

CvMoments cv_moments(const GaussianSpec<double>& spec, Eigen::Index n) {
    if (spec.grid.steps() != n || spec.mean.size() != n + 1)
        throw UsageError("cv_moments: spec was not built on the n-step grid");
    const double mu = right_point_log_mean(spec.mean);
    detail::CompensatedSum<double> total;
    for (Eigen::Index j = 1; j <= n; ++j)
        for (Eigen::Index i = 1; i <= n; ++i) total.add(spec.cov(i, j));
    const double nn = static_cast<double>(n);
    const double var = total.value() / (nn * nn);
    return {mu, std::sqrt(std::max(var, 0.0))};
}

CvMoments cv_moments(const ModelParams& params, Eigen::Index n) {
    return cv_moments(gaussian_spec<double>(Grid::for_model(params, n), params), n);
}

double cv_price(const Payoff& p, const CvMoments& m) {
    const double forward = std::exp(0.5 * m.mu_n + m.sigma_n * m.sigma_n / 8.0);
    const double vol = 0.5 * m.sigma_n;
    switch (p.kind) {
        case PayoffKind::Call: return black_scholes(OptionType::Call, forward, p.strike, vol);
        case PayoffKind::Put: return black_scholes(OptionType::Put, forward, p.strike, vol);
        case PayoffKind::Future: break;
    }
    return forward;
}

}  // namespace rbvix
