#pragma once

#include "rbvix/discretization.hpp"
#include "rbvix/model.hpp"

#include <Eigen/Core>

#include <string>

namespace rbvix {

enum class PayoffKind { Call, Put, Future };

std::string to_string(PayoffKind kind);
PayoffKind payoff_kind_from_string(const std::string& name);

/// Option on the VIX; the strike is in volatility units and ignored for the future.
struct Payoff {
    PayoffKind kind = PayoffKind::Call;
    double strike = 0.1;

    static Payoff call(double strike) { return {PayoffKind::Call, strike}; }
    static Payoff put(double strike) { return {PayoffKind::Put, strike}; }
    static Payoff future() { return {PayoffKind::Future, 0.0}; }

    void validate() const;
    friend bool operator==(const Payoff&, const Payoff&) = default;
};

/// phi(VIX^2): (sqrt(x) - K)+, (K - sqrt(x))+ or sqrt(x).
inline double payoff_eval(const Payoff& p, double vix2) {
    const double vix = std::sqrt(vix2);
    switch (p.kind) {
        case PayoffKind::Call: return vix > p.strike ? vix - p.strike : 0.0;
        case PayoffKind::Put: return p.strike > vix ? p.strike - vix : 0.0;
        case PayoffKind::Future: break;
    }
    return vix;
}

/// Lipschitz constant of the call x -> (sqrt(x) - K)+ on [0, inf): 1/(2K).
/// The put and the future have unbounded slope at 0 and throw UsageError.
double lipschitz_constant(const Payoff& p);

/// Standard normal CDF via erfc.
double normal_cdf(double x);

enum class OptionType { Call, Put };

/// Black-Scholes price with forward x, strike y and total volatility z; intrinsic value at z = 0.
double black_scholes(OptionType type, double x, double y, double z);

/// Mean and standard deviation of (1/n) sum_{i=1..n} X_T^{u_i}.
struct CvMoments {
    double mu_n = 0.0;
    double sigma_n = 0.0;
};

CvMoments cv_moments(const GaussianSpec<double>& spec, Eigen::Index n);
CvMoments cv_moments(const ModelParams& params, Eigen::Index n);

/// E[phi(exp(mean of X over 1..n))], lognormal closed form.
double cv_price(const Payoff& p, const CvMoments& m);

/// Mean of X over indices 1..n, shifted so constant input is reproduced exactly.
template <typename Derived>
typename Derived::Scalar right_point_log_mean(const Eigen::DenseBase<Derived>& x) {
    return rectangle_average(x);
}

/// phi(scheme_value) - phi(cv_sample_value) + cv_n, where cv_sample_value = exp(right_point_log_mean).
inline double cv_corrected_payoff(const Payoff& p, double scheme_value, double cv_sample_value, double cv_n) {
    return payoff_eval(p, scheme_value) - payoff_eval(p, cv_sample_value) + cv_n;
}

}  // namespace rbvix
