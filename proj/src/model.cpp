#include "rbvix/model.hpp"

#include "rbvix/quadrature.hpp"

#include <sstream>

namespace rbvix {

std::vector<std::string> ModelParams::violations() const {
    std::vector<std::string> out;
    if (!(hurst > 0.0 && hurst < 1.0)) out.push_back("H: Hurst index must lie in (0, 1), got " + std::to_string(hurst));
    if (!(eta >= 0.0) || !std::isfinite(eta)) out.push_back("eta: vol-of-vol must be >= 0, got " + std::to_string(eta));
    if (!(maturity > 0.0) || !std::isfinite(maturity)) out.push_back("T: maturity must be > 0, got " + std::to_string(maturity));
    if (!(window > 0.0) || !std::isfinite(window)) out.push_back("Delta: window must be > 0, got " + std::to_string(window));
    if (out.empty()) {
        for (double u : {maturity, maturity + 0.5 * window, maturity + window}) {
            if (!std::isfinite(x0(u))) {
                out.push_back("x0: curve is not finite on [T, T+Delta]");
                break;
            }
        }
    }
    return out;
}

void ModelParams::validate() const {
    const auto problems = violations();
    if (problems.empty()) return;
    std::ostringstream msg;
    for (std::size_t k = 0; k < problems.size(); ++k) msg << (k ? "; " : "") << problems[k];
    throw UsageError(msg.str());
}

Grid::Grid(double maturity, double window, Eigen::Index steps) : maturity_(maturity), window_(window), steps_(steps) {
    if (steps < 1) throw UsageError("grid: n must be >= 1");
    if (!(window > 0.0)) throw UsageError("grid: Delta must be > 0");
}

Eigen::VectorXd Grid::points() const {
    Eigen::VectorXd pts(size());
    for (Eigen::Index i = 0; i < size(); ++i) pts(i) = point(i);
    return pts;
}

double kernel_eval(double u, double s, const ModelParams& params) {
    if (!(s < u)) throw UsageError("kernel_eval: requires s < u");
    return params.eta * std::pow(u - s, params.hurst - 0.5);
}

namespace {

// Fraction of [0, T] treated as the near-singular panel.
constexpr double kSingularPanel = 0.25;

}  // namespace

double covariance_quadrature_oracle(double ui, double uj, const ModelParams& p) {
    const double t = p.maturity;
    if (ui < t || uj < t) throw UsageError("covariance oracle: u_i and u_j must be >= T");
    if (p.eta == 0.0) return 0.0;
    const double h = p.hurst;
    const double expo = h - 0.5;
    // Integrate in the distance d = T - s so that the offsets u - T stay exact near the singularity.
    const double ai = ui - t, aj = uj - t;
    const double near = std::min(ai, aj), far = std::max(ai, aj);
    auto integrand = [&](double d) { return std::pow(ai + d, expo) * std::pow(aj + d, expo); };

    constexpr double abs_tol = 1e-15, rel_tol = 1e-13;
    const double panel = kSingularPanel * t;
    double value = 0.0;
    if (h >= 0.5 || near >= panel) {
        value = integrate(integrand, 0.0, t, abs_tol, rel_tol).value;
    } else {
        // d = tau^q on the last panel absorbs d^{H-1/2}, or its square when both points sit close to T.
        const double q = (far < panel) ? 1.0 / (2.0 * h) : 1.0 / (h + 0.5);
        auto substituted = [&](double tau) {
            if (tau <= 0.0) return 0.0;
            const double d = std::pow(tau, q);
            return integrand(d) * q * d / tau;
        };
        value = integrate(integrand, panel, t, abs_tol, rel_tol).value +
                integrate(substituted, 0.0, std::pow(panel, 1.0 / q), abs_tol, rel_tol).value;
    }
    return p.eta * p.eta * value;
}

double lambda_integral(double hurst, double maturity, double window) {
    if (!(hurst > 0.0 && hurst < 0.5)) throw UsageError("lambda_integral: requires 0 < H < 1/2");
    if (maturity < 0.0 || !(window > 0.0)) throw UsageError("lambda_integral: requires T >= 0 and Delta > 0");
    if (maturity == 0.0) return 0.0;
    // t = tau^q with q (H + 1/2) = 1 turns t^{H-1/2} dt into q dtau.
    const double q = 1.0 / (hurst + 0.5);
    const double expo = hurst - 0.5;
    auto f = [&](double tau) { return q * std::pow(window + std::pow(tau, q), expo); };
    return integrate(f, 0.0, std::pow(maturity, 1.0 / q), 1e-15, 1e-13).value;
}

double lambda_integral(const ModelParams& p) { return lambda_integral(p.hurst, p.maturity, p.window); }

}  // namespace rbvix
