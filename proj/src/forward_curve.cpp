#include "rbvix/forward_curve.hpp"

#include "rbvix/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rbvix {

ForwardCurve::ForwardCurve(double constant) : constant_(constant) {
    if (!std::isfinite(constant)) throw UsageError("x0: initial log-forward variance must be finite");
}

ForwardCurve::ForwardCurve(std::vector<double> knots, std::vector<double> values, Interpolation interp)
    : knots_(std::move(knots)), values_(std::move(values)), interp_(interp) {
    if (knots_.empty() || knots_.size() != values_.size())
        throw UsageError("x0 table: knots and values must be non-empty and of equal length");
    for (std::size_t k = 0; k < knots_.size(); ++k) {
        if (!std::isfinite(knots_[k]) || !std::isfinite(values_[k]))
            throw UsageError("x0 table: non-finite entry at row " + std::to_string(k));
        if (k > 0 && !(knots_[k] > knots_[k - 1]))
            throw UsageError("x0 table: knots must be strictly increasing (row " + std::to_string(k) + ")");
    }
}

double ForwardCurve::operator()(double u) const {
    if (knots_.empty()) return constant_;
    if (u <= knots_.front()) return values_.front();
    if (u >= knots_.back()) return values_.back();
    // first knot >= u
    const auto it = std::lower_bound(knots_.begin(), knots_.end(), u);
    const auto k = static_cast<std::size_t>(it - knots_.begin());
    if (interp_ == Interpolation::LeftContinuousStep) return values_[k];
    const double w = (u - knots_[k - 1]) / (knots_[k] - knots_[k - 1]);
    return (1.0 - w) * values_[k - 1] + w * values_[k];
}

bool ForwardCurve::is_flat_on(double a, double b) const {
    if (knots_.empty()) return true;
    const double first = (*this)(a);
    if ((*this)(b) != first) return false;
    for (std::size_t k = 0; k < knots_.size(); ++k) {
        if (knots_[k] >= a && knots_[k] <= b && values_[k] != first) return false;
    }
    // a step curve can jump right after a knot inside the window
    for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
        if (knots_[k] >= a && knots_[k] < b && values_[k + 1] != first) return false;
    }
    return true;
}

double ForwardCurve::constant_value() const {
    if (!knots_.empty()) throw UsageError("x0 curve is tabulated, not constant");
    return constant_;
}

ForwardCurve ForwardCurve::from_csv(const std::filesystem::path& path, Interpolation interp) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open x0 curve file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError("x0 curve file is empty: " + path.string());
    std::vector<double> knots, values;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double u = 0.0, x = 0.0;
        if (!(fields >> u >> x))
            throw IoError(path.string() + ":" + std::to_string(row) + ": expected two numeric columns (u, x0)");
        knots.push_back(u);
        values.push_back(x);
    }
    return ForwardCurve(std::move(knots), std::move(values), interp);
}

std::string to_string(Interpolation interp) {
    return interp == Interpolation::Linear ? "linear" : "step";
}

Interpolation interpolation_from_string(const std::string& name) {
    if (name == "linear") return Interpolation::Linear;
    if (name == "step") return Interpolation::LeftContinuousStep;
    throw UsageError("x0-interp: expected 'linear' or 'step', got '" + name + "'");
}

}  // namespace rbvix
