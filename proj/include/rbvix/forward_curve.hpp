#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace rbvix {

enum class Interpolation { LeftContinuousStep, Linear };

/// Initial log-forward-variance curve u -> X_0^u.
///
/// Either a constant, or a table of knots (u_k, x_k) with strictly increasing
/// u_k. Tables are extrapolated flat outside their knot range. The step
/// variant is left-continuous: on (u_{k-1}, u_k] the value is x_k.
class ForwardCurve {
public:
    ForwardCurve() : ForwardCurve(0.0) {}
    /* implicit */ ForwardCurve(double constant);
    ForwardCurve(std::vector<double> knots, std::vector<double> values, Interpolation interp);

    static ForwardCurve from_csv(const std::filesystem::path& path, Interpolation interp);

    double operator()(double u) const;

    bool is_constant() const noexcept { return knots_.empty(); }
    /// True when the curve takes a single value on [a, b].
    bool is_flat_on(double a, double b) const;

    double constant_value() const;
    const std::vector<double>& knots() const noexcept { return knots_; }
    const std::vector<double>& values() const noexcept { return values_; }
    Interpolation interpolation() const noexcept { return interp_; }

    friend bool operator==(const ForwardCurve&, const ForwardCurve&) = default;

private:
    double constant_ = 0.0;
    std::vector<double> knots_;
    std::vector<double> values_;
    Interpolation interp_ = Interpolation::Linear;
};

std::string to_string(Interpolation interp);
Interpolation interpolation_from_string(const std::string& name);

}  // namespace rbvix
