#pragma once

#include "rbvix/errors.hpp"
#include "rbvix/forward_curve.hpp"
#include "rbvix/hypergeometric.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

namespace rbvix {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Rough Bergomi forward-variance model with power-law kernel K(u,s) = eta (u-s)^{H-1/2}.
struct ModelParams {
    double hurst = 0.1;
    double eta = 0.5;
    double maturity = 0.5;       ///< T, years
    double window = 1.0 / 12.0;  ///< Delta, years
    ForwardCurve x0 = ForwardCurve(std::log(0.235 * 0.235));

    /// One message per violated invariant, each naming the offending field.
    std::vector<std::string> violations() const;
    /// Throws UsageError listing every violation.
    void validate() const;

    /// X_0 constant on [T, T + Delta].
    bool has_flat_x0() const { return x0.is_flat_on(maturity, maturity + window); }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Uniform mesh u_i = T + i Delta / n, i = 0..n.
class Grid {
public:
    Grid(double maturity, double window, Eigen::Index steps);
    static Grid for_model(const ModelParams& params, Eigen::Index steps) {
        return Grid(params.maturity, params.window, steps);
    }

    Eigen::Index steps() const noexcept { return steps_; }
    Eigen::Index size() const noexcept { return steps_ + 1; }
    double maturity() const noexcept { return maturity_; }
    double window() const noexcept { return window_; }
    double spacing() const noexcept { return window_ / static_cast<double>(steps_); }
    double point(Eigen::Index i) const {
        // (i Delta) / n keeps nested grids bit-identical: point 2k of n equals point k of n/2.
        return maturity_ + (static_cast<double>(i) * window_) / static_cast<double>(steps_);
    }
    Eigen::VectorXd points() const;

private:
    double maturity_;
    double window_;
    Eigen::Index steps_;
};

/// eta (u - s)^{H - 1/2}, defined for s < u.
double kernel_eval(double u, double s, const ModelParams& params);

/// Var(X_T^u) = eta^2 / (2H) (u^{2H} - (u - T)^{2H}).
template <typename Scalar = double>
Scalar variance_closed_form(Scalar u, const ModelParams& p) {
    const Scalar h(p.hurst), eta(p.eta), t(p.maturity);
    return eta * eta / (Scalar(2) * h) * (std::pow(u, Scalar(2) * h) - std::pow(u - t, Scalar(2) * h));
}

namespace detail {
inline void check_grid_matches(const Grid& grid, const ModelParams& p) {
    if (grid.maturity() != p.maturity || grid.window() != p.window)
        throw UsageError("grid [T, T+Delta] does not match the model's maturity/window");
}
}  // namespace detail

/// mu(u_i) = X_0^{u_i} - eta^2/(4H) (u_i^{2H} - (u_i - T)^{2H}), i = 0..n.
template <typename Scalar = double>
VectorX<Scalar> mean_vector(const Grid& grid, const ModelParams& p) {
    detail::check_grid_matches(grid, p);
    VectorX<Scalar> mean(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double u = grid.point(i);
        mean(i) = Scalar(p.x0(u)) - variance_closed_form<Scalar>(Scalar(u), p) / Scalar(2);
    }
    return mean;
}

/// Cov(X_T^{u_i}, X_T^{u_j}) = eta^2 int_0^T (u_i - s)^{H-1/2} (u_j - s)^{H-1/2} ds.
///
/// Off the diagonal, with lo = min, delta = |u_j - u_i| and
/// Z(v) = v^{H+1/2} 2F1(1/2-H, 1/2+H; 3/2+H; -v/delta):
///   C = eta^2 delta^{H-1/2} / (H+1/2) [Z(lo) - Z(lo - T)].
/// The argument order does not matter: both orders take the same path.
template <typename Scalar = double>
Scalar covariance_entry(Scalar ui, Scalar uj, const ModelParams& p) {
    const Scalar t(p.maturity);
    if (ui < t || uj < t) throw UsageError("covariance_entry: u_i and u_j must be >= T");
    if (ui == uj) return variance_closed_form<Scalar>(ui, p);
    const Scalar lo = std::min(ui, uj);
    const Scalar delta = std::max(ui, uj) - lo;
    const Scalar h(p.hurst), eta(p.eta);
    const Scalar half(0.5);
    const Scalar a = half - h, b = half + h, c = Scalar(1.5) + h;
    auto antiderivative = [&](Scalar v) -> Scalar {
        if (v <= Scalar(0)) return Scalar(0);
        return std::pow(v, b) * hyp2f1(a, b, c, -v / delta);
    };
    return eta * eta * std::pow(delta, h - half) / b * (antiderivative(lo) - antiderivative(lo - t));
}

/// Full (n+1) x (n+1) covariance on the grid, one evaluation per unordered pair.
template <typename Scalar = double>
MatrixX<Scalar> covariance_matrix(const Grid& grid, const ModelParams& p) {
    detail::check_grid_matches(grid, p);
    const Eigen::Index size = grid.size();
    MatrixX<Scalar> cov(size, size);
    for (Eigen::Index j = 0; j < size; ++j) {
        const Scalar uj(grid.point(j));
        for (Eigen::Index i = j; i < size; ++i) {
            cov(i, j) = covariance_entry<Scalar>(Scalar(grid.point(i)), uj, p);
            cov(j, i) = cov(i, j);
        }
    }
    return cov;
}

/// Mean and covariance of (X_T^{u_i})_{i=0..n}.
template <typename Scalar = double>
struct GaussianSpec {
    Grid grid;
    VectorX<Scalar> mean;
    MatrixX<Scalar> cov;
};

template <typename Scalar = double>
GaussianSpec<Scalar> gaussian_spec(const Grid& grid, const ModelParams& p) {
    return {grid, mean_vector<Scalar>(grid, p), covariance_matrix<Scalar>(grid, p)};
}

/// Adaptive-quadrature evaluation of the covariance integral, independent of the 2F1 route.
double covariance_quadrature_oracle(double ui, double uj, const ModelParams& p);

/// int_0^T t^{H-1/2} (Delta + t)^{H-1/2} dt, the cross term of the strong-error constant.
double lambda_integral(double hurst, double maturity, double window);
double lambda_integral(const ModelParams& p);

}  // namespace rbvix
