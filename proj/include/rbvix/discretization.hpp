#pragma once

#include "rbvix/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string>

namespace rbvix {

enum class SchemeKind { Rectangle, Trapezoid };

std::string to_string(SchemeKind kind);
SchemeKind scheme_from_string(const std::string& name);

namespace detail {

/// Neumaier-compensated accumulator.
template <typename Scalar>
struct CompensatedSum {
    Scalar sum{0};
    Scalar carry{0};
    void add(Scalar v) {
        const Scalar t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            carry += (sum - t) + v;
        else
            carry += (v - t) + sum;
        sum = t;
    }
    Scalar value() const { return sum + carry; }
};

template <typename Derived>
void check_quadrature_input(const Eigen::DenseBase<Derived>& y) {
    if (y.size() < 2) throw UsageError("quadrature scheme: sample must hold n + 1 >= 2 values");
}

}  // namespace detail

/// Right-point rectangle rule (1/n) sum_{i=1..n} y_i over values y_0..y_n.
///
/// Accumulated as y_n + (1/n) sum (y_i - y_n) with compensated summation, so a
/// constant input is returned exactly.
template <typename Derived>
typename Derived::Scalar rectangle_average(const Eigen::DenseBase<Derived>& y) {
    using Scalar = typename Derived::Scalar;
    detail::check_quadrature_input(y);
    const Eigen::Index n = y.size() - 1;
    const Scalar ref = y(n);
    detail::CompensatedSum<Scalar> acc;
    for (Eigen::Index i = 1; i < n; ++i) acc.add(y(i) - ref);
    return ref + acc.value() / static_cast<Scalar>(n);
}

/// Trapezoidal rule (1/2n) sum_{i=1..n} (y_i + y_{i-1}).
template <typename Derived>
typename Derived::Scalar trapezoid_average(const Eigen::DenseBase<Derived>& y) {
    using Scalar = typename Derived::Scalar;
    detail::check_quadrature_input(y);
    const Eigen::Index n = y.size() - 1;
    const Scalar ref = y(n);
    detail::CompensatedSum<Scalar> acc;
    acc.add((y(0) - ref) / Scalar(2));
    for (Eigen::Index i = 1; i < n; ++i) acc.add(y(i) - ref);
    return ref + acc.value() / static_cast<Scalar>(n);
}

template <typename Derived>
typename Derived::Scalar scheme_average(SchemeKind kind, const Eigen::DenseBase<Derived>& y) {
    return kind == SchemeKind::Rectangle ? rectangle_average(y) : trapezoid_average(y);
}

/// Rectangle VIX^2 from log-forward variances X_T^{u_0..u_n}.
template <typename Derived>
typename Derived::Scalar rectangle_vix2(const Eigen::DenseBase<Derived>& x) {
    using Scalar = typename Derived::Scalar;
    return rectangle_average(x.derived().unaryExpr([](Scalar v) { return std::exp(v); }).eval());
}

/// Trapezoidal VIX^2 from log-forward variances X_T^{u_0..u_n}.
template <typename Derived>
typename Derived::Scalar trapezoid_vix2(const Eigen::DenseBase<Derived>& x) {
    using Scalar = typename Derived::Scalar;
    return trapezoid_average(x.derived().unaryExpr([](Scalar v) { return std::exp(v); }).eval());
}

template <typename Derived>
typename Derived::Scalar scheme_vix2(SchemeKind kind, const Eigen::DenseBase<Derived>& x) {
    return kind == SchemeKind::Rectangle ? rectangle_vix2(x) : trapezoid_vix2(x);
}

/// Zero-copy view of entries 0, k, 2k, ..., of a contiguous column: the grid with n/k steps.
inline Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<>> every_kth(const double* data, Eigen::Index fine_steps,
                                                                           Eigen::Index k) {
    return {data, fine_steps / k + 1, Eigen::InnerStride<>(k)};
}

double vix_from_vix2(double vix2);

}  // namespace rbvix
