#pragma once

#include "rbvix/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rbvix {

namespace detail {

template <typename Scalar>
[[noreturn]] void throw_hyp2f1_divergence(Scalar a, Scalar b, Scalar c, Scalar x) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "hyp2f1(" << a << ", " << b << "; " << c << "; " << x << ") did not converge";
    throw NumericError(msg.str());
}

template <typename Scalar>
bool is_nonpositive_integer(Scalar v) {
    return v <= Scalar(0) && v == std::round(v);
}

/// 1/Gamma(v), zero at the poles.
template <typename Scalar>
Scalar reciprocal_gamma(Scalar v) {
    if (is_nonpositive_integer(v)) return Scalar(0);
    return Scalar(1) / std::tgamma(v);
}

/// Plain power series sum_k (a)_k (b)_k / ((c)_k k!) z^k for |z| < 1.
///
/// Stops once the remaining tail, bounded geometrically by the current term
/// ratio, falls below the working precision relative to the partial sum.
template <typename Scalar>
Scalar hyp2f1_series(Scalar a, Scalar b, Scalar c, Scalar z, long max_terms, bool& converged) {
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    Scalar term(1);
    Scalar sum(1);
    converged = false;
    for (long k = 0; k < max_terms; ++k) {
        const Scalar kk = static_cast<Scalar>(k);
        const Scalar ratio = (a + kk) * (b + kk) / ((c + kk) * (kk + Scalar(1))) * z;
        term *= ratio;
        sum += term;
        if (term == Scalar(0)) {
            converged = true;
            return sum;
        }
        const Scalar r = std::abs(ratio);
        if (k > 2 && r < Scalar(1) && std::abs(term) * r / (Scalar(1) - r) <= eps * std::abs(sum)) {
            converged = true;
            return sum;
        }
    }
    return sum;
}

}  // namespace detail

/// Gauss hypergeometric function 2F1(a, b; c; x) for c > 0 and x <= 0.
///
/// For -3 <= x < 0 the Pfaff transformation maps the argument to
/// z = x / (x - 1) in (0, 3/4] where the series converges geometrically.
/// Below -3 the 1/x connection formula is used (two series in 1/x); if b - a
/// is too close to an integer for that formula, the Pfaff series is summed
/// directly up to `max_terms`.
template <typename Scalar>
Scalar hyp2f1(Scalar a, Scalar b, Scalar c, Scalar x, long max_terms = 200000) {
    if (!(c > Scalar(0))) throw UsageError("hyp2f1: requires c > 0");
    if (!(x <= Scalar(0))) throw UsageError("hyp2f1: only implemented for x <= 0");
    if (x == Scalar(0) || a == Scalar(0) || b == Scalar(0)) return Scalar(1);

    bool converged = false;
    const Scalar one(1);
    const Scalar b_minus_a = b - a;
    const bool connection_ok = std::abs(b_minus_a - std::round(b_minus_a)) > Scalar(1e-6);

    if (x >= Scalar(-3) || !connection_ok) {
        const Scalar z = x / (x - one);
        const Scalar value = std::pow(one - x, -a) * detail::hyp2f1_series(a, c - b, c, z, max_terms, converged);
        if (!converged) detail::throw_hyp2f1_divergence(a, b, c, x);
        return value;
    }

    const Scalar w = one / x;
    const Scalar gc = std::tgamma(c);
    const Scalar first_coef = gc * std::tgamma(b_minus_a) * detail::reciprocal_gamma(b) * detail::reciprocal_gamma(c - a);
    const Scalar second_coef = gc * std::tgamma(-b_minus_a) * detail::reciprocal_gamma(a) * detail::reciprocal_gamma(c - b);

    Scalar value(0);
    if (first_coef != Scalar(0)) {
        const Scalar s = detail::hyp2f1_series(a, a - c + one, one - b_minus_a, w, max_terms, converged);
        if (!converged) detail::throw_hyp2f1_divergence(a, b, c, x);
        value += first_coef * std::pow(-x, -a) * s;
    }
    if (second_coef != Scalar(0)) {
        const Scalar s = detail::hyp2f1_series(b, b - c + one, one + b_minus_a, w, max_terms, converged);
        if (!converged) detail::throw_hyp2f1_divergence(a, b, c, x);
        value += second_coef * std::pow(-x, -b) * s;
    }
    if (!std::isfinite(value)) detail::throw_hyp2f1_divergence(a, b, c, x);
    return value;
}

}  // namespace rbvix
