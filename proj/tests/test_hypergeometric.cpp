#include "rbvix/hypergeometric.hpp"
#include "rbvix/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace rbvix;

namespace {

// With b = 1/2 + H and c = b + 1 Euler's integral collapses (t = s^{1/b}) to
// 2F1(a, b; b + 1; x) = int_0^1 (1 - x s^{1/b})^{-a} ds.
double euler_oracle(double h, double x) {
    const double a = 0.5 - h, b = 0.5 + h;
    auto f = [&](double s) { return std::pow(1.0 - x * std::pow(s, 1.0 / b), -a); };
    return integrate(f, 0.0, 1.0, 1e-15, 1e-14).value;
}

}  // namespace

TEST(Hyp2f1, FrozenValue) {
    // mpmath.hyp2f1(0.2, 0.8, 1.8, -3) at 40 digits
    EXPECT_NEAR(hyp2f1(0.2, 0.8, 1.8, -3.0), 0.86053041688991336516, 1e-14);
}

TEST(Hyp2f1, TrivialArguments) {
    EXPECT_EQ(hyp2f1(0.3, 0.7, 1.7, 0.0), 1.0);
    EXPECT_EQ(hyp2f1(0.0, 0.7, 1.7, -5.0), 1.0);
    EXPECT_EQ(hyp2f1(0.3, 0.0, 1.7, -5.0), 1.0);
}

TEST(Hyp2f1, MatchesEulerIntegralAcrossRegimes) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> hurst(0.05, 0.45);
    for (double x : {-1e-6, -0.5, -2.9, -3.0, -3.1, -10.0, -250.0, -1e4, -3e5}) {
        for (int k = 0; k < 6; ++k) {
            const double h = hurst(rng);
            const double expected = euler_oracle(h, x);
            EXPECT_NEAR(hyp2f1(0.5 - h, 0.5 + h, 1.5 + h, x), expected, 1e-12 * std::abs(expected))
                << "H=" << h << " x=" << x;
        }
    }
}

TEST(Hyp2f1, IntegerParameterGapFallsBackToSeries) {
    // b - a = 1 makes the 1/x connection formula singular.
    auto f = [](double t) { return std::sqrt(t) / std::sqrt(1.0 + 10.0 * t); };
    const double expected = std::tgamma(2.5) / std::tgamma(1.5) * integrate(f, 0.0, 1.0, 1e-15, 1e-14).value;
    EXPECT_NEAR(hyp2f1(0.5, 1.5, 2.5, -10.0), expected, 1e-11 * expected);
}

TEST(Hyp2f1, LongDoubleAgreesWithDouble) {
    const long double v = hyp2f1<long double>(0.4L, 0.6L, 1.6L, -40.0L);
    EXPECT_NEAR(static_cast<double>(v), hyp2f1(0.4, 0.6, 1.6, -40.0), 1e-14);
}

TEST(Hyp2f1, RejectsOutsideDomain) {
    EXPECT_THROW(hyp2f1(0.2, 0.8, -1.0, -1.0), UsageError);
    EXPECT_THROW(hyp2f1(0.2, 0.8, 1.8, 0.5), UsageError);
}

TEST(Quadrature, PolynomialExact) {
    auto r = integrate([](double x) { return x * x * x; }, 0.0, 2.0);
    EXPECT_NEAR(r.value, 4.0, 1e-14);
}

TEST(Quadrature, ReversedBoundsNegate) {
    auto r = integrate([](double x) { return std::exp(x); }, 1.0, 0.0);
    EXPECT_NEAR(r.value, -(std::exp(1.0) - 1.0), 1e-14);
}

TEST(Quadrature, ThrowsWhenBudgetExhausted) {
    EXPECT_THROW(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-16, 1e-16, 3), NumericError);
}
