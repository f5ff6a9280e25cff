#include "rbvix/discretization.hpp"
#include "rbvix/sampler.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace rbvix;

namespace {

Eigen::VectorXd random_values(Eigen::Index size, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(-3.0, 0.8);
    Eigen::VectorXd x(size);
    for (auto& v : x) v = z(rng);
    return x;
}

}  // namespace

TEST(Schemes, TrapezoidIsMeanOfLeftAndRightRectangles) {
    for (Eigen::Index n : {1, 2, 7, 64, 500}) {
        const Eigen::VectorXd y = random_values(n + 1, static_cast<unsigned>(n)).array().exp();
        const double right = rectangle_average(y);
        long double left = 0;
        for (Eigen::Index i = 0; i < n; ++i) left += y(i);
        left /= n;
        const double expected = 0.5 * (static_cast<double>(left) + right);
        EXPECT_NEAR(trapezoid_average(y), expected, 1e-15 * expected) << "n=" << n;
    }
}

TEST(Schemes, MatchExtendedPrecisionSums) {
    const Eigen::VectorXd x = random_values(1001, 1);
    long double rect = 0, trap = 0;
    for (Eigen::Index i = 1; i <= 1000; ++i) {
        rect += std::exp(static_cast<long double>(x(i)));
        trap += 0.5L * (std::exp(static_cast<long double>(x(i))) + std::exp(static_cast<long double>(x(i - 1))));
    }
    EXPECT_NEAR(rectangle_vix2(x), static_cast<double>(rect / 1000), 1e-15 * static_cast<double>(rect / 1000));
    EXPECT_NEAR(trapezoid_vix2(x), static_cast<double>(trap / 1000), 1e-15 * static_cast<double>(trap / 1000));
}

TEST(Schemes, ConstantInputIsReproducedExactly) {
    for (double x0 : {std::log(0.235 * 0.235), -2.896, 0.3}) {
        for (Eigen::Index n : {1, 2, 3, 7, 10, 99, 400}) {
            const Eigen::VectorXd x = Eigen::VectorXd::Constant(n + 1, x0);
            EXPECT_EQ(rectangle_vix2(x), std::exp(x0));
            EXPECT_EQ(trapezoid_vix2(x), std::exp(x0));
        }
    }
}

TEST(Schemes, FlatModelSamplesGiveExactVix2) {
    ModelParams p;
    p.eta = 0.0;
    p.x0 = -2.5;
    const auto sampler = ExactSampler::build(p, 25);
    Eigen::MatrixXd normals, x(26, 50);
    NormalStream s({1});
    sampler.draw(s, normals, x);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        EXPECT_EQ(rectangle_vix2(x.col(j)), std::exp(-2.5));
        EXPECT_EQ(trapezoid_vix2(x.col(j)), std::exp(-2.5));
    }
}

TEST(Schemes, StridedViewSelectsCoarseGrid) {
    const Eigen::VectorXd x = random_values(17, 4);
    const auto view = every_kth(x.data(), 16, 4);
    ASSERT_EQ(view.size(), 5);
    Eigen::VectorXd expected(5);
    expected << x(0), x(4), x(8), x(12), x(16);
    EXPECT_EQ(rectangle_vix2(view), rectangle_vix2(expected));
    EXPECT_EQ(trapezoid_vix2(view), trapezoid_vix2(expected));
}

TEST(Schemes, RejectBadInput) {
    EXPECT_THROW(rectangle_average(Eigen::VectorXd::Ones(1)), UsageError);
    EXPECT_THROW(vix_from_vix2(-1e-3), UsageError);
    EXPECT_EQ(vix_from_vix2(0.04), 0.2);
    EXPECT_EQ(scheme_from_string("trapezoid"), SchemeKind::Trapezoid);
    EXPECT_THROW(scheme_from_string("simpson"), UsageError);
}

TEST(Schemes, ConvergenceOrderOnSmoothIntegrand) {
    // int_0^1 e^t dt on n steps: rectangle error ~ 1/n, trapezoid ~ 1/n^2
    auto err = [](SchemeKind kind, Eigen::Index n) {
        Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(n + 1, 0.0, 1.0);
        return std::abs(scheme_vix2(kind, x) - (std::exp(1.0) - 1.0));
    };
    EXPECT_NEAR(err(SchemeKind::Rectangle, 100) / err(SchemeKind::Rectangle, 200), 2.0, 0.02);
    EXPECT_NEAR(err(SchemeKind::Trapezoid, 100) / err(SchemeKind::Trapezoid, 200), 4.0, 0.02);
}
