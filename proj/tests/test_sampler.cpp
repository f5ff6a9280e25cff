#include "rbvix/payoffs.hpp"
#include "rbvix/sampler.hpp"
#include "rbvix/statistics.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rbvix;

namespace {

ModelParams fig3() {
    ModelParams p;
    p.hurst = 0.1;
    p.eta = 0.5;
    p.maturity = 0.5;
    p.window = 1.0 / 12.0;
    p.x0 = std::log(0.235 * 0.235);
    return p;
}

}  // namespace

TEST(InverseNormal, KnownQuantilesAndRoundTrip) {
    EXPECT_NEAR(inverse_normal_cdf(0.975), 1.959963984540054, 1e-15);
    EXPECT_EQ(inverse_normal_cdf(0.5), 0.0);
    // tail points where both p and 1 - p are exact doubles
    for (double p : {std::ldexp(1.0, -40), 0.01, 0.3, 0.7, 0.999, 1 - std::ldexp(1.0, -40)}) {
        EXPECT_NEAR(inverse_normal_cdf(p), -inverse_normal_cdf(1 - p), 1e-9 * std::abs(inverse_normal_cdf(p)) + 1e-15);
        EXPECT_NEAR(normal_cdf(inverse_normal_cdf(p)), p, 1e-13 * std::min(p, 1 - p) + 1e-16);
    }
}

TEST(NormalStream, UniformsStayInsideOpenInterval) {
    NormalStream s({1, 2, 3, 4});
    for (int k = 0; k < 100000; ++k) {
        const double u = s.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(NormalStream, KeysGiveDistinctReproducibleStreams) {
    NormalStream a({7, 0, 0, 0}), b({7, 0, 0, 0}), c({7, 0, 0, 1}), d({7, 1, 0, 0});
    const double va = a.normal();
    EXPECT_EQ(va, b.normal());
    EXPECT_NE(va, c.normal());
    EXPECT_NE(va, d.normal());
}

TEST(Cholesky, ReconstructsCovariance) {
    const auto p = fig3();
    for (Eigen::Index n : {8, 64, 256}) {
        const auto cov = covariance_matrix(Grid::for_model(p, n), p);
        const auto f = cholesky_factor(cov);
        const Eigen::MatrixXd rebuilt = f.lower * f.lower.transpose();
        EXPECT_LE((rebuilt - cov).cwiseAbs().maxCoeff(), 1e-10 * cov.cwiseAbs().maxCoeff()) << "n=" << n;
        EXPECT_TRUE(f.lower.isLowerTriangular(0.0));
    }
}

TEST(Cholesky, ZeroAndIndefiniteMatrices) {
    EXPECT_TRUE(cholesky_factor(Eigen::MatrixXd::Zero(3, 3)).lower.isZero(0.0));
    Eigen::Matrix2d bad;
    bad << 1, 2, 2, 1;
    EXPECT_THROW(cholesky_factor(bad), FactorizationError);
}

TEST(Sampler, SampleCovarianceMatchesModel) {
    const auto p = fig3();
    const auto sampler = ExactSampler::build(p, 4);
    const Eigen::Index N = 40000;
    Eigen::MatrixXd normals, x(5, N);
    NormalStream s({11});
    sampler.draw(s, normals, x);
    const Eigen::VectorXd mean = x.rowwise().mean();
    const Eigen::MatrixXd centered = x.colwise() - mean;
    const Eigen::MatrixXd emp = centered * centered.transpose() / static_cast<double>(N - 1);
    const auto cov = covariance_matrix(sampler.grid, p);
    for (Eigen::Index i = 0; i < 5; ++i) {
        EXPECT_NEAR(mean(i), sampler.mean(i), 5 * std::sqrt(cov(i, i) / N));
        for (Eigen::Index j = 0; j < 5; ++j)
            EXPECT_NEAR(emp(i, j), cov(i, j), 5 * std::sqrt((cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) / N));
    }
}

TEST(Sampler, RestrictionKeepsEvenIndices) {
    const auto p = fig3();
    const auto sampler = ExactSampler::build(p, 8);
    NormalStream s({3});
    const auto fine = sample_fine(*sampler.factor, sampler.mean, s);
    const auto coarse = restrict_to_coarse(fine);
    ASSERT_EQ(coarse.grid_n, 4);
    for (Eigen::Index k = 0; k <= 4; ++k) EXPECT_EQ(coarse.values(k), fine.values(2 * k));
    // Coarse mean equals the 4-step model mean: the restriction is the exact coarse law.
    const auto coarse_mean = mean_vector(Grid::for_model(p, 4), p);
    for (Eigen::Index k = 0; k <= 4; ++k) EXPECT_EQ(coarse_mean(k), sampler.mean(2 * k));
    EXPECT_THROW(restrict_to_coarse(restrict_to_coarse(restrict_to_coarse(coarse))), UsageError);
    GaussianSample odd{Eigen::VectorXd::Zero(4), 3};
    EXPECT_THROW(restrict_to_coarse(odd), UsageError);
}

TEST(Sampler, DrawMatchesSequentialSampleFine) {
    const auto sampler = ExactSampler::build(fig3(), 6);
    Eigen::MatrixXd normals, x(7, 3);
    NormalStream a({5}), b({5});
    sampler.draw(a, normals, x);
    for (Eigen::Index j = 0; j < 3; ++j) {
        const auto one = sample_fine(*sampler.factor, sampler.mean, b);
        EXPECT_LE((one.values - x.col(j)).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(FactorCache, ReusesFactorsAcrossX0) {
    FactorCache cache;
    auto p = fig3();
    const auto f1 = cache.get(p, 16);
    p.x0 = -1.0;
    const auto f2 = cache.get(p, 16);
    EXPECT_EQ(f1.get(), f2.get());
    p.hurst = 0.2;
    EXPECT_NE(cache.get(p, 16).get(), f1.get());
    EXPECT_EQ(cache.size(), 2u);
}

TEST(SimulateBatches, ResultIndependentOfWorkerCount) {
    const auto sampler = ExactSampler::build(fig3(), 12);
    auto sum_batch = [](const Eigen::MatrixXd& x) {
        Moments m;
        for (Eigen::Index j = 0; j < x.cols(); ++j) m.add(x.col(j).array().exp().mean());
        return m;
    };
    std::vector<double> means;
    for (int workers : {1, 2, 5}) {
        const auto parts = simulate_batches(sampler, 5000, {9}, {workers, 300}, sum_batch);
        ASSERT_EQ(parts.size(), 17u);
        means.push_back(merge_ordered(parts).mean);
    }
    EXPECT_EQ(means[0], means[1]);
    EXPECT_EQ(means[0], means[2]);
}

TEST(SimulateBatches, PropagatesWorkerExceptions) {
    const auto sampler = ExactSampler::build(fig3(), 4);
    auto failing = [](const Eigen::MatrixXd&) -> int { throw NumericError("boom"); };
    EXPECT_THROW(simulate_batches(sampler, 100, {1}, {3, 10}, failing), NumericError);
}

TEST(Moments, MergeMatchesSequential) {
    Moments all, a, b;
    for (int k = 0; k < 100; ++k) {
        const double x = std::sin(k * 0.37);
        all.add(x);
        (k < 37 ? a : b).add(x);
    }
    a.merge(b);
    EXPECT_EQ(a.count, all.count);
    EXPECT_NEAR(a.mean, all.mean, 1e-15);
    EXPECT_NEAR(a.variance(), all.variance(), 1e-14);
}
