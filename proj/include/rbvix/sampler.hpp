#pragma once

#include "rbvix/model.hpp"
#include "rbvix/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

namespace rbvix {

/// Lower-triangular L with L L^T = C (up to the recorded diagonal jitter).
struct CholeskyFactor {
    Eigen::MatrixXd lower;
    std::string source_key;
    /// Amount added to the diagonal before factorizing; 0 when the first attempt succeeded.
    double jitter = 0.0;

    Eigen::Index size() const { return lower.rows(); }
};

/// LLT of a symmetric PSD matrix.
///
/// If the first attempt fails (rounding on a Gram matrix), 1e-12 * trace/(n+1) is
/// added to the diagonal and the factorization retried once. An identically zero
/// matrix yields the zero factor. Throws FactorizationError otherwise.
CholeskyFactor cholesky_factor(const Eigen::MatrixXd& cov, std::string source_key = {});

struct GaussianSample {
    Eigen::VectorXd values;  ///< X_T^{u_i}, i = 0..n
    Eigen::Index grid_n = 0;
};

/// mean + L G with G drawn from `stream`.
GaussianSample sample_fine(const CholeskyFactor& factor, const Eigen::VectorXd& mean, NormalStream& stream);

/// Keeps indices 0, 2, ..., n: the exact Gaussian vector of the grid with n/2 steps.
GaussianSample restrict_to_coarse(const GaussianSample& fine);

/// Read-mostly cache of covariance factors keyed by (H, eta, T, Delta, n).
class FactorCache {
public:
    static FactorCache& global();

    std::shared_ptr<const CholeskyFactor> get(const ModelParams& params, Eigen::Index steps);
    std::size_t size() const;
    void clear();

private:
    struct Key {
        double hurst, eta, maturity, window;
        Eigen::Index steps;
        auto operator<=>(const Key&) const = default;
    };
    mutable std::shared_mutex mutex_;
    std::map<Key, std::shared_ptr<const CholeskyFactor>> entries_;
};

/// Mean vector and Cholesky factor for one grid size; immutable and shareable across workers.
struct ExactSampler {
    Grid grid;
    Eigen::VectorXd mean;
    std::shared_ptr<const CholeskyFactor> factor;

    static ExactSampler build(const ModelParams& params, Eigen::Index steps,
                              FactorCache& cache = FactorCache::global());

    Eigen::Index steps() const { return grid.steps(); }

    /// Overwrites `out` ((n+1) x k) with k independent samples; `normals` is scratch space.
    void draw(NormalStream& stream, Eigen::MatrixXd& normals, Eigen::MatrixXd& out) const;
};

struct SimulationOptions {
    int workers = 1;
    /// Samples per stream. Part of the reproducibility contract: changing it changes the draws.
    Eigen::Index batch_size = 1024;
};

/// Splits `count` samples into fixed-size batches, batch b drawn from `key.with_batch(b)`,
/// and returns fn(samples) per batch in batch order. The result does not depend on the
/// number of workers.
template <typename Fn>
auto simulate_batches(const ExactSampler& sampler, Eigen::Index count, const StreamKey& key,
                      const SimulationOptions& options, Fn&& fn)
    -> std::vector<decltype(fn(std::declval<const Eigen::MatrixXd&>()))> {
    using Result = decltype(fn(std::declval<const Eigen::MatrixXd&>()));
    const Eigen::Index batch = std::max<Eigen::Index>(1, options.batch_size);
    const Eigen::Index batches = (count + batch - 1) / batch;
    std::vector<Result> results(static_cast<std::size_t>(batches));

    auto run_one = [&](Eigen::Index b, Eigen::MatrixXd& normals, Eigen::MatrixXd& samples) {
        const Eigen::Index cols = std::min(batch, count - b * batch);
        NormalStream stream(key.with_batch(static_cast<std::uint64_t>(b)));
        samples.resize(sampler.grid.size(), cols);
        sampler.draw(stream, normals, samples);
        results[static_cast<std::size_t>(b)] = fn(samples);
    };

    const int workers = static_cast<int>(std::clamp<Eigen::Index>(options.workers, 1, std::max<Eigen::Index>(batches, 1)));
    if (workers <= 1) {
        Eigen::MatrixXd normals, samples;
        for (Eigen::Index b = 0; b < batches; ++b) run_one(b, normals, samples);
        return results;
    }

    std::atomic<Eigen::Index> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            Eigen::MatrixXd normals, samples;
            for (Eigen::Index b = next++; b < batches; b = next++) {
                try {
                    run_one(b, normals, samples);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace rbvix
