#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>

namespace rbvix {

/// Identifies one independent random stream.
///
/// Every stream is seeded from (root seed, experiment, level, batch) through
/// std::seed_seq, so a batch of samples is reproducible on its own regardless
/// of how batches are scheduled across workers. Estimators put the MLMC level
/// in `level` and the batch number in `batch`; experiments put replication
/// and tolerance indices into `experiment`.
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint64_t experiment = 0;
    std::uint64_t level = 0;
    std::uint64_t batch = 0;

    StreamKey with_level(std::uint64_t l) const { return {seed, experiment, l, batch}; }
    StreamKey with_batch(std::uint64_t b) const { return {seed, experiment, level, b}; }
    StreamKey with_experiment(std::uint64_t e) const { return {seed, e, level, batch}; }
};

/// Inverse of the standard normal CDF (Wichura's AS 241, about 1e-16 relative accuracy).
double inverse_normal_cdf(double p);

/// Standard normal draws by inversion of 53-bit uniforms from mt19937_64.
class NormalStream {
public:
    explicit NormalStream(const StreamKey& key);

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }
    double normal() { return inverse_normal_cdf(uniform()); }

    /// Column-major fill: column j holds the j-th draw of a Gaussian vector.
    template <typename Derived>
    void fill(Eigen::DenseBase<Derived>& out) {
        for (Eigen::Index j = 0; j < out.cols(); ++j)
            for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) = normal();
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace rbvix
