#include "rbvix/sampler.hpp"

#include <sstream>

namespace rbvix {

CholeskyFactor cholesky_factor(const Eigen::MatrixXd& cov, std::string source_key) {
    if (cov.rows() != cov.cols() || cov.rows() == 0) throw UsageError("cholesky_factor: matrix must be square and non-empty");
    CholeskyFactor out;
    out.source_key = std::move(source_key);
    if (cov.isZero(0.0)) {
        out.lower = Eigen::MatrixXd::Zero(cov.rows(), cov.cols());
        return out;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        const double trace = cov.trace();
        if (!(trace > 0.0)) throw FactorizationError("cholesky_factor: matrix has non-positive trace");
        out.jitter = 1e-12 * trace / static_cast<double>(cov.rows());
        Eigen::MatrixXd shifted = cov;
        shifted.diagonal().array() += out.jitter;
        llt.compute(shifted);
        if (llt.info() != Eigen::Success) {
            std::ostringstream msg;
            msg << "cholesky_factor: matrix " << out.source_key << " is not positive definite after jitter "
                << out.jitter;
            throw FactorizationError(msg.str());
        }
    }
    out.lower = llt.matrixL();
    return out;
}

GaussianSample sample_fine(const CholeskyFactor& factor, const Eigen::VectorXd& mean, NormalStream& stream) {
    if (factor.size() != mean.size()) throw UsageError("sample_fine: factor and mean sizes differ");
    Eigen::VectorXd g(mean.size());
    stream.fill(g);
    GaussianSample out;
    out.values = mean + factor.lower.triangularView<Eigen::Lower>() * g;
    out.grid_n = mean.size() - 1;
    return out;
}

GaussianSample restrict_to_coarse(const GaussianSample& fine) {
    if (fine.grid_n < 2 || fine.grid_n % 2 != 0)
        throw UsageError("restrict_to_coarse: fine grid must have an even number of steps, got " +
                         std::to_string(fine.grid_n));
    if (fine.values.size() != fine.grid_n + 1) throw UsageError("restrict_to_coarse: sample length is not n + 1");
    GaussianSample coarse;
    coarse.grid_n = fine.grid_n / 2;
    coarse.values = Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<2>>(fine.values.data(), coarse.grid_n + 1);
    return coarse;
}

FactorCache& FactorCache::global() {
    static FactorCache cache;
    return cache;
}

std::shared_ptr<const CholeskyFactor> FactorCache::get(const ModelParams& params, Eigen::Index steps) {
    const Key key{params.hurst, params.eta, params.maturity, params.window, steps};
    {
        std::shared_lock lock(mutex_);
        if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
    std::ostringstream name;
    name.precision(17);
    name << "H=" << params.hurst << ",eta=" << params.eta << ",T=" << params.maturity << ",Delta=" << params.window
         << ",n=" << steps;
    const Grid grid = Grid::for_model(params, steps);
    auto factor = std::make_shared<const CholeskyFactor>(cholesky_factor(covariance_matrix(grid, params), name.str()));
    std::unique_lock lock(mutex_);
    return entries_.try_emplace(key, std::move(factor)).first->second;
}

std::size_t FactorCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

void FactorCache::clear() {
    std::unique_lock lock(mutex_);
    entries_.clear();
}

ExactSampler ExactSampler::build(const ModelParams& params, Eigen::Index steps, FactorCache& cache) {
    params.validate();
    const Grid grid = Grid::for_model(params, steps);
    return {grid, mean_vector(grid, params), cache.get(params, steps)};
}

void ExactSampler::draw(NormalStream& stream, Eigen::MatrixXd& normals, Eigen::MatrixXd& out) const {
    normals.resize(out.rows(), out.cols());
    stream.fill(normals);
    out.noalias() = factor->lower.triangularView<Eigen::Lower>() * normals;
    out.colwise() += mean;
}

}  // namespace rbvix
