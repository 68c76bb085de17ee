#include <ldf/kernels.hpp>

#include <ldf/errors.hpp>

#include <algorithm>
#include <cmath>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ldf::kernels {

namespace {

struct BlockSums {
    std::vector<double> sum;
    std::vector<double> sumsq;
};

class BlockEstimator {
public:
    BlockEstimator(const PayoffModel& model, std::size_t samples, std::uint64_t seed)
        : model_(model), samples_(samples), seed_(seed), n_(users(model)), decisions_(enumerate_decisions(n_)) {
        if (samples_ < 2) throw DomainError("Monte Carlo estimation needs at least 2 samples");
        for (const auto& d : decisions_) ranks_.push_back(decision_rank(d));
    }

    std::size_t blocks() const { return (samples_ + kBlockSamples - 1) / kBlockSamples; }
    std::size_t cells() const { return decisions_.size() * n_; }

    void run_block(std::size_t b, BlockSums& out) const {
        out.sum.assign(cells(), 0.0);
        out.sumsq.assign(cells(), 0.0);
        RngStream rng(seed_, Stream::monte_carlo, {b});
        const std::size_t begin = b * kBlockSamples;
        const std::size_t end = std::min(samples_, begin + kBlockSamples);
        std::vector<double> v(n_), w(n_);
        const auto* table = std::get_if<TablePayoffModel>(&model_);
        std::optional<WorkloadSampler> sampler;
        if (!table) sampler.emplace(std::get<SingleResourceModel>(model_));
        for (std::size_t s = begin; s < end; ++s) {
            double u = 0.0;
            if (table) u = rng.uniform();
            else sampler->draw(rng, w);
            for (std::size_t k = 0; k < decisions_.size(); ++k) {
                const std::size_t r = ranks_[k];
                if (table) table->sample_into(r, u, v);
                else completion_payoffs(std::get<SingleResourceModel>(model_), decisions_[k], w, v);
                for (std::size_t i = 0; i < n_; ++i) {
                    out.sum[r * n_ + i] += v[i];
                    out.sumsq[r * n_ + i] += v[i] * v[i];
                }
            }
        }
    }

    PayoffEstimate finish(const BlockSums& total) const {
        PayoffEstimate out;
        const auto count = static_cast<double>(samples_);
        for (std::size_t c = 0; c < cells(); ++c) {
            const double mean = total.sum[c] / count;
            const double var = std::max(0.0, (total.sumsq[c] - total.sum[c] * mean) / (count - 1.0));
            out.mean.push_back(mean);
            out.standard_error.push_back(std::sqrt(var / count));
        }
        return out;
    }

private:
    const PayoffModel& model_;
    std::size_t samples_;
    std::uint64_t seed_;
    std::size_t n_;
    std::vector<PriorityDecision> decisions_;
    std::vector<std::size_t> ranks_;
};

void accumulate(BlockSums& total, const BlockSums& part) {
    for (std::size_t c = 0; c < total.sum.size(); ++c) {
        total.sum[c] += part.sum[c];
        total.sumsq[c] += part.sumsq[c];
    }
}

}  // namespace

PayoffEstimate estimate_payoffs_serial(const PayoffModel& model, std::size_t samples, std::uint64_t seed) {
    const BlockEstimator est(model, samples, seed);
    BlockSums total{std::vector<double>(est.cells(), 0.0), std::vector<double>(est.cells(), 0.0)};
    BlockSums part;
    for (std::size_t b = 0; b < est.blocks(); ++b) {
        est.run_block(b, part);
        accumulate(total, part);
    }
    return est.finish(total);
}

PayoffEstimate estimate_payoffs_parallel(const PayoffModel& model, std::size_t samples, std::uint64_t seed) {
    const BlockEstimator est(model, samples, seed);
    BlockSums total{std::vector<double>(est.cells(), 0.0), std::vector<double>(est.cells(), 0.0)};
    // bound the memory held by partial sums between ordered reductions
    const std::size_t budget = std::size_t{1} << 22;
    const std::size_t chunk = std::clamp<std::size_t>(budget / std::max<std::size_t>(1, 2 * est.cells()), 1, 256);
    std::vector<BlockSums> parts(std::min(chunk, est.blocks()));
    for (std::size_t first = 0; first < est.blocks(); first += chunk) {
        const auto last = static_cast<std::ptrdiff_t>(std::min(est.blocks(), first + chunk));
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t b = static_cast<std::ptrdiff_t>(first); b < last; ++b) {
            est.run_block(static_cast<std::size_t>(b), parts[static_cast<std::size_t>(b) - first]);
        }
        for (std::size_t b = first; b < static_cast<std::size_t>(last); ++b) accumulate(total, parts[b - first]);
    }
    return est.finish(total);
}

namespace {

PointClass classify_one(const ExpectedPayoffTable& p, const std::vector<double>& point, const GeometryOptions& opt) {
    const RequirementVector q(point);
    return {member_C(p, q, std::nullopt, opt), member_RIB(p, q, opt), member_R(p, q, opt)};
}

}  // namespace

std::vector<PointClass> classify_points_serial(const ExpectedPayoffTable& p,
                                               const std::vector<std::vector<double>>& points,
                                               const GeometryOptions& opt) {
    std::vector<PointClass> out;
    out.reserve(points.size());
    for (const auto& pt : points) out.push_back(classify_one(p, pt, opt));
    return out;
}

std::vector<PointClass> classify_points_parallel(const ExpectedPayoffTable& p,
                                                 const std::vector<std::vector<double>>& points,
                                                 const GeometryOptions& opt) {
    std::vector<PointClass> out(points.size());
    const auto count = static_cast<std::ptrdiff_t>(points.size());
    // exceptions cannot leave an OpenMP region; keep the first and rethrow
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        try {
            out[static_cast<std::size_t>(k)] = classify_one(p, points[static_cast<std::size_t>(k)], opt);
        } catch (...) {
#pragma omp critical(ldf_classify_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

SimConfig replication_config(const SimConfig& cfg, std::size_t k) {
    SimConfig out = cfg;
    out.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(Stream::replication), k});
    return out;
}

std::vector<SimReport> run_replications_serial(const PayoffModel& model, const Policy& policy,
                                               const RequirementVector& q, const SimConfig& cfg, std::size_t count) {
    std::vector<SimReport> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(simulate(model, policy, q, replication_config(cfg, k)));
    return out;
}

std::vector<SimReport> run_replications_parallel(const PayoffModel& model, const Policy& policy,
                                                 const RequirementVector& q, const SimConfig& cfg, std::size_t count) {
    cfg.validate();
    if (q.size() != users(model) || policy.users() != users(model)) {
        throw DomainError("model, policy and requirement dimensions differ");
    }
    std::vector<SimReport> out(count);
    const auto total = static_cast<std::ptrdiff_t>(count);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < total; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        try {
            out[idx] = simulate(model, policy, q, replication_config(cfg, idx));
        } catch (...) {
#pragma omp critical(ldf_replication_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace ldf::kernels
