#pragma once

// Hot loops in two builds: a plain serial reference and an OpenMP version.
// Work is cut into fixed blocks with their own random substreams and partial
// results are combined in block order, so both produce bitwise-identical
// output for any thread count.

#include <ldf/geometry.hpp>
#include <ldf/model.hpp>
#include <ldf/policy.hpp>
#include <ldf/sim.hpp>

#include <cstdint>
#include <vector>

namespace ldf::kernels {

inline constexpr std::size_t kBlockSamples = 4096;

struct PayoffEstimate {
    /// Flat rank * n + user.
    std::vector<double> mean;
    std::vector<double> standard_error;
};

/// Monte Carlo p(d) for every decision. Each sample draws one set of
/// workloads (or one uniform) and evaluates every decision on it, so
/// decisions sharing a prefix get identical estimates for its users.
PayoffEstimate estimate_payoffs_serial(const PayoffModel& model, std::size_t samples, std::uint64_t seed);
PayoffEstimate estimate_payoffs_parallel(const PayoffModel& model, std::size_t samples, std::uint64_t seed);

struct PointClass {
    RegionVerdict c;
    RegionVerdict rib;
    RegionVerdict r;
};

std::vector<PointClass> classify_points_serial(const ExpectedPayoffTable& p,
                                               const std::vector<std::vector<double>>& points,
                                               const GeometryOptions& opt = {});
std::vector<PointClass> classify_points_parallel(const ExpectedPayoffTable& p,
                                                 const std::vector<std::vector<double>>& points,
                                                 const GeometryOptions& opt = {});

/// Replication k runs with seed derive_seed(cfg.seed, {replication, k}).
SimConfig replication_config(const SimConfig& cfg, std::size_t k);
std::vector<SimReport> run_replications_serial(const PayoffModel& model, const Policy& policy,
                                               const RequirementVector& q, const SimConfig& cfg, std::size_t count);
std::vector<SimReport> run_replications_parallel(const PayoffModel& model, const Policy& policy,
                                                 const RequirementVector& q, const SimConfig& cfg, std::size_t count);

/// Threads the OpenMP runtime would use (1 without OpenMP).
int max_threads();

}  // namespace ldf::kernels
