#pragma once

#include <ldf/model.hpp>
#include <ldf/policy.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace ldf {

inline constexpr std::uint64_t kDefaultSeed = 20140601;

struct SimConfig {
    std::size_t periods = 30000;
    /// Periods excluded from the averages (deficits still evolve).
    std::size_t warmup = 0;
    std::uint64_t seed = kDefaultSeed;
    DeficitMode mode = DeficitMode::truncated;
    bool random_ties = false;
    bool record_trajectory = false;

    /// Throws DomainError unless periods > warmup.
    void validate() const;
};

struct SimReport {
    std::size_t users = 0;
    std::size_t periods = 0;
    std::size_t warmup = 0;
    /// Mean payoff per user over periods warmup+1..T.
    std::vector<double> p_hat;
    std::vector<double> payoff_totals;
    std::vector<double> max_deficit;
    std::vector<double> final_deficit;
    /// Per user, the periods t (1-based, t > warmup) with payoff 0; filled only
    /// for 0/1-payoff models.
    bool unit_payoffs = false;
    std::vector<std::vector<std::size_t>> failures;
    /// Post-warmup count of each decision, indexed by rank.
    std::vector<std::size_t> decision_histogram;
    /// Deficits after each period when recording (periods rows).
    std::vector<std::vector<double>> trajectory;

    std::size_t measured_periods() const { return periods - warmup; }
};

/// Runs t = 1..T: decide from the current deficits, sample payoffs, update.
/// Workloads and tie-breaks use separate substreams of cfg.seed, so two
/// policies on the same seed see the same workloads.
SimReport simulate(const PayoffModel& model, const Policy& policy, const RequirementVector& q, const SimConfig& cfg);

struct ExcessBalance {
    std::vector<double> values;
    double spread = 0.0;
};

/// w_i (p_hat_i - q_i) and its max - min spread.
ExcessBalance excess_balance(const SimReport& report, const RequirementVector& q, const WeightVector& w);

struct UserIfi {
    std::size_t failures = 0;
    double sample_sd = 0.0;
    /// SD of a geometric law on {1,2,...} with failure probability 1 - p_hat.
    double benchmark_sd = 0.0;
    double sd_ratio = 0.0;
};

struct IfiStats {
    /// Absent for users with fewer than two inter-failure intervals.
    std::vector<std::optional<UserIfi>> users;
};

/// Inter-failure intervals (gaps between consecutive failure periods).
std::vector<std::size_t> inter_failure_intervals(const std::vector<std::size_t>& failures);
UserIfi ifi_summary(const std::vector<std::size_t>& failures, double p_hat);

/// Throws DomainError if the report carries no failure sequences.
IfiStats ifi_stats(const SimReport& report);

enum class ProbeVerdict { fulfilled, violated, inconclusive };
std::string_view to_string(ProbeVerdict verdict);

struct ProbeOptions {
    /// Tolerance on p_hat >= q.
    double payoff_tol = 0.01;
    /// Growth below this many units per period is not counted as a trend.
    double drift_threshold = 1e-3;
    double confidence = 0.95;
};

struct ProbeResult {
    ProbeVerdict verdict = ProbeVerdict::inconclusive;
    /// Least-squares slope of windowed maxima, in deficit units per period.
    std::vector<double> slopes;
    std::vector<bool> significant;
    std::vector<double> p_hat;
};

/// Empirical surrogate for positive recurrence: fits a trend to the
/// per-window maxima of each truncated deficit.
ProbeResult feasibility_probe(const PayoffModel& model, const Policy& policy, const RequirementVector& q,
                              const SimConfig& cfg, std::size_t window, const ProbeOptions& options = {});

}  // namespace ldf
