#include <ldf/sim.hpp>

#include <ldf/errors.hpp>

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>

namespace ldf {

void SimConfig::validate() const {
    if (periods <= warmup) {
        throw DomainError("simulation needs periods > warmup (got T = " + std::to_string(periods) +
                          ", warmup = " + std::to_string(warmup) + ")");
    }
}

SimReport simulate(const PayoffModel& model, const Policy& policy, const RequirementVector& q, const SimConfig& cfg) {
    cfg.validate();
    const std::size_t n = users(model);
    if (q.size() != n) throw DomainError("requirement vector length does not match the model");
    if (policy.users() != n) throw DomainError("policy user count does not match the model");

    SimReport report;
    report.users = n;
    report.periods = cfg.periods;
    report.warmup = cfg.warmup;
    report.unit_payoffs = unit_payoffs(model);
    report.payoff_totals.assign(n, 0.0);
    report.max_deficit.assign(n, 0.0);
    report.decision_histogram.assign(factorial(n), 0);
    if (report.unit_payoffs) report.failures.resize(n);
    if (cfg.record_trajectory) report.trajectory.reserve(cfg.periods);

    PayoffSampler sampler(model, RngStream(cfg.seed, Stream::workloads));
    TieBreak tb = cfg.random_ties ? TieBreak::random(RngStream(cfg.seed, Stream::tie_break)) : TieBreak::lowest_index();
    auto state = DeficitState::zero(n, cfg.mode);
    std::vector<double> v(n);

    for (std::size_t t = 1; t <= cfg.periods; ++t) {
        const auto d = policy.select(state, tb);
        sampler.sample(d, v);
        deficit_advance<double>(state, q.values(), v);
        for (std::size_t i = 0; i < n; ++i) report.max_deficit[i] = std::max(report.max_deficit[i], state.x[i]);
        if (cfg.record_trajectory) report.trajectory.push_back(state.x);
        if (t <= cfg.warmup) continue;
        ++report.decision_histogram[decision_rank(d)];
        for (std::size_t i = 0; i < n; ++i) {
            report.payoff_totals[i] += v[i];
            if (report.unit_payoffs && v[i] == 0.0) report.failures[i].push_back(t);
        }
    }

    report.final_deficit = state.x;
    const auto measured = static_cast<double>(report.measured_periods());
    for (double total : report.payoff_totals) report.p_hat.push_back(total / measured);
    return report;
}

ExcessBalance excess_balance(const SimReport& report, const RequirementVector& q, const WeightVector& w) {
    if (q.size() != report.users || w.size() != report.users) {
        throw DomainError("requirement and weight lengths must match the report");
    }
    ExcessBalance out;
    for (std::size_t i = 0; i < report.users; ++i) out.values.push_back(w[i] * (report.p_hat[i] - q[i]));
    const auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
    out.spread = *hi - *lo;
    return out;
}

std::vector<std::size_t> inter_failure_intervals(const std::vector<std::size_t>& failures) {
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k < failures.size(); ++k) out.push_back(failures[k] - failures[k - 1]);
    return out;
}

UserIfi ifi_summary(const std::vector<std::size_t>& failures, double p_hat) {
    const auto gaps = inter_failure_intervals(failures);
    if (gaps.size() < 2) throw DomainError("IFI statistics need at least three failures");
    double mean = 0.0;
    for (auto g : gaps) mean += static_cast<double>(g);
    mean /= static_cast<double>(gaps.size());
    double ss = 0.0;
    for (auto g : gaps) ss += (static_cast<double>(g) - mean) * (static_cast<double>(g) - mean);
    UserIfi out;
    out.failures = failures.size();
    out.sample_sd = std::sqrt(ss / static_cast<double>(gaps.size() - 1));
    out.benchmark_sd = std::sqrt(p_hat) / (1.0 - p_hat);
    out.sd_ratio = out.sample_sd == 0.0 ? 0.0 : out.sample_sd / out.benchmark_sd;
    return out;
}

IfiStats ifi_stats(const SimReport& report) {
    if (!report.unit_payoffs) throw DomainError("IFI statistics need a model with 0/1 payoffs");
    IfiStats out;
    for (std::size_t i = 0; i < report.users; ++i) {
        if (inter_failure_intervals(report.failures[i]).size() < 2) {
            out.users.emplace_back();
            continue;
        }
        out.users.emplace_back(ifi_summary(report.failures[i], report.p_hat[i]));
    }
    return out;
}

std::string_view to_string(ProbeVerdict verdict) {
    switch (verdict) {
        case ProbeVerdict::fulfilled: return "fulfilled";
        case ProbeVerdict::violated: return "violated";
        default: return "inconclusive";
    }
}

ProbeResult feasibility_probe(const PayoffModel& model, const Policy& policy, const RequirementVector& q,
                              const SimConfig& cfg, std::size_t window, const ProbeOptions& options) {
    if (cfg.mode != DeficitMode::truncated) throw DomainError("the feasibility probe needs truncated deficits");
    if (window == 0) throw DomainError("probe window must be at least one period");
    SimConfig run = cfg;
    run.record_trajectory = true;
    const auto report = simulate(model, policy, q, run);
    const std::size_t n = report.users;

    ProbeResult out;
    out.p_hat = report.p_hat;
    out.slopes.assign(n, 0.0);
    out.significant.assign(n, false);
    const std::size_t blocks = report.trajectory.size() / window;
    if (blocks < 3) return out;

    const double m = static_cast<double>(blocks);
    const double xbar = (m - 1.0) / 2.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < blocks; ++k) sxx += (static_cast<double>(k) - xbar) * (static_cast<double>(k) - xbar);
    const boost::math::students_t dist(m - 2.0);
    const double critical = boost::math::quantile(dist, options.confidence);

    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> y(blocks, 0.0);
        for (std::size_t k = 0; k < blocks; ++k) {
            for (std::size_t t = k * window; t < (k + 1) * window; ++t) y[k] = std::max(y[k], report.trajectory[t][i]);
        }
        double ybar = 0.0;
        for (double v : y) ybar += v;
        ybar /= m;
        double sxy = 0.0;
        for (std::size_t k = 0; k < blocks; ++k) sxy += (static_cast<double>(k) - xbar) * (y[k] - ybar);
        const double slope = sxy / sxx;
        const double intercept = ybar - slope * xbar;
        double sse = 0.0;
        for (std::size_t k = 0; k < blocks; ++k) {
            const double r = y[k] - intercept - slope * static_cast<double>(k);
            sse += r * r;
        }
        const double se = std::sqrt(sse / (m - 2.0) / sxx);
        const bool trend = se > 0.0 ? slope / se > critical : slope > 0.0;
        out.slopes[i] = slope / static_cast<double>(window);
        out.significant[i] = trend && out.slopes[i] > options.drift_threshold;
    }

    bool any_trend = false, short_and_growing = false, all_met = true;
    for (std::size_t i = 0; i < n; ++i) {
        const bool short_i = out.p_hat[i] < q[i] - options.payoff_tol;
        any_trend = any_trend || out.significant[i];
        short_and_growing = short_and_growing || (out.significant[i] && short_i);
        all_met = all_met && !short_i;
    }
    if (!any_trend && all_met) out.verdict = ProbeVerdict::fulfilled;
    else if (short_and_growing) out.verdict = ProbeVerdict::violated;
    return out;
}

}  // namespace ldf
