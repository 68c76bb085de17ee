#pragma once

#include <ldf/errors.hpp>
#include <ldf/model.hpp>
#include <ldf/rng.hpp>

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ldf {

/// Truncated deficits are clamped at zero every period; signed deficits
/// are allowed to go negative and so remember past surpluses.
enum class DeficitMode { truncated, signed_ };

std::string_view to_string(DeficitMode mode);
DeficitMode parse_deficit_mode(std::string_view text);

template <class Scalar>
struct BasicDeficitState {
    DeficitMode mode = DeficitMode::truncated;
    std::vector<Scalar> x;
    std::size_t t = 0;

    static BasicDeficitState zero(std::size_t n, DeficitMode mode) { return {mode, std::vector<Scalar>(n, Scalar(0)), 0}; }
};

using DeficitState = BasicDeficitState<double>;
using ExactDeficitState = BasicDeficitState<Rational>;

/// In-place version of deficit_step, used by simulation loops.
template <class Scalar>
void deficit_advance(BasicDeficitState<Scalar>& state, std::span<const Scalar> q, std::span<const Scalar> v) {
    if (q.size() != state.x.size() || v.size() != state.x.size()) {
        throw DomainError("deficit, requirement and payoff lengths differ");
    }
    for (std::size_t i = 0; i < state.x.size(); ++i) {
        Scalar next = state.x[i] + q[i] - v[i];
        if (state.mode == DeficitMode::truncated && next < Scalar(0)) next = Scalar(0);
        state.x[i] = next;
    }
    ++state.t;
}

template <class Scalar>
BasicDeficitState<Scalar> deficit_step(BasicDeficitState<Scalar> state, std::span<const Scalar> q,
                                       std::span<const Scalar> v) {
    for (const auto& vi : v) {
        if (vi < Scalar(0)) throw DomainError("payoffs must be nonnegative");
    }
    deficit_advance(state, q, v);
    return state;
}

class RequirementVector {
public:
    explicit RequirementVector(std::vector<double> q);
    std::size_t size() const { return q_.size(); }
    double operator[](std::size_t i) const { return q_[i]; }
    std::span<const double> values() const { return q_; }
    /// Each entry as the shortest-decimal rational (0.1 -> 1/10).
    std::vector<Rational> exact() const;

private:
    std::vector<double> q_;
};

class WeightVector {
public:
    explicit WeightVector(std::vector<double> w);
    static WeightVector ones(std::size_t n) { return WeightVector(std::vector<double>(n, 1.0)); }
    std::size_t size() const { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }
    std::span<const double> values() const { return w_; }

private:
    std::vector<double> w_;
};

/// Ordered, disjoint classes covering {0..n-1}.
class ClassPartition {
public:
    ClassPartition(std::vector<std::vector<std::size_t>> classes, std::size_t n);
    /// One class per user.
    static ClassPartition singletons(std::size_t n);
    /// Parses "[0,1|2]" (brackets optional).
    static ClassPartition parse(std::string_view text, std::size_t n);

    const std::vector<std::vector<std::size_t>>& classes() const { return classes_; }
    std::size_t users() const { return n_; }
    std::string to_string() const;

private:
    std::vector<std::vector<std::size_t>> classes_;
    std::size_t n_;
};

/// How near-equal keys (within the comparison tolerance) are ordered.
class TieBreak {
public:
    static TieBreak lowest_index() { return TieBreak(); }
    static TieBreak random(std::uint64_t seed) { return TieBreak(RngStream(seed, Stream::tie_break)); }
    static TieBreak random(RngStream stream) { return TieBreak(std::move(stream)); }

    bool is_random() const { return rng_.has_value(); }
    /// Picks one of `count` tied candidates (given in canonical order).
    std::size_t pick(std::size_t count);

private:
    TieBreak() = default;
    explicit TieBreak(RngStream rng) : rng_(std::move(rng)) {}
    std::optional<RngStream> rng_;
};

/// Users sorted by descending w_i x_i.
PriorityDecision select_wldf(const DeficitState& state, const WeightVector& w, TieBreak& tb,
                             double tol = kDefaultTolerance);
PriorityDecision select_wldf(const ExactDeficitState& state, std::span<const Rational> w);

/// Rank of the decision maximizing <x, p(d)>; candidates in rank order.
std::size_t select_mw_rank(std::span<const double> x, const ExpectedPayoffTable& p, TieBreak& tb,
                           double tol = kDefaultTolerance);
PriorityDecision select_mw(const DeficitState& state, const ExpectedPayoffTable& p, TieBreak& tb,
                           double tol = kDefaultTolerance);

/// Classes by descending aggregate weighted deficit, then users inside each
/// class by descending weighted deficit.
PriorityDecision select_hldf(const DeficitState& state, const ClassPartition& classes, const WeightVector& w,
                             TieBreak& tb, double tol = kDefaultTolerance);

struct MwSpec {};
struct WldfSpec {
    WeightVector w;
};
struct HldfSpec {
    ClassPartition classes;
    WeightVector w;
};
struct StaticSpec {
    PriorityDecision d;
};
using PolicySpec = std::variant<MwSpec, WldfSpec, HldfSpec, StaticSpec>;

/// "mw" | "ldf" | "wldf:w1,w2,..." | "hldf:[0,1|2]:w1,..." | "static:d0,d1,...".
/// Throws ConfigError on malformed text or a length mismatch with n.
PolicySpec parse_policy(std::string_view text, std::size_t n);
std::string to_string(const PolicySpec& spec);

/// A policy bound to its inputs; MW carries the expected payoff table it
/// maximizes against.
class Policy {
public:
    Policy(PolicySpec spec, std::size_t n, std::optional<ExpectedPayoffTable> table = std::nullopt);

    const PolicySpec& spec() const { return spec_; }
    std::size_t users() const { return n_; }
    bool needs_table() const { return std::holds_alternative<MwSpec>(spec_); }

    PriorityDecision select(const DeficitState& state, TieBreak& tb) const;
    std::size_t select_rank(const DeficitState& state, TieBreak& tb) const;

private:
    PolicySpec spec_;
    std::size_t n_;
    std::optional<ExpectedPayoffTable> table_;
    std::size_t static_rank_ = 0;
};

}  // namespace ldf
