#pragma once

#include <ldf/rational.hpp>
#include <ldf/rng.hpp>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ldf {

inline constexpr std::size_t kDefaultDecisionCap = 8;
inline constexpr std::size_t kDefaultGeometryCap = 5;
inline constexpr double kDefaultTolerance = 1e-9;

/// Float or exact-rational evaluation of checks and LPs.
enum class Arithmetic { floating, exact };

// ---------------------------------------------------------------------------
// Users and decisions

/// A set of users stored as a bitmask (n never exceeds the decision cap).
class UserSubset {
public:
    constexpr UserSubset() = default;
    UserSubset(std::initializer_list<std::size_t> members);
    static UserSubset from_mask(std::uint32_t mask) { return UserSubset(mask, 0); }
    static UserSubset full(std::size_t n);

    bool contains(std::size_t user) const { return user < 32 && ((mask_ >> user) & 1U) != 0; }
    void insert(std::size_t user);
    std::size_t size() const;
    bool empty() const { return mask_ == 0; }
    std::uint32_t mask() const { return mask_; }
    bool is_subset_of(UserSubset other) const { return (mask_ & ~other.mask_) == 0; }
    std::vector<std::size_t> members() const;

    /// Throws DomainError if any member is >= n.
    void validate(std::size_t n) const;

    std::string to_string() const;

    friend bool operator==(UserSubset, UserSubset) = default;
    friend auto operator<=>(UserSubset a, UserSubset b) { return a.mask_ <=> b.mask_; }

private:
    constexpr UserSubset(std::uint32_t mask, int) : mask_(mask) {}
    std::uint32_t mask_ = 0;
};

/// Every nonempty subset of {0..n-1} in increasing mask order.
std::vector<UserSubset> nonempty_subsets(std::size_t n);

/// A permutation of users, highest priority first.
class PriorityDecision {
public:
    PriorityDecision() = default;
    /// Throws DomainError unless `order` is a permutation of {0..n-1}.
    explicit PriorityDecision(std::vector<std::size_t> order);
    PriorityDecision(std::initializer_list<std::size_t> order)
        : PriorityDecision(std::vector<std::size_t>(order)) {}

    std::size_t size() const { return order_.size(); }
    std::size_t operator[](std::size_t slot) const { return order_[slot]; }
    const std::vector<std::size_t>& order() const { return order_; }
    auto begin() const { return order_.begin(); }
    auto end() const { return order_.end(); }

    /// Slot of `user` (0 = highest priority).
    std::size_t position_of(std::size_t user) const;
    /// Users ranked strictly above `user`.
    UserSubset higher_priority_set(std::size_t user) const;

    std::string to_string() const;

    friend bool operator==(const PriorityDecision&, const PriorityDecision&) = default;
    friend auto operator<=>(const PriorityDecision& a, const PriorityDecision& b) { return a.order_ <=> b.order_; }

private:
    std::vector<std::size_t> order_;
};

std::size_t factorial(std::size_t n);

/// Lexicographic rank of `d` among the n! permutations.
std::size_t decision_rank(const PriorityDecision& d);
/// Inverse of decision_rank.
PriorityDecision decision_at(std::size_t n, std::size_t rank);

/// All n! decisions in lexicographic order.
std::vector<PriorityDecision> enumerate_decisions(std::size_t n, std::size_t cap = kDefaultDecisionCap);

/// D(S): decisions whose first |S| slots hold exactly the members of S,
/// lexicographically sorted. There are |S|!(n-|S|)! of them.
std::vector<PriorityDecision> decisions_with_prefix(UserSubset s, std::size_t n,
                                                    std::size_t cap = kDefaultDecisionCap);
/// Ranks of decisions_with_prefix(s, n), ascending.
std::vector<std::size_t> prefix_decision_ranks(UserSubset s, std::size_t n);

/// m(d, S): members of S moved to the front, relative orders inside and
/// outside S preserved.
PriorityDecision promote_subset(const PriorityDecision& d, UserSubset s);

/// Swaps the slots of users i and j.
PriorityDecision swap_users(const PriorityDecision& d, std::size_t i, std::size_t j);

// ---------------------------------------------------------------------------
// Payoff models

struct PayoffAtom {
    Rational probability;
    std::vector<Rational> payoff;
};

/// Finite discrete distribution of V(d) for every decision d.
class TablePayoffModel {
public:
    /// `dist[rank]` is the distribution for decision_at(n, rank).
    TablePayoffModel(std::size_t n, std::vector<std::vector<PayoffAtom>> dist);
    TablePayoffModel(std::size_t n, const std::map<PriorityDecision, std::vector<PayoffAtom>>& dist);

    /// Deterministic payoffs: rows[rank] with probability 1.
    static TablePayoffModel point_mass(std::size_t n, const std::vector<std::vector<Rational>>& rows);

    std::size_t users() const { return n_; }
    const std::vector<PayoffAtom>& distribution(std::size_t rank) const { return dist_.at(rank); }
    const std::vector<std::vector<PayoffAtom>>& distributions() const { return dist_; }

    /// True when every atom is a 0/1 vector (payoffs are completion indicators).
    bool unit_payoffs() const { return unit_; }

    /// Index of the atom selected by a uniform draw u in [0, 1).
    std::size_t atom_for(std::size_t rank, double u) const;
    /// Writes the payoff of the atom selected by u into out.
    void sample_into(std::size_t rank, double u, std::span<double> out) const;

private:
    void validate() const;

    std::size_t n_;
    std::vector<std::vector<PayoffAtom>> dist_;
    std::vector<std::vector<double>> cumulative_;
    std::vector<std::vector<std::vector<double>>> payoff_double_;
    bool unit_ = true;
};

struct Deterministic {
    double value;
};
struct Exponential {
    double rate;
};
/// Gamma(shape, scale); mean shape * scale.
struct Gamma {
    double shape;
    double scale;
};
using Workload = std::variant<Deterministic, Exponential, Gamma>;

double workload_mean(const Workload& w);
std::string to_string(const Workload& w);

/// One resource processes one task per user per period, strictly in
/// priority order; the in-flight task is abandoned at the period end and a
/// user earns payoff 1 iff its task finishes by then.
class SingleResourceModel {
public:
    SingleResourceModel(double period_length, std::vector<Workload> workloads);

    std::size_t users() const { return workloads_.size(); }
    double period_length() const { return period_length_; }
    const std::vector<Workload>& workloads() const { return workloads_; }

    /// Exact p(d) is available for deterministic, exponential and
    /// integer-shape gamma (Erlang) workloads.
    bool supports_exact() const;

private:
    double period_length_;
    std::vector<Workload> workloads_;
};

using PayoffModel = std::variant<TablePayoffModel, SingleResourceModel>;

std::size_t users(const PayoffModel& model);
bool unit_payoffs(const PayoffModel& model);

/// Draws the n workloads of one period in user-index order, so two runs
/// sharing a stream see the same workloads whatever their decisions.
class WorkloadSampler {
public:
    explicit WorkloadSampler(const SingleResourceModel& model);
    void draw(RngStream& rng, std::span<double> out);

private:
    struct Source {
        Workload law;
        std::exponential_distribution<double> exponential;
        std::gamma_distribution<double> gamma;
    };
    std::vector<Source> sources_;
};

/// Completion payoffs for given workloads under decision d.
void completion_payoffs(const SingleResourceModel& model, const PriorityDecision& d, std::span<const double> workloads,
                        std::span<double> out);

/// One draw of V(d).
std::vector<double> sample_payoffs(const PayoffModel& model, const PriorityDecision& d, RngStream& rng);

/// Stateful sampler for simulation loops; avoids per-call setup.
class PayoffSampler {
public:
    PayoffSampler(const PayoffModel& model, RngStream rng);
    void sample(const PriorityDecision& d, std::span<double> out);

private:
    const PayoffModel* model_;
    RngStream rng_;
    std::optional<WorkloadSampler> workloads_;
    std::vector<double> scratch_;
};

// ---------------------------------------------------------------------------
// Expected payoffs

struct ExactEstimation {};
struct MonteCarloEstimation {
    std::size_t samples;
    std::uint64_t seed;
};
using Estimation = std::variant<ExactEstimation, MonteCarloEstimation>;

struct Provenance {
    enum class Kind { exact, monte_carlo } kind = Kind::exact;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

/// p(d) for every decision, indexed by decision rank.
class ExpectedPayoffTable {
public:
    ExpectedPayoffTable(std::size_t n, std::vector<double> values, Provenance provenance = {});
    /// Exact table; double values are the nearest doubles.
    ExpectedPayoffTable(std::size_t n, std::vector<Rational> exact);

    static ExpectedPayoffTable from_rows(std::size_t n, const std::vector<std::vector<double>>& rows);
    static ExpectedPayoffTable from_exact_rows(std::size_t n, const std::vector<std::vector<Rational>>& rows);

    std::size_t users() const { return n_; }
    std::size_t decisions() const { return values_.size() / n_; }

    double operator()(std::size_t rank, std::size_t user) const { return values_[rank * n_ + user]; }
    double payoff(const PriorityDecision& d, std::size_t user) const { return (*this)(decision_rank(d), user); }
    std::span<const double> row(std::size_t rank) const { return {values_.data() + rank * n_, n_}; }
    std::span<const double> values() const { return values_; }

    bool has_exact() const { return exact_.has_value(); }
    const Rational& exact(std::size_t rank, std::size_t user) const { return (*exact_)[rank * n_ + user]; }
    /// Throws ModeError if the table carries no exact values.
    std::span<const Rational> exact_values() const;

    const Provenance& provenance() const { return provenance_; }

    /// Per-entry standard error of a Monte Carlo estimate (empty when exact).
    std::span<const double> standard_errors() const { return std_errors_; }
    void set_standard_errors(std::vector<double> errors);

    double max_entry() const;

private:
    void validate() const;

    std::size_t n_;
    std::vector<double> values_;
    std::optional<std::vector<Rational>> exact_;
    std::vector<double> std_errors_;
    Provenance provenance_;
};

ExpectedPayoffTable expected_payoffs(const PayoffModel& model, const Estimation& estimation);

/// P(sum of the listed workloads <= horizon); deterministic, exponential and
/// Erlang laws only.
double completion_probability(std::span<const Workload> laws, double horizon);

// ---------------------------------------------------------------------------
// Structural properties

struct MonotonicityWitness {
    PriorityDecision d1;
    PriorityDecision d2;
    std::size_t user;
};
struct SubsetWitness {
    UserSubset subset;
};
struct ExchangeWitness {
    PriorityDecision d;
    std::size_t i;
    std::size_t j;
};
using PropertyWitness = std::variant<MonotonicityWitness, SubsetWitness, ExchangeWitness>;

/// Normal vector alpha^S certifying that P^S lies on a hyperplane.
struct SubsetCertificate {
    UserSubset subset;
    std::vector<double> alpha;
    /// Largest |<alpha, p(d) - p(d0)>| over D(S); zero on the exact path.
    double spread;
};

struct PropertyVerdict {
    bool holds = true;
    std::optional<PropertyWitness> witness;
    std::vector<SubsetCertificate> certificates;
    Arithmetic arithmetic = Arithmetic::floating;
};

std::string describe(const PropertyWitness& witness);

/// S_i(d1) subset of S_i(d2) implies p_i(d1) >= p_i(d2) - tol.
PropertyVerdict check_monotonicity(const ExpectedPayoffTable& p, Arithmetic arithmetic = Arithmetic::floating,
                                   double tol = kDefaultTolerance);

/// Per nonempty S, is there alpha >= 0, sum 1, with <alpha, p^S(d)> constant on D(S)?
PropertyVerdict check_subset_payoff_equivalence(const ExpectedPayoffTable& p,
                                                Arithmetic arithmetic = Arithmetic::floating,
                                                double tol = kDefaultTolerance,
                                                std::size_t cap = kDefaultGeometryCap);

/// Swapping any i, j in S swaps p_i and p_j and leaves the rest unchanged.
PropertyVerdict check_exchangeable(const ExpectedPayoffTable& p, UserSubset s,
                                   Arithmetic arithmetic = Arithmetic::floating, double tol = kDefaultTolerance);

}  // namespace ldf
