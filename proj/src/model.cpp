#include <ldf/model.hpp>

#include <ldf/errors.hpp>
#include <ldf/kernels.hpp>
#include <ldf/lp.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ldf {

// ---------------------------------------------------------------------------
// UserSubset

UserSubset::UserSubset(std::initializer_list<std::size_t> members) {
    for (auto m : members) insert(m);
}

UserSubset UserSubset::full(std::size_t n) {
    if (n >= 32) throw CapacityError("subset bitmask cannot hold " + std::to_string(n) + " users", 31);
    return from_mask(n == 0 ? 0U : ((1U << n) - 1U));
}

void UserSubset::insert(std::size_t user) {
    if (user >= 32) throw DomainError("user index " + std::to_string(user) + " does not fit a subset");
    mask_ |= 1U << user;
}

std::size_t UserSubset::size() const { return static_cast<std::size_t>(std::popcount(mask_)); }

std::vector<std::size_t> UserSubset::members() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < 32; ++i) {
        if (contains(i)) out.push_back(i);
    }
    return out;
}

void UserSubset::validate(std::size_t n) const {
    if (n < 32 && (mask_ >> n) != 0) {
        throw DomainError("subset " + to_string() + " has a member >= n = " + std::to_string(n));
    }
}

std::string UserSubset::to_string() const {
    std::string out = "{";
    bool first = true;
    for (auto m : members()) {
        if (!first) out += ",";
        out += std::to_string(m);
        first = false;
    }
    return out + "}";
}

std::vector<UserSubset> nonempty_subsets(std::size_t n) {
    const auto full = UserSubset::full(n).mask();
    std::vector<UserSubset> out;
    out.reserve(full);
    for (std::uint32_t mask = 1; mask <= full; ++mask) out.push_back(UserSubset::from_mask(mask));
    return out;
}

// ---------------------------------------------------------------------------
// PriorityDecision

PriorityDecision::PriorityDecision(std::vector<std::size_t> order) : order_(std::move(order)) {
    std::vector<bool> seen(order_.size(), false);
    for (auto u : order_) {
        if (u >= order_.size() || seen[u]) {
            throw DomainError("decision " + to_string() + " is not a permutation of 0.." +
                              std::to_string(order_.size() == 0 ? 0 : order_.size() - 1));
        }
        seen[u] = true;
    }
}

std::size_t PriorityDecision::position_of(std::size_t user) const {
    auto it = std::find(order_.begin(), order_.end(), user);
    if (it == order_.end()) throw DomainError("user " + std::to_string(user) + " not in decision");
    return static_cast<std::size_t>(it - order_.begin());
}

UserSubset PriorityDecision::higher_priority_set(std::size_t user) const {
    UserSubset s;
    for (auto u : order_) {
        if (u == user) return s;
        s.insert(u);
    }
    throw DomainError("user " + std::to_string(user) + " not in decision");
}

std::string PriorityDecision::to_string() const {
    std::string out = "(";
    for (std::size_t k = 0; k < order_.size(); ++k) {
        if (k) out += ",";
        out += std::to_string(order_[k]);
    }
    return out + ")";
}

std::size_t factorial(std::size_t n) {
    std::size_t f = 1;
    for (std::size_t k = 2; k <= n; ++k) f *= k;
    return f;
}

std::size_t decision_rank(const PriorityDecision& d) {
    const std::size_t n = d.size();
    std::size_t rank = 0;
    std::uint32_t used = 0;
    for (std::size_t slot = 0; slot < n; ++slot) {
        const auto u = d[slot];
        const auto smaller_unused = static_cast<std::size_t>(std::popcount(~used & ((1U << u) - 1U)));
        rank += smaller_unused * factorial(n - 1 - slot);
        used |= 1U << u;
    }
    return rank;
}

PriorityDecision decision_at(std::size_t n, std::size_t rank) {
    if (rank >= factorial(n)) throw DomainError("decision rank out of range");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t slot = 0; slot < n; ++slot) {
        const std::size_t f = factorial(n - 1 - slot);
        const std::size_t k = rank / f;
        rank %= f;
        order.push_back(pool[k]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return PriorityDecision(std::move(order));
}

std::vector<PriorityDecision> enumerate_decisions(std::size_t n, std::size_t cap) {
    if (n == 0) throw DomainError("user count must be at least 1");
    if (n > cap) throw CapacityError("cannot enumerate decisions for n = " + std::to_string(n), cap);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<PriorityDecision> out;
    out.reserve(factorial(n));
    do {
        out.emplace_back(order);
    } while (std::next_permutation(order.begin(), order.end()));
    return out;
}

std::vector<PriorityDecision> decisions_with_prefix(UserSubset s, std::size_t n, std::size_t cap) {
    if (n == 0) throw DomainError("user count must be at least 1");
    if (n > cap) throw CapacityError("cannot enumerate decisions for n = " + std::to_string(n), cap);
    s.validate(n);
    std::vector<std::size_t> head = s.members();
    std::vector<std::size_t> tail;
    for (std::size_t u = 0; u < n; ++u) {
        if (!s.contains(u)) tail.push_back(u);
    }
    std::vector<PriorityDecision> out;
    out.reserve(factorial(head.size()) * factorial(tail.size()));
    do {
        std::vector<std::size_t> rest = tail;
        do {
            std::vector<std::size_t> order = head;
            order.insert(order.end(), rest.begin(), rest.end());
            out.emplace_back(std::move(order));
        } while (std::next_permutation(rest.begin(), rest.end()));
    } while (std::next_permutation(head.begin(), head.end()));
    // head-major nesting over sorted heads and tails is already lexicographic
    return out;
}

std::vector<std::size_t> prefix_decision_ranks(UserSubset s, std::size_t n) {
    std::vector<std::size_t> ranks;
    for (const auto& d : decisions_with_prefix(s, n)) ranks.push_back(decision_rank(d));
    return ranks;
}

PriorityDecision promote_subset(const PriorityDecision& d, UserSubset s) {
    s.validate(d.size());
    std::vector<std::size_t> order;
    order.reserve(d.size());
    for (auto u : d) {
        if (s.contains(u)) order.push_back(u);
    }
    for (auto u : d) {
        if (!s.contains(u)) order.push_back(u);
    }
    return PriorityDecision(std::move(order));
}

PriorityDecision swap_users(const PriorityDecision& d, std::size_t i, std::size_t j) {
    std::vector<std::size_t> order = d.order();
    std::swap(order[d.position_of(i)], order[d.position_of(j)]);
    return PriorityDecision(std::move(order));
}

// ---------------------------------------------------------------------------
// TablePayoffModel

TablePayoffModel::TablePayoffModel(std::size_t n, std::vector<std::vector<PayoffAtom>> dist)
    : n_(n), dist_(std::move(dist)) {
    if (n_ == 0) throw DomainError("user count must be at least 1");
    if (n_ > kDefaultDecisionCap) {
        throw CapacityError("table model with n = " + std::to_string(n_), kDefaultDecisionCap);
    }
    validate();
    cumulative_.resize(dist_.size());
    payoff_double_.resize(dist_.size());
    for (std::size_t r = 0; r < dist_.size(); ++r) {
        double acc = 0.0;
        for (const auto& atom : dist_[r]) {
            acc += to_double(atom.probability);
            cumulative_[r].push_back(acc);
            std::vector<double> v;
            for (const auto& x : atom.payoff) {
                v.push_back(to_double(x));
                if (x != 0 && x != 1) unit_ = false;
            }
            payoff_double_[r].push_back(std::move(v));
        }
        cumulative_[r].back() = 1.0;
    }
}

namespace {

std::vector<std::vector<PayoffAtom>> table_from_map(std::size_t n,
                                                    const std::map<PriorityDecision, std::vector<PayoffAtom>>& dist) {
    std::vector<std::vector<PayoffAtom>> out(factorial(n));
    for (const auto& [d, atoms] : dist) {
        if (d.size() != n) throw DomainError("decision " + d.to_string() + " has the wrong length");
        out[decision_rank(d)] = atoms;
    }
    return out;
}

}  // namespace

TablePayoffModel::TablePayoffModel(std::size_t n, const std::map<PriorityDecision, std::vector<PayoffAtom>>& dist)
    : TablePayoffModel(n, table_from_map(n, dist)) {}

TablePayoffModel TablePayoffModel::point_mass(std::size_t n, const std::vector<std::vector<Rational>>& rows) {
    std::vector<std::vector<PayoffAtom>> dist;
    dist.reserve(rows.size());
    for (const auto& row : rows) dist.push_back({PayoffAtom{Rational(1), row}});
    return TablePayoffModel(n, std::move(dist));
}

void TablePayoffModel::validate() const {
    if (dist_.size() != factorial(n_)) {
        throw DomainError("table needs " + std::to_string(factorial(n_)) + " decisions, got " +
                          std::to_string(dist_.size()));
    }
    std::vector<bool> positive(n_, false);
    for (std::size_t r = 0; r < dist_.size(); ++r) {
        const auto& atoms = dist_[r];
        if (atoms.empty()) throw DomainError("decision " + decision_at(n_, r).to_string() + " has no entry");
        Rational total = 0;
        for (const auto& atom : atoms) {
            if (atom.probability < 0) throw DomainError("negative probability");
            if (atom.payoff.size() != n_) throw DomainError("payoff vector has the wrong length");
            total += atom.probability;
            for (std::size_t i = 0; i < n_; ++i) {
                if (atom.payoff[i] < 0) throw DomainError("payoffs must be nonnegative");
                if (atom.payoff[i] > 0 && atom.probability > 0) positive[i] = true;
            }
        }
        if (std::abs(to_double(total - 1)) > 1e-12) {
            throw DomainError("probabilities for decision " + decision_at(n_, r).to_string() + " sum to " +
                              to_string(total));
        }
    }
    for (std::size_t i = 0; i < n_; ++i) {
        if (!positive[i]) {
            throw DomainError("user " + std::to_string(i) + " has zero payoff under every decision");
        }
    }
}

std::size_t TablePayoffModel::atom_for(std::size_t rank, double u) const {
    const auto& cum = cumulative_.at(rank);
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    if (it == cum.end()) --it;
    return static_cast<std::size_t>(it - cum.begin());
}

void TablePayoffModel::sample_into(std::size_t rank, double u, std::span<double> out) const {
    const auto& v = payoff_double_[rank][atom_for(rank, u)];
    std::copy(v.begin(), v.end(), out.begin());
}

// ---------------------------------------------------------------------------
// SingleResourceModel

double workload_mean(const Workload& w) {
    return std::visit(
        [](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Deterministic>) return law.value;
            else if constexpr (std::is_same_v<T, Exponential>) return 1.0 / law.rate;
            else return law.shape * law.scale;
        },
        w);
}

std::string to_string(const Workload& w) {
    std::ostringstream out;
    std::visit(
        [&](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Deterministic>) out << "Deterministic(" << law.value << ")";
            else if constexpr (std::is_same_v<T, Exponential>) out << "Exponential(rate=" << law.rate << ")";
            else out << "Gamma(shape=" << law.shape << ", scale=" << law.scale << ")";
        },
        w);
    return out.str();
}

namespace {

bool is_integer_shape(double shape) { return shape >= 1.0 && std::floor(shape) == shape && shape <= 1e4; }

}  // namespace

SingleResourceModel::SingleResourceModel(double period_length, std::vector<Workload> workloads)
    : period_length_(period_length), workloads_(std::move(workloads)) {
    if (!(period_length_ > 0) || !std::isfinite(period_length_)) throw DomainError("period length must be > 0");
    if (workloads_.empty()) throw DomainError("user count must be at least 1");
    if (workloads_.size() > kDefaultDecisionCap) {
        throw CapacityError("single-resource model with n = " + std::to_string(workloads_.size()),
                            kDefaultDecisionCap);
    }
    for (const auto& w : workloads_) {
        const bool ok = std::visit(
            [](const auto& law) {
                using T = std::decay_t<decltype(law)>;
                if constexpr (std::is_same_v<T, Deterministic>) return law.value > 0 && std::isfinite(law.value);
                else if constexpr (std::is_same_v<T, Exponential>) return law.rate > 0 && std::isfinite(law.rate);
                else return law.shape > 0 && law.scale > 0 && std::isfinite(law.shape) && std::isfinite(law.scale);
            },
            w);
        if (!ok) throw DomainError("workload parameters must be positive and finite: " + to_string(w));
    }
    // every user must be able to complete when served first
    for (std::size_t i = 0; i < workloads_.size(); ++i) {
        if (const auto* det = std::get_if<Deterministic>(&workloads_[i]); det && det->value > period_length_) {
            throw DomainError("user " + std::to_string(i) + " can never complete: workload exceeds period");
        }
    }
}

bool SingleResourceModel::supports_exact() const {
    return std::all_of(workloads_.begin(), workloads_.end(), [](const Workload& w) {
        const auto* g = std::get_if<Gamma>(&w);
        return g == nullptr || is_integer_shape(g->shape);
    });
}

std::size_t users(const PayoffModel& model) {
    return std::visit([](const auto& m) { return m.users(); }, model);
}

bool unit_payoffs(const PayoffModel& model) {
    if (const auto* t = std::get_if<TablePayoffModel>(&model)) return t->unit_payoffs();
    return true;
}

WorkloadSampler::WorkloadSampler(const SingleResourceModel& model) {
    for (const auto& w : model.workloads()) {
        Source src{w, {}, {}};
        if (const auto* e = std::get_if<Exponential>(&w)) src.exponential = std::exponential_distribution<double>(e->rate);
        if (const auto* g = std::get_if<Gamma>(&w)) src.gamma = std::gamma_distribution<double>(g->shape, g->scale);
        sources_.push_back(std::move(src));
    }
}

void WorkloadSampler::draw(RngStream& rng, std::span<double> out) {
    for (std::size_t i = 0; i < sources_.size(); ++i) {
        auto& src = sources_[i];
        switch (src.law.index()) {
            case 0: out[i] = std::get<Deterministic>(src.law).value; break;
            case 1: out[i] = src.exponential(rng); break;
            default: out[i] = src.gamma(rng); break;
        }
    }
}

void completion_payoffs(const SingleResourceModel& model, const PriorityDecision& d, std::span<const double> workloads,
                        std::span<double> out) {
    double finish = 0.0;
    const double horizon = model.period_length();
    for (auto u : d) {
        finish += workloads[u];
        out[u] = finish <= horizon ? 1.0 : 0.0;
    }
}

std::vector<double> sample_payoffs(const PayoffModel& model, const PriorityDecision& d, RngStream& rng) {
    const std::size_t n = users(model);
    if (d.size() != n) throw DomainError("decision length does not match the model");
    std::vector<double> out(n, 0.0);
    if (const auto* table = std::get_if<TablePayoffModel>(&model)) {
        table->sample_into(decision_rank(d), rng.uniform(), out);
    } else {
        const auto& single = std::get<SingleResourceModel>(model);
        WorkloadSampler sampler(single);
        std::vector<double> w(n);
        sampler.draw(rng, w);
        completion_payoffs(single, d, w, out);
    }
    return out;
}

PayoffSampler::PayoffSampler(const PayoffModel& model, RngStream rng) : model_(&model), rng_(std::move(rng)) {
    if (const auto* single = std::get_if<SingleResourceModel>(model_)) {
        workloads_.emplace(*single);
        scratch_.resize(single->users());
    }
}

void PayoffSampler::sample(const PriorityDecision& d, std::span<double> out) {
    if (const auto* table = std::get_if<TablePayoffModel>(model_)) {
        table->sample_into(decision_rank(d), rng_.uniform(), out);
        return;
    }
    workloads_->draw(rng_, scratch_);
    completion_payoffs(std::get<SingleResourceModel>(*model_), d, scratch_, out);
}

// ---------------------------------------------------------------------------
// ExpectedPayoffTable

ExpectedPayoffTable::ExpectedPayoffTable(std::size_t n, std::vector<double> values, Provenance provenance)
    : n_(n), values_(std::move(values)), provenance_(provenance) {
    validate();
}

ExpectedPayoffTable::ExpectedPayoffTable(std::size_t n, std::vector<Rational> exact) : n_(n) {
    values_.reserve(exact.size());
    for (const auto& v : exact) values_.push_back(to_double(v));
    exact_ = std::move(exact);
    validate();
    for (const auto& v : *exact_) {
        if (v < 0) throw DomainError("expected payoffs must be nonnegative");
    }
}

ExpectedPayoffTable ExpectedPayoffTable::from_rows(std::size_t n, const std::vector<std::vector<double>>& rows) {
    std::vector<double> flat;
    for (const auto& r : rows) {
        if (r.size() != n) throw DomainError("payoff row has the wrong length");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return ExpectedPayoffTable(n, std::move(flat));
}

ExpectedPayoffTable ExpectedPayoffTable::from_exact_rows(std::size_t n, const std::vector<std::vector<Rational>>& rows) {
    std::vector<Rational> flat;
    for (const auto& r : rows) {
        if (r.size() != n) throw DomainError("payoff row has the wrong length");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return ExpectedPayoffTable(n, std::move(flat));
}

void ExpectedPayoffTable::validate() const {
    if (n_ == 0) throw DomainError("user count must be at least 1");
    if (n_ > kDefaultDecisionCap) throw CapacityError("payoff table with n = " + std::to_string(n_), kDefaultDecisionCap);
    if (values_.size() != factorial(n_) * n_) {
        throw DomainError("payoff table needs one entry per permutation (" + std::to_string(factorial(n_)) + ")");
    }
    for (double v : values_) {
        if (!std::isfinite(v) || v < 0) throw DomainError("expected payoffs must be finite and nonnegative");
    }
}

std::span<const Rational> ExpectedPayoffTable::exact_values() const {
    if (!exact_) throw ModeError("payoff table has no exact values (estimated by Monte Carlo)");
    return *exact_;
}

void ExpectedPayoffTable::set_standard_errors(std::vector<double> errors) {
    if (errors.size() != values_.size()) throw DomainError("standard errors have the wrong length");
    std_errors_ = std::move(errors);
}

double ExpectedPayoffTable::max_entry() const { return *std::max_element(values_.begin(), values_.end()); }

// ---------------------------------------------------------------------------
// Expected payoffs

double completion_probability(std::span<const Workload> laws, double horizon) {
    double fixed = 0.0;
    std::vector<double> rates;
    for (const auto& w : laws) {
        if (const auto* det = std::get_if<Deterministic>(&w)) {
            fixed += det->value;
        } else if (const auto* e = std::get_if<Exponential>(&w)) {
            rates.push_back(e->rate);
        } else {
            const auto& g = std::get<Gamma>(w);
            if (!is_integer_shape(g.shape)) {
                throw ModeError("exact expectation needs integer gamma shape, got " + to_string(w));
            }
            for (int k = 0; k < static_cast<int>(g.shape); ++k) rates.push_back(1.0 / g.scale);
        }
    }
    const double x = horizon - fixed;
    if (x < 0) return 0.0;
    if (rates.empty()) return 1.0;
    if (x == 0) return 0.0;

    // Uniformized phase chain: the sum of exponential stages is absorbed
    // by time x with probability sum_m Poisson(L x; m) * P(absorbed in m jumps).
    const double big_l = *std::max_element(rates.begin(), rates.end());
    const double mean_jumps = big_l * x;
    const std::size_t phases = rates.size();
    std::vector<double> state(phases + 1, 0.0);
    state[0] = 1.0;
    const auto limit = static_cast<std::size_t>(mean_jumps + 40.0 * std::sqrt(mean_jumps) + 200.0);
    double result = 0.0;
    double poisson_mass = 0.0;
    for (std::size_t m = 0; m <= limit; ++m) {
        const double log_pmf = -mean_jumps + static_cast<double>(m) * std::log(mean_jumps) - std::lgamma(m + 1.0);
        const double pmf = std::exp(log_pmf);
        result += pmf * state[phases];
        poisson_mass += pmf;
        if (m > mean_jumps && 1.0 - poisson_mass < 1e-17) break;
        for (std::size_t k = phases; k-- > 0;) {
            const double move = state[k] * rates[k] / big_l;
            state[k] -= move;
            state[k + 1] += move;
        }
    }
    return std::clamp(result, 0.0, 1.0);
}

ExpectedPayoffTable expected_payoffs(const PayoffModel& model, const Estimation& estimation) {
    const std::size_t n = users(model);
    if (const auto* mc = std::get_if<MonteCarloEstimation>(&estimation)) {
        if (mc->samples < 2) throw DomainError("Monte Carlo estimation needs at least 2 samples");
        auto estimate = kernels::estimate_payoffs_parallel(model, mc->samples, mc->seed);
        Provenance prov{Provenance::Kind::monte_carlo, mc->samples, mc->seed};
        ExpectedPayoffTable table(n, std::move(estimate.mean), prov);
        table.set_standard_errors(std::move(estimate.standard_error));
        return table;
    }

    if (const auto* table = std::get_if<TablePayoffModel>(&model)) {
        std::vector<Rational> exact(factorial(n) * n, Rational(0));
        for (std::size_t r = 0; r < table->distributions().size(); ++r) {
            for (const auto& atom : table->distribution(r)) {
                for (std::size_t i = 0; i < n; ++i) exact[r * n + i] += atom.probability * atom.payoff[i];
            }
        }
        return ExpectedPayoffTable(n, std::move(exact));
    }

    const auto& single = std::get<SingleResourceModel>(model);
    if (!single.supports_exact()) {
        throw ModeError("exact expected payoffs need deterministic, exponential or integer-shape gamma workloads");
    }
    std::vector<double> values(factorial(n) * n, 0.0);
    for (std::size_t r = 0; r < factorial(n); ++r) {
        const auto d = decision_at(n, r);
        std::vector<Workload> prefix;
        for (auto u : d) {
            prefix.push_back(single.workloads()[u]);
            values[r * n + u] = completion_probability(prefix, single.period_length());
        }
    }
    return ExpectedPayoffTable(n, std::move(values));
}

// ---------------------------------------------------------------------------
// Structural properties

std::string describe(const PropertyWitness& witness) {
    return std::visit(
        [](const auto& w) -> std::string {
            using T = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<T, MonotonicityWitness>) {
                return "user " + std::to_string(w.user) + " earns more under " + w.d2.to_string() + " than under " +
                       w.d1.to_string() + " although it has fewer users above it in the latter";
            } else if constexpr (std::is_same_v<T, SubsetWitness>) {
                return "no nonnegative normal puts P^S on one hyperplane for S = " + w.subset.to_string();
            } else {
                return "swapping users " + std::to_string(w.i) + " and " + std::to_string(w.j) + " in " +
                       w.d.to_string() + " does not exchange their payoffs";
            }
        },
        witness);
}

namespace {

template <class Scalar>
PropertyVerdict monotonicity_impl(std::size_t n, std::span<const Scalar> p, const Scalar& tol) {
    const std::size_t count = factorial(n);
    const std::uint32_t full = UserSubset::full(n).mask();

    // Range of p_i over decisions sharing the same higher-priority set.
    std::vector<std::optional<Scalar>> lo(n * (full + 1)), hi(n * (full + 1));
    for (std::size_t r = 0; r < count; ++r) {
        const auto d = decision_at(n, r);
        std::uint32_t above = 0;
        for (auto u : d) {
            auto& l = lo[u * (full + 1) + above];
            auto& h = hi[u * (full + 1) + above];
            const Scalar& v = p[r * n + u];
            if (!l || v < *l) l = v;
            if (!h || v > *h) h = v;
            above |= 1U << u;
        }
    }
    bool violated = false;
    for (std::size_t i = 0; i < n && !violated; ++i) {
        for (std::uint32_t a = 0; a <= full && !violated; ++a) {
            const auto& l = lo[i * (full + 1) + a];
            if (!l) continue;
            for (std::uint32_t b = 0; b <= full; ++b) {
                if ((a & ~b) != 0) continue;
                const auto& h = hi[i * (full + 1) + b];
                if (h && *l < *h - tol) {
                    violated = true;
                    break;
                }
            }
        }
    }
    PropertyVerdict verdict;
    if (!violated) return verdict;

    verdict.holds = false;
    for (std::size_t r1 = 0; r1 < count; ++r1) {
        const auto d1 = decision_at(n, r1);
        for (std::size_t r2 = 0; r2 < count; ++r2) {
            const auto d2 = decision_at(n, r2);
            for (std::size_t i = 0; i < n; ++i) {
                if (!d1.higher_priority_set(i).is_subset_of(d2.higher_priority_set(i))) continue;
                if (p[r1 * n + i] < p[r2 * n + i] - tol) {
                    verdict.witness = MonotonicityWitness{d1, d2, i};
                    return verdict;
                }
            }
        }
    }
    return verdict;
}

template <class Scalar>
bool close(const Scalar& a, const Scalar& b, const Scalar& tol) {
    return a - b <= tol && b - a <= tol;
}

template <class Scalar>
PropertyVerdict exchangeable_impl(std::size_t n, std::span<const Scalar> p, UserSubset s, const Scalar& tol) {
    PropertyVerdict verdict;
    const auto members = s.members();
    if (members.size() <= 1) return verdict;
    const std::size_t count = factorial(n);
    for (std::size_t r = 0; r < count; ++r) {
        const auto d = decision_at(n, r);
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                const std::size_t i = members[a], j = members[b];
                const std::size_t r2 = decision_rank(swap_users(d, i, j));
                bool ok = close(p[r2 * n + i], p[r * n + j], tol) && close(p[r2 * n + j], p[r * n + i], tol);
                for (std::size_t k = 0; k < n && ok; ++k) {
                    if (k != i && k != j) ok = close(p[r2 * n + k], p[r * n + k], tol);
                }
                if (!ok) {
                    verdict.holds = false;
                    verdict.witness = ExchangeWitness{d, i, j};
                    return verdict;
                }
            }
        }
    }
    return verdict;
}

template <class Scalar>
PropertyVerdict equivalence_impl(std::size_t n, std::span<const Scalar> p, const Scalar& tol) {
    PropertyVerdict verdict;
    for (auto s : nonempty_subsets(n)) {
        const auto members = s.members();
        const auto ranks = prefix_decision_ranks(s, n);
        const std::size_t k = members.size();
        // variables: alpha over S, then spread s >= 0; maximize -s
        BasicLinearProgram<Scalar> lp(k + 1);
        lp.set_objective(k, Scalar(-1));
        std::vector<Scalar> norm(k + 1, Scalar(1));
        norm[k] = Scalar(0);
        lp.add_constraint(std::move(norm), Relation::equal, Scalar(1));
        for (std::size_t idx = 1; idx < ranks.size(); ++idx) {
            std::vector<Scalar> up(k + 1), down(k + 1);
            for (std::size_t a = 0; a < k; ++a) {
                const std::size_t i = members[a];
                Scalar diff = p[ranks[idx] * n + i] - p[ranks[0] * n + i];
                up[a] = diff;
                down[a] = -diff;
            }
            up[k] = Scalar(-1);
            down[k] = Scalar(-1);
            lp.add_constraint(std::move(up), Relation::less_equal, Scalar(0));
            lp.add_constraint(std::move(down), Relation::less_equal, Scalar(0));
        }
        const auto sol = solve(lp);
        const Scalar spread = -sol.value;
        if (sol.status != LpStatus::optimal || spread > tol) {
            verdict.holds = false;
            verdict.witness = SubsetWitness{s};
            return verdict;
        }
        SubsetCertificate cert{s, std::vector<double>(n, 0.0), 0.0};
        for (std::size_t a = 0; a < k; ++a) {
            if constexpr (std::is_same_v<Scalar, double>) cert.alpha[members[a]] = sol.z[a];
            else cert.alpha[members[a]] = to_double(sol.z[a]);
        }
        if constexpr (std::is_same_v<Scalar, double>) cert.spread = spread;
        else cert.spread = to_double(spread);
        verdict.certificates.push_back(std::move(cert));
    }
    return verdict;
}

}  // namespace

PropertyVerdict check_monotonicity(const ExpectedPayoffTable& p, Arithmetic arithmetic, double tol) {
    if (arithmetic == Arithmetic::exact) {
        auto v = monotonicity_impl<Rational>(p.users(), p.exact_values(), Rational(0));
        v.arithmetic = Arithmetic::exact;
        return v;
    }
    return monotonicity_impl<double>(p.users(), p.values(), tol);
}

PropertyVerdict check_subset_payoff_equivalence(const ExpectedPayoffTable& p, Arithmetic arithmetic, double tol,
                                                std::size_t cap) {
    if (p.users() > cap) {
        throw CapacityError("subset payoff equivalence for n = " + std::to_string(p.users()), cap);
    }
    if (arithmetic == Arithmetic::exact) {
        auto v = equivalence_impl<Rational>(p.users(), p.exact_values(), Rational(0));
        v.arithmetic = Arithmetic::exact;
        return v;
    }
    return equivalence_impl<double>(p.users(), p.values(), tol);
}

PropertyVerdict check_exchangeable(const ExpectedPayoffTable& p, UserSubset s, Arithmetic arithmetic, double tol) {
    s.validate(p.users());
    if (arithmetic == Arithmetic::exact) {
        auto v = exchangeable_impl<Rational>(p.users(), p.exact_values(), s, Rational(0));
        v.arithmetic = Arithmetic::exact;
        return v;
    }
    return exchangeable_impl<double>(p.users(), p.values(), s, tol);
}

}  // namespace ldf
