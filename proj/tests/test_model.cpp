#include <ldf/errors.hpp>
#include <ldf/model.hpp>
#include <ldf/oracle.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace ldf;

namespace {

ExpectedPayoffTable rows3(const std::vector<std::vector<double>>& rows) { return ExpectedPayoffTable::from_rows(3, rows); }

PayoffModel gamma_model() { return SingleResourceModel(10.0, {Gamma{12, 0.5}, Gamma{4, 1}, Gamma{10, 0.1}}); }

bool is_permutation_of_n(const PriorityDecision& d) {
    std::vector<std::size_t> v(d.begin(), d.end());
    std::sort(v.begin(), v.end());
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != i) return false;
    return true;
}

}  // namespace

TEST_CASE("enumerate_decisions") {
    const auto one = enumerate_decisions(1);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == PriorityDecision{0});

    const auto three = enumerate_decisions(3);
    CHECK(three.size() == 6);
    CHECK(std::is_sorted(three.begin(), three.end()));

    const auto five = enumerate_decisions(5);
    CHECK(five.size() == 120);
    CHECK(std::set<PriorityDecision>(five.begin(), five.end()).size() == 120);
    for (std::size_t r = 0; r < five.size(); ++r) {
        CHECK(is_permutation_of_n(five[r]));
        CHECK(decision_rank(five[r]) == r);
        CHECK(decision_at(5, r) == five[r]);
    }
    CHECK_THROWS_AS(enumerate_decisions(9), CapacityError);
    CHECK(enumerate_decisions(9, 9).size() == 362880);
}

TEST_CASE("decision validation") {
    CHECK_THROWS_AS(PriorityDecision({0, 0}), DomainError);
    CHECK_THROWS_AS(PriorityDecision({1, 2}), DomainError);
    const PriorityDecision d{2, 0, 1};
    CHECK(d.position_of(0) == 1);
    CHECK(d.higher_priority_set(1) == UserSubset{0, 2});
    CHECK(d.higher_priority_set(2).empty());
}

TEST_CASE("decisions_with_prefix examples") {
    CHECK(decisions_with_prefix({0}, 2) == std::vector<PriorityDecision>{{0, 1}});
    CHECK(decisions_with_prefix({0, 1}, 3) == std::vector<PriorityDecision>{{0, 1, 2}, {1, 0, 2}});
    CHECK(decisions_with_prefix({}, 3).size() == 6);
    CHECK_THROWS_AS(decisions_with_prefix({3}, 3), DomainError);
}

TEST_CASE("decisions_with_prefix matches filtering every permutation") {
    for (std::size_t n = 1; n <= 5; ++n) {
        const auto all = enumerate_decisions(n);
        for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
            const auto s = UserSubset::from_mask(mask);
            std::vector<PriorityDecision> expect;
            for (const auto& d : all) {
                UserSubset head;
                for (std::size_t k = 0; k < s.size(); ++k) head.insert(d[k]);
                if (head == s) expect.push_back(d);
            }
            CHECK(decisions_with_prefix(s, n) == expect);
            std::vector<std::size_t> ranks;
            for (const auto& d : expect) ranks.push_back(decision_rank(d));
            CHECK(prefix_decision_ranks(s, n) == ranks);
        }
    }
}

TEST_CASE("promote_subset examples") {
    CHECK(promote_subset({2, 0, 1}, {1}) == PriorityDecision{1, 2, 0});
    CHECK(promote_subset({0, 1, 2}, {0, 1}) == PriorityDecision{0, 1, 2});
    CHECK(promote_subset({3, 2, 1, 0}, {0, 2}) == PriorityDecision{2, 0, 3, 1});
}

TEST_CASE("promote_subset lands in the prefix set and is idempotent") {
    for (std::size_t n = 1; n <= 5; ++n) {
        for (const auto& d : enumerate_decisions(n)) {
            for (const auto& s : nonempty_subsets(n)) {
                const auto m = promote_subset(d, s);
                const auto ds = decisions_with_prefix(s, n);
                CHECK(std::find(ds.begin(), ds.end(), m) != ds.end());
                CHECK(promote_subset(m, s) == m);
            }
        }
    }
}

TEST_CASE("single resource with deterministic workloads") {
    const PayoffModel overfull = SingleResourceModel(10, {Deterministic{6}, Deterministic{5}});
    const auto p = expected_payoffs(overfull, ExactEstimation{});
    CHECK(p.payoff({0, 1}, 0) == 1.0);
    CHECK(p.payoff({0, 1}, 1) == 0.0);
    CHECK(p.payoff({1, 0}, 0) == 0.0);
    CHECK(p.payoff({1, 0}, 1) == 1.0);

    const PayoffModel fits = SingleResourceModel(10, {Deterministic{4}, Deterministic{5}});
    const auto q = expected_payoffs(fits, ExactEstimation{});
    for (std::size_t r = 0; r < 2; ++r) {
        CHECK(q(r, 0) == 1.0);
        CHECK(q(r, 1) == 1.0);
    }

    RngStream rng(1);
    CHECK(sample_payoffs(overfull, {1, 0}, rng) == std::vector<double>{0, 1});
    CHECK_THROWS_AS(SingleResourceModel(10, {Deterministic{11}}), DomainError);
    CHECK_THROWS_AS(SingleResourceModel(10, {Gamma{-1, 1}}), DomainError);
}

TEST_CASE("point-mass table always returns its atom") {
    const auto model = TablePayoffModel::point_mass(2, {{1, 0}, {0, 1}});
    RngStream rng(3);
    for (int i = 0; i < 50; ++i) CHECK(sample_payoffs(PayoffModel(model), {0, 1}, rng) == std::vector<double>{1, 0});
    CHECK_THROWS_AS(TablePayoffModel(2, std::vector<std::vector<PayoffAtom>>{{{Rational(1, 2), {1, 0}}}, {{1, {0, 1}}}}),
                    DomainError);
}

TEST_CASE("completion probabilities against closed forms") {
    const std::vector<Workload> one{Exponential{1.0}};
    CHECK(completion_probability(one, 2.0) == doctest::Approx(1 - std::exp(-2.0)).epsilon(1e-12));
    const std::vector<Workload> two{Exponential{1.0}, Exponential{1.0}};
    CHECK(completion_probability(two, 3.0) == doctest::Approx(1 - std::exp(-3.0) * 4.0).epsilon(1e-12));
    const std::vector<Workload> mixed{Exponential{1.0}, Exponential{2.0}};
    // hypoexponential CDF
    const double x = 1.5;
    CHECK(completion_probability(mixed, x) == doctest::Approx(1 - 2 * std::exp(-x) + std::exp(-2 * x)).epsilon(1e-10));
    const std::vector<Workload> shifted{Deterministic{1.0}, Exponential{1.0}};
    CHECK(completion_probability(shifted, 3.0) == doctest::Approx(1 - std::exp(-2.0)).epsilon(1e-12));
    const std::vector<Workload> fixed{Deterministic{4.0}, Deterministic{7.0}};
    CHECK(completion_probability(fixed, 10.0) == 0.0);
}

TEST_CASE("gamma workloads: estimate agrees with an independent brute-force Monte Carlo") {
    const auto model = gamma_model();
    const auto est = expected_payoffs(model, MonteCarloEstimation{200000, 17});
    REQUIRE(est.provenance().kind == Provenance::Kind::monte_carlo);
    CHECK(est.provenance().samples == 200000);

    // oracle: plain loop with its own generator, 10^6 draws, decision (0,1,2)
    std::mt19937_64 gen(4242);
    std::gamma_distribution<double> g0(12, 0.5), g1(4, 1), g2(10, 0.1);
    const std::size_t m = 1000000;
    std::array<double, 3> hits{};
    for (std::size_t k = 0; k < m; ++k) {
        const double a = g0(gen), b = g1(gen), c = g2(gen);
        hits[0] += a <= 10;
        hits[1] += a + b <= 10;
        hits[2] += a + b + c <= 10;
    }
    for (std::size_t i = 0; i < 3; ++i) {
        const double oracle = hits[i] / m;
        const double se = std::sqrt(oracle * (1 - oracle) / m) + est.standard_errors()[i];
        CHECK(std::abs(est(0, i) - oracle) <= 3 * se + 1e-12);
    }

    // integer shapes have an exact answer as well
    const auto exact = expected_payoffs(model, ExactEstimation{});
    for (std::size_t r = 0; r < 6; ++r)
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(std::abs(exact(r, i) - est(r, i)) <= 3 * est.standard_errors()[r * 3 + i] + 1e-12);
}

TEST_CASE("sample_payoffs averages to the expected payoffs") {
    const auto model = gamma_model();
    const auto exact = expected_payoffs(model, ExactEstimation{});
    RngStream rng(8);
    const std::size_t m = 200000;
    std::array<double, 3> sum{};
    for (std::size_t k = 0; k < m; ++k) {
        const auto v = sample_payoffs(model, {1, 2, 0}, rng);
        for (std::size_t i = 0; i < 3; ++i) sum[i] += v[i];
    }
    const auto rank = decision_rank({1, 2, 0});
    for (std::size_t i = 0; i < 3; ++i) {
        const double p = exact(rank, i);
        CHECK(std::abs(sum[i] / m - p) <= 3 * std::sqrt(p * (1 - p) / m) + 1e-12);
    }
}

TEST_CASE("non-integer gamma shape has no exact path") {
    const PayoffModel model = SingleResourceModel(10, {Gamma{2.5, 1}, Gamma{1, 1}});
    CHECK_THROWS_AS(expected_payoffs(model, ExactEstimation{}), ModeError);
    CHECK_NOTHROW(expected_payoffs(model, MonteCarloEstimation{1000, 1}));
}

TEST_CASE("monte carlo error shrinks like 1/sqrt(samples)") {
    const auto model = gamma_model();
    const auto small = expected_payoffs(model, MonteCarloEstimation{50000, 5});
    const auto large = expected_payoffs(model, MonteCarloEstimation{100000, 5});
    const auto exact = expected_payoffs(model, ExactEstimation{});
    for (std::size_t k = 0; k < 18; ++k) {
        const double s = small.standard_errors()[k], l = large.standard_errors()[k];
        if (s == 0) continue;
        CHECK(l / s == doctest::Approx(std::sqrt(0.5)).epsilon(0.05));
        CHECK(std::abs(large.values()[k] - exact.values()[k]) <= 3 * l + 1e-12);
    }
}

TEST_CASE("monotonicity checker") {
    const auto two_user = oracle::brute_expected_payoffs(oracle::two_user_model());
    CHECK(check_monotonicity(two_user).holds);
    CHECK(check_monotonicity(two_user, Arithmetic::exact).holds);

    const auto bad = ExpectedPayoffTable::from_rows(2, {{0.5, 0}, {1, 1}});
    const auto v = check_monotonicity(bad);
    CHECK_FALSE(v.holds);
    REQUIRE(v.witness);
    const auto w = std::get<MonotonicityWitness>(*v.witness);
    CHECK(w.d1 == PriorityDecision{0, 1});
    CHECK(w.d2 == PriorityDecision{1, 0});
    CHECK(w.user == 0);
    CHECK_FALSE(describe(*v.witness).empty());

    for (const auto& m : {gamma_model(), PayoffModel(SingleResourceModel(5, {Exponential{1}, Exponential{0.5}, Deterministic{1}}))}) {
        CHECK(check_monotonicity(expected_payoffs(m, ExactEstimation{})).holds);
    }
}

TEST_CASE("equivalence checker") {
    // any monotone two-user table
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto p = oracle::brute_expected_payoffs(oracle::gen_monotone_table(2, seed, false));
        CHECK(check_subset_payoff_equivalence(p).holds);
        CHECK(check_subset_payoff_equivalence(p, Arithmetic::exact).holds);
    }
    // without monotonicity two points can fail: (0.5,0) and (1,1) differ by a positive vector
    CHECK_FALSE(check_subset_payoff_equivalence(ExpectedPayoffTable::from_rows(2, {{0.5, 0}, {1, 1}})).holds);

    // the full set fails while every smaller subset passes
    const auto p = rows3({{1, 0, 0}, {1, 0.1, 0.3}, {0, 1, 0}, {0.3, 1, 0.1}, {0, 0, 1}, {0.1, 0.3, 1}});
    const auto v = check_subset_payoff_equivalence(p);
    CHECK_FALSE(v.holds);
    REQUIRE(v.witness);
    CHECK(std::get<SubsetWitness>(*v.witness).subset == UserSubset{0, 1, 2});
    // grid oracle: no alpha flattens the full set
    CHECK(oracle::sigma_grid_search(p, {0, 1, 2}).sigma < 1 - 1e-3);

    const auto exact_version = ExpectedPayoffTable::from_exact_rows(
        3, {{1, 0, 0}, {1, Rational(1, 10), Rational(3, 10)}, {0, 1, 0}, {Rational(3, 10), 1, Rational(1, 10)}, {0, 0, 1},
            {Rational(1, 10), Rational(3, 10), 1}});
    CHECK_FALSE(check_subset_payoff_equivalence(exact_version, Arithmetic::exact).holds);
}

TEST_CASE("exchangeable tables") {
    const auto sym = expected_payoffs(PayoffModel(SingleResourceModel(3, {Exponential{1}, Exponential{1}, Exponential{1}})),
                                      ExactEstimation{});
    CHECK(check_exchangeable(sym, UserSubset::full(3)).holds);
    CHECK(check_monotonicity(sym).holds);
    const auto eq = check_subset_payoff_equivalence(sym);
    CHECK(eq.holds);
    for (const auto& c : eq.certificates) {
        const double share = 1.0 / static_cast<double>(c.subset.size());
        for (auto i : c.subset.members()) CHECK(c.alpha[i] == doctest::Approx(share).epsilon(1e-6));
    }
    // sums over S are constant on D(S)
    for (const auto& s : nonempty_subsets(3)) {
        std::vector<double> sums;
        for (auto r : prefix_decision_ranks(s, 3)) {
            double total = 0;
            for (auto i : s.members()) total += sym(r, i);
            sums.push_back(total);
        }
        for (double x : sums) CHECK(x == doctest::Approx(sums[0]).epsilon(1e-12));
    }

    const auto gamma = expected_payoffs(gamma_model(), ExactEstimation{});
    const auto v = check_exchangeable(gamma, UserSubset::full(3));
    CHECK_FALSE(v.holds);
    CHECK(v.witness);
    CHECK(check_exchangeable(gamma, {1}).holds);
    CHECK(check_exchangeable(gamma, {}).holds);
}

TEST_CASE("monotone tables never reward demotion") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto p = oracle::brute_expected_payoffs(oracle::gen_monotone_table(4, seed, seed % 2 == 0));
        REQUIRE(check_monotonicity(p).holds);
        for (const auto& d : enumerate_decisions(4))
            for (const auto& s : nonempty_subsets(4))
                for (auto i : s.members()) CHECK(p.payoff(promote_subset(d, s), i) >= p.payoff(d, i) - 1e-9);
    }
}
