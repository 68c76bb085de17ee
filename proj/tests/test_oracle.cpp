#include <ldf/errors.hpp>
#include <ldf/oracle.hpp>
#include <ldf/policy.hpp>

#include <doctest.h>

using namespace ldf;

TEST_CASE("brute-force expectations") {
    const auto point = TablePayoffModel::point_mass(2, {{1, Rational(1, 3)}, {0, 1}});
    const auto p = oracle::brute_expected_payoffs(point);
    CHECK(p.exact(0, 1) == Rational(1, 3));
    CHECK(p.exact(1, 0) == 0);

    const std::vector<PayoffAtom> coin{{Rational(1, 2), {1, 0}}, {Rational(1, 2), {0, 1}}};
    const TablePayoffModel mixed(2, std::vector<std::vector<PayoffAtom>>{coin, coin});
    const auto m = oracle::brute_expected_payoffs(mixed);
    CHECK(m.exact(0, 0) == Rational(1, 2));
    CHECK(m.exact(1, 1) == Rational(1, 2));

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto model = oracle::gen_random_table(3, seed);
        const auto a = oracle::brute_expected_payoffs(model);
        const auto b = expected_payoffs(PayoffModel(model), ExactEstimation{});
        for (std::size_t k = 0; k < a.values().size(); ++k) {
            CHECK(a.exact_values()[k] == b.exact_values()[k]);
            CHECK(a.values()[k] == b.values()[k]);
        }
    }
}

TEST_CASE("generators") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        CHECK(check_monotonicity(oracle::brute_expected_payoffs(oracle::gen_monotone_table(2, seed, false))).holds);
        const auto eq = oracle::brute_expected_payoffs(oracle::gen_monotone_table(3, seed, true));
        CHECK(check_monotonicity(eq, Arithmetic::exact).holds);
        CHECK(check_subset_payoff_equivalence(eq).holds);
    }
    int non_equivalent = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto p = oracle::brute_expected_payoffs(oracle::gen_monotone_table(3, seed, false));
        CHECK(check_monotonicity(p).holds);
        non_equivalent += !check_subset_payoff_equivalence(p).holds;
    }
    CHECK(non_equivalent > 0);
    CHECK(oracle::gen_monotone_table(3, 4, false).distributions().size() == 6);
    // same seed, same table
    const auto a = oracle::brute_expected_payoffs(oracle::gen_random_table(3, 8));
    const auto b = oracle::brute_expected_payoffs(oracle::gen_random_table(3, 8));
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

TEST_CASE("exhaustive MW argmax agrees with the policy") {
    RngStream rng(12);
    auto tb = TieBreak::lowest_index();
    for (std::size_t n = 2; n <= 4; ++n) {
        const auto p = oracle::brute_expected_payoffs(oracle::gen_random_table(n, n));
        for (int k = 0; k < 50; ++k) {
            std::vector<double> x(n);
            for (auto& v : x) v = std::floor(rng.uniform() * 4);
            CHECK(select_mw_rank(x, p, tb) == oracle::mw_argmax(x, p));
        }
    }
}

TEST_CASE("two-user exact replay") {
    const auto t = oracle::replay_two_user(10000);
    CHECK(t.p_hat_truncated[0] == Rational(1, 2));
    CHECK(t.p_hat_truncated[1] == Rational(1, 2));
    CHECK(abs(t.p_hat_signed[0] - Rational(3, 10)) <= Rational(1, 1000));
    CHECK(abs(t.p_hat_signed[1] - Rational(7, 10)) <= Rational(1, 1000));
    CHECK(t.truncated.size() == 10000);
    // the truncated trajectory settles into a cycle of length 2
    for (std::size_t k = 1; k + 2 < t.truncated.size(); ++k) CHECK(t.truncated[k] == t.truncated[k + 2]);
    // signed deficits drift together; their difference repeats with period 10
    auto gap = [&](std::size_t k) { return t.signed_[k][0] - t.signed_[k][1]; };
    for (std::size_t k = 100; k + 10 < t.signed_.size(); k += 97) CHECK(gap(k) == gap(k + 10));
    CHECK_THROWS_AS(oracle::replay_two_user(5), DomainError);
}

TEST_CASE("grid scan") {
    const auto two = oracle::brute_expected_payoffs(oracle::two_user_model());
    const auto rep = oracle::grid_scan_regions(two, 0.05, 1e-6);
    CHECK(rep.monotone);
    CHECK(rep.sandwich_checked);
    CHECK(rep.sandwich_violations == 0);
    CHECK(rep.points.size() == 21 * 21);

    const auto eq = oracle::brute_expected_payoffs(oracle::gen_monotone_table(3, 1, true));
    const auto r2 = oracle::grid_scan_regions(eq, 0.1, 1e-6);
    CHECK(r2.equivalence_checked);
    CHECK(r2.equivalence_violations == 0);
    CHECK(r2.sandwich_violations == 0);

    const auto bad = ExpectedPayoffTable::from_rows(2, {{0.5, 0}, {1, 1}});
    const auto r3 = oracle::grid_scan_regions(bad, 0.25, 1e-6);
    CHECK_FALSE(r3.monotone);
    CHECK_FALSE(r3.sandwich_checked);
    CHECK_FALSE(r3.notes.empty());
}

TEST_CASE("sigma grid search") {
    const auto two = oracle::brute_expected_payoffs(oracle::two_user_model());
    const auto s = oracle::sigma_grid_search(two, UserSubset::full(2));
    CHECK(s.sigma == doctest::Approx(1.0).epsilon(1e-6));
    const auto eq = oracle::brute_expected_payoffs(oracle::gen_monotone_table(3, 2, true));
    for (const auto& sub : nonempty_subsets(3)) CHECK(oracle::sigma_grid_search(eq, sub).sigma >= 1 - 1e-6);
}
