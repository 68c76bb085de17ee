#include <ldf/errors.hpp>
#include <ldf/geometry.hpp>
#include <ldf/oracle.hpp>

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace ldf;

namespace {

const ExpectedPayoffTable& two_user() {
    static const auto p = oracle::brute_expected_payoffs(oracle::two_user_model());
    return p;
}

RequirementVector req(std::vector<double> q) { return RequirementVector(std::move(q)); }

GeometryOptions exact_opts() {
    GeometryOptions g;
    g.arithmetic = Arithmetic::exact;
    return g;
}

// A three-user table whose full-set projections are not coplanar.
ExpectedPayoffTable skew_table() {
    return ExpectedPayoffTable::from_rows(
        3, {{0.9, 0.6, 0.3}, {0.9, 0.2, 0.5}, {0.5, 0.8, 0.3}, {0.2, 0.8, 0.5}, {0.5, 0.2, 0.7}, {0.2, 0.6, 0.7}});
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

TEST_CASE("membership in C") {
    for (const auto& g : {GeometryOptions{}, exact_opts()}) {
        CHECK(member_C(two_user(), req({0.1, 0.5}), {}, g).member);
        CHECK(member_C(two_user(), req({0, 0}), {}, g).member);
        const auto out = member_C(two_user(), req({0.6, 0.5}), {}, g);
        CHECK_FALSE(out.member);
        REQUIRE(out.kind == CertificateKind::separating);
        CHECK(out.certificate[0] == doctest::Approx(out.certificate[1]));
        CHECK(separation_excess(two_user(), std::vector<double>{0.6, 0.5}, out.certificate) > 0);
    }
    const auto in = member_C(two_user(), req({0.1, 0.5}));
    REQUIRE(in.kind == CertificateKind::combination);
    // the combination dominates q
    std::vector<double> mix(2, 0.0);
    for (std::size_t k = 0; k < in.certificate.size(); ++k)
        for (std::size_t i = 0; i < 2; ++i) mix[i] += in.certificate[k] * two_user()(in.certificate_ranks[k], i);
    CHECK(mix[0] >= 0.1 - 1e-9);
    CHECK(mix[1] >= 0.5 - 1e-9);
    CHECK_THROWS_AS(member_C(two_user(), req({0.1, 0.2, 0.3})), DomainError);
}

TEST_CASE("membership in B") {
    for (const auto& g : {GeometryOptions{}, exact_opts()}) {
        CHECK(member_B(two_user(), req({1, 1}), {}, g).member);
        CHECK_FALSE(member_B(two_user(), req({0.2, 0.2}), {}, g).member);
    }
    const auto p = oracle::brute_expected_payoffs(oracle::gen_random_table(3, 12));
    for (std::size_t r = 0; r < p.decisions(); ++r) {
        const auto row = p.row(r);
        CHECK(member_B(p, req({row.begin(), row.end()})).member);
    }
}

TEST_CASE("membership in the inner bound") {
    for (const auto& g : {GeometryOptions{}, exact_opts()}) {
        CHECK(member_RIB(two_user(), req({0.3, 0.5}), g).member);
        CHECK_FALSE(member_RIB(two_user(), req({0.6, 0.5}), g).member);
        CHECK(member_RIB(two_user(), req({0, 0}), g).member);
    }
    const auto v = member_RIB(two_user(), req({0.3, 0.5}));
    REQUIRE(v.kind == CertificateKind::alpha);
    // alpha certificate: strictly positive and satisfies every prefix inequality
    for (double a : v.certificate) CHECK(a > 0);
    for (const auto& s : nonempty_subsets(2))
        for (auto r : prefix_decision_ranks(s, 2)) {
            double lhs = 0;
            for (auto i : s.members()) lhs += v.certificate[i] * (two_user()(r, i) - (i == 0 ? 0.3 : 0.5));
            CHECK(lhs >= -1e-9);
        }
}

TEST_CASE("membership in R") {
    for (const auto& g : {GeometryOptions{}, exact_opts()}) {
        CHECK(member_R(two_user(), req({0.3, 0.5}), g).member);
        CHECK_FALSE(member_R(two_user(), req({0.5, 0.5}), g).member);
        CHECK_FALSE(member_R(two_user(), req({1.0, 0.0}), g).member);
    }
    const auto v = member_R(two_user(), req({0.5, 0.5}));
    REQUIRE(v.failing_subset);
    CHECK(*v.failing_subset == UserSubset{0, 1});
}

TEST_CASE("inner bound lies inside C") {
    RngStream rng(31);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto p = oracle::brute_expected_payoffs(oracle::gen_random_table(3, seed));
        for (int k = 0; k < 60; ++k) {
            std::vector<double> q(3);
            for (auto& x : q) x = rng.uniform() * 0.8;
            const auto rib = member_RIB(p, req(q));
            if (rib.member) CHECK(member_C(p, req(q)).member);
        }
    }
}

TEST_CASE("dual characterization of C") {
    const auto p = oracle::brute_expected_payoffs(oracle::gen_random_table(3, 3));
    RngStream rng(5, Stream::sampling);
    RngStream q_rng(6);
    int inside = 0, outside = 0;
    for (int k = 0; k < 40; ++k) {
        std::vector<double> q(3);
        for (auto& x : q) x = q_rng.uniform();
        const auto c = member_C(p, req(q));
        if (c.member) {
            ++inside;
            CHECK(dual_check_C(p, req(q), 10000, rng).violations == 0);
        } else {
            ++outside;
            CHECK(separation_excess(p, q, c.certificate) > 0);
        }
    }
    CHECK(inside > 0);
    CHECK(outside > 0);

    // boundary point: a convex combination of two rows
    std::vector<double> q(3);
    for (std::size_t i = 0; i < 3; ++i) q[i] = 0.25 * p(0, i) + 0.75 * p(4, i);
    const auto res = dual_check_C(p, req(q), 10000, rng);
    CHECK(res.worst_excess <= 1e-9);
}

TEST_CASE("subset payoff ratio") {
    const auto p = skew_table();
    for (std::size_t i = 0; i < 3; ++i) CHECK(subset_payoff_ratio(p, UserSubset{i}).sigma == doctest::Approx(1.0));

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto q = oracle::brute_expected_payoffs(oracle::gen_monotone_table(2, seed, false));
        CHECK(subset_payoff_ratio(q, UserSubset::full(2)).sigma == doctest::Approx(1.0));
    }

    const auto s = subset_payoff_ratio(p, UserSubset::full(3));
    CHECK(s.sigma < 1.0);
    CHECK(s.sigma > 0.0);
    const auto grid = oracle::sigma_grid_search(p, UserSubset::full(3));
    CHECK(std::abs(s.sigma - grid.sigma) <= 1e-3);

    // recompute min/max with the returned alpha
    double lo = 1e9, hi = -1e9;
    for (std::size_t r = 0; r < 6; ++r) {
        lo = std::min(lo, dot(s.alpha, p.row(r)));
        hi = std::max(hi, dot(s.alpha, p.row(r)));
    }
    CHECK(lo / hi == doctest::Approx(s.sigma).epsilon(1e-7));
    CHECK(std::accumulate(s.alpha.begin(), s.alpha.end(), 0.0) == doctest::Approx(1.0));

    const auto zero = ExpectedPayoffTable::from_rows(2, {{0, 0}, {0, 0}});
    CHECK_THROWS_AS(subset_payoff_ratio(zero, {0}), DegenerateError);
}

TEST_CASE("sigma is one exactly when the hyperplane exists") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto p = oracle::brute_expected_payoffs(oracle::gen_monotone_table(3, seed, seed % 2 == 1));
        const auto eq = check_subset_payoff_equivalence(p);
        for (const auto& s : nonempty_subsets(3)) {
            const double sigma = subset_payoff_ratio(p, s).sigma;
            CHECK(sigma > 0.0);
            CHECK(sigma <= 1.0 + 1e-12);
        }
        const bool all_one = [&] {
            for (const auto& s : nonempty_subsets(3))
                if (subset_payoff_ratio(p, s).sigma < 1 - 1e-9) return false;
            return true;
        }();
        CHECK(all_one == eq.holds);
    }
}

TEST_CASE("efficiency lower bound") {
    GeometryOptions g = exact_opts();
    const auto b = efficiency_lower_bound(two_user(), g);
    REQUIRE(b.exact_value);
    CHECK(*b.exact_value == Rational(1));
    CHECK(b.value == 1.0);
    CHECK(b.monotone);

    const auto eq = oracle::brute_expected_payoffs(oracle::gen_monotone_table(3, 4, true));
    CHECK(efficiency_lower_bound(eq).value == doctest::Approx(1.0).epsilon(1e-9));

    const auto skew = efficiency_lower_bound(skew_table());
    double grid_min = 1.0;
    for (const auto& s : nonempty_subsets(3)) grid_min = std::min(grid_min, oracle::sigma_grid_search(skew_table(), s).sigma);
    CHECK(std::abs(skew.value - grid_min) <= 1e-3);
    CHECK(skew.value < 1.0);
    CHECK(skew.per_subset.size() == 7);

    const auto bad = ExpectedPayoffTable::from_rows(2, {{0.5, 0}, {1, 1}});
    const auto w = efficiency_lower_bound(bad);
    CHECK_FALSE(w.monotone);
    CHECK(w.warning);
}

TEST_CASE("geometry capacity") {
    const ExpectedPayoffTable p(6, std::vector<double>(720 * 6, 0.5));
    CHECK_THROWS_AS(member_C(p, req(std::vector<double>(6, 0.1))), CapacityError);
}
