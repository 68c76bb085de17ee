#include <ldf/errors.hpp>
#include <ldf/lp.hpp>
#include <ldf/rational.hpp>
#include <ldf/rng.hpp>

#include <doctest.h>

using namespace ldf;

TEST_CASE("rational parsing") {
    CHECK(parse_rational("1/10") == Rational(1, 10));
    CHECK(parse_rational("0.1") == Rational(1, 10));
    CHECK(parse_rational("-2.5") == Rational(-5, 2));
    CHECK(parse_rational("3") == Rational(3));
    CHECK(parse_rational("0.9") == Rational(9, 10));
    CHECK(parse_rational("0.09") == Rational(9, 100));
    CHECK(parse_rational("010") == Rational(10));
    CHECK(parse_rational("0") == Rational(0));
    CHECK(rational_from_double(0.1) == Rational(1, 10));
    CHECK(rational_from_double(0.809) == Rational(809, 1000));
    CHECK_THROWS_AS(parse_rational("abc"), DomainError);
    CHECK_THROWS_AS(parse_rational("1/0"), DomainError);
    CHECK(to_string(Rational(3, 10)) == "3/10");
}

TEST_CASE("single bounded variable") {
    LinearProgram lp(1);
    lp.set_objective(0, 1.0);
    lp.add_constraint({1.0}, Relation::less_equal, 3.0);
    const auto sol = lp_solve(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.value == doctest::Approx(3.0));
}

TEST_CASE("two variables on a simplex face") {
    LinearProgram lp(2);
    lp.set_objective(0, 1.0);
    lp.set_objective(1, 1.0);
    lp.add_constraint({1.0, 1.0}, Relation::less_equal, 1.0);
    const auto sol = lp_solve(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.value == doctest::Approx(1.0));
    CHECK(max_violation(lp, sol.z) <= 1e-8);
    CHECK(sol.duals[0] == doctest::Approx(1.0));
}

TEST_CASE("infeasible and unbounded") {
    LinearProgram bad(1);
    bad.set_objective(0, 1.0);
    bad.add_constraint({1.0}, Relation::less_equal, -1.0);
    CHECK(lp_solve(bad).status == LpStatus::infeasible);

    LinearProgram open(2);
    open.set_objective(0, 1.0);
    open.add_constraint({1.0, -1.0}, Relation::less_equal, 1.0);
    CHECK(lp_solve(open).status == LpStatus::unbounded);
}

TEST_CASE("free variables and equality rows") {
    // max t s.t. t <= x, t <= 1 - x (x free in [0,1] by the sum row)
    LinearProgram lp(3);
    lp.set_free(0);
    lp.set_objective(0, 1.0);
    lp.add_constraint({1.0, -1.0, 0.0}, Relation::less_equal, 0.0);
    lp.add_constraint({1.0, 0.0, -1.0}, Relation::less_equal, 0.0);
    lp.add_constraint({0.0, 1.0, 1.0}, Relation::equal, 1.0);
    const auto sol = lp_solve(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.value == doctest::Approx(0.5));

    LinearProgram neg(1);
    neg.set_free(0);
    neg.set_objective(0, -1.0);
    neg.add_constraint({1.0}, Relation::greater_equal, -2.0);
    const auto s2 = lp_solve(neg);
    REQUIRE(s2.status == LpStatus::optimal);
    CHECK(s2.z[0] == doctest::Approx(-2.0));
}

TEST_CASE("exact path agrees with the float path") {
    ExactLinearProgram lp(2);
    lp.set_objective(0, Rational(3));
    lp.set_objective(1, Rational(2));
    lp.add_constraint({Rational(1), Rational(1)}, Relation::less_equal, Rational(4));
    lp.add_constraint({Rational(1), Rational(3)}, Relation::less_equal, Rational(6));
    lp.add_constraint({Rational(1), Rational(0)}, Relation::less_equal, Rational(7, 2));
    const auto sol = lp_solve_exact(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.value == Rational(23, 2));
    CHECK(sol.path == LpPath::exact);

    LinearProgram f(2);
    f.set_objective(0, 3);
    f.set_objective(1, 2);
    f.add_constraint({1, 1}, Relation::less_equal, 4);
    f.add_constraint({1, 3}, Relation::less_equal, 6);
    f.add_constraint({1, 0}, Relation::less_equal, 3.5);
    CHECK(lp_solve(f).value == doctest::Approx(11.5));
}

TEST_CASE("random LPs: weak duality and feasibility of the reported optimum") {
    RngStream rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t nv = 2 + trial % 4, nr = 2 + trial % 5;
        LinearProgram lp(nv);
        for (std::size_t j = 0; j < nv; ++j) lp.set_objective(j, rng.uniform());
        std::vector<double> rhs;
        std::vector<std::vector<double>> a;
        for (std::size_t r = 0; r < nr; ++r) {
            std::vector<double> row(nv);
            for (auto& x : row) x = 0.1 + rng.uniform();
            rhs.push_back(0.5 + rng.uniform());
            a.push_back(row);
            lp.add_constraint(row, Relation::less_equal, rhs.back());
        }
        const auto sol = lp_solve(lp);
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(max_violation(lp, sol.z) <= 1e-8);
        // duals are dual feasible and close the gap
        double dual_value = 0.0;
        for (std::size_t r = 0; r < nr; ++r) {
            CHECK(sol.duals[r] >= -1e-9);
            dual_value += sol.duals[r] * rhs[r];
        }
        CHECK(dual_value == doctest::Approx(sol.value).epsilon(1e-7));
        for (std::size_t j = 0; j < nv; ++j) {
            double reduced = 0.0;
            for (std::size_t r = 0; r < nr; ++r) reduced += sol.duals[r] * a[r][j];
            CHECK(reduced >= lp.objective()[j] - 1e-8);
        }
    }
}

TEST_CASE("rng streams are addressable") {
    RngStream a(5, Stream::workloads, {3}), b(5, Stream::workloads, {3}), c(5, Stream::workloads, {4});
    const auto x = a(), y = b(), z = c();
    CHECK(x == y);
    CHECK(x != z);
    CHECK(derive_seed(1, {2}) != derive_seed(2, {1}));
}
