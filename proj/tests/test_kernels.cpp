#include <ldf/kernels.hpp>
#include <ldf/oracle.hpp>

#include <doctest.h>

#include <omp.h>

using namespace ldf;

namespace {

PayoffModel gamma_model() { return SingleResourceModel(10.0, {Gamma{12, 0.5}, Gamma{4, 1}, Gamma{10, 0.1}}); }

struct ThreadCount {
    explicit ThreadCount(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
    ~ThreadCount() { omp_set_num_threads(saved); }
    int saved;
};

bool same_class(const RegionVerdict& a, const RegionVerdict& b) {
    return a.member == b.member && a.margin == b.margin && a.certificate == b.certificate;
}

}  // namespace

TEST_CASE("payoff estimation: serial and parallel agree bitwise") {
    for (const auto& model : {gamma_model(), PayoffModel(oracle::gen_monotone_table(3, 2, false))}) {
        const auto serial = kernels::estimate_payoffs_serial(model, 3 * kernels::kBlockSamples + 123, 9);
        for (int threads : {1, 2, 4}) {
            ThreadCount tc(threads);
            const auto par = kernels::estimate_payoffs_parallel(model, 3 * kernels::kBlockSamples + 123, 9);
            CHECK(par.mean == serial.mean);
            CHECK(par.standard_error == serial.standard_error);
        }
    }
}

TEST_CASE("common random numbers keep estimated tables monotone") {
    const auto p = expected_payoffs(gamma_model(), MonteCarloEstimation{20000, 3});
    CHECK(check_monotonicity(p).holds);
}

TEST_CASE("point classification: serial and parallel agree") {
    const auto table = oracle::brute_expected_payoffs(oracle::gen_monotone_table(3, 7, false));
    std::vector<std::vector<double>> pts;
    RngStream rng(1);
    for (int k = 0; k < 60; ++k) pts.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    const auto serial = kernels::classify_points_serial(table, pts);
    ThreadCount tc(3);
    const auto par = kernels::classify_points_parallel(table, pts);
    REQUIRE(par.size() == serial.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        CHECK(same_class(par[k].c, serial[k].c));
        CHECK(same_class(par[k].rib, serial[k].rib));
        CHECK(same_class(par[k].r, serial[k].r));
        CHECK(serial[k].c.member == member_C(table, RequirementVector(pts[k])).member);
    }
    CHECK_THROWS_AS(kernels::classify_points_parallel(table, {{0.1, 0.2}}), DomainError);
}

TEST_CASE("replications: serial and parallel agree and use distinct streams") {
    const auto model = gamma_model();
    const Policy ldf(WldfSpec{WeightVector::ones(3)}, 3);
    const RequirementVector q({0.8, 0.6, 0.4});
    SimConfig cfg;
    cfg.periods = 2000;
    cfg.mode = DeficitMode::signed_;
    const auto serial = kernels::run_replications_serial(model, ldf, q, cfg, 5);
    ThreadCount tc(4);
    const auto par = kernels::run_replications_parallel(model, ldf, q, cfg, 5);
    REQUIRE(serial.size() == 5);
    REQUIRE(par.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(par[k].p_hat == serial[k].p_hat);
        CHECK(par[k].failures == serial[k].failures);
        CHECK(par[k].p_hat == simulate(model, ldf, q, kernels::replication_config(cfg, k)).p_hat);
    }
    CHECK(serial[0].p_hat != serial[1].p_hat);
    CHECK_THROWS_AS(kernels::run_replications_parallel(model, ldf, RequirementVector({0.1}), cfg, 2), DomainError);
}
