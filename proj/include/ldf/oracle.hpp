#pragma once

// Independent reference computations used to cross-check the library.

#include <ldf/geometry.hpp>
#include <ldf/model.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ldf::oracle {

/// Exact p(d) by summing every atom in rational arithmetic.
ExpectedPayoffTable brute_expected_payoffs(const TablePayoffModel& model);

/// Two users; the high-priority user always earns 1 and the other 0.
TablePayoffModel two_user_model();

/// 0/1 payoffs, independent Bernoulli(p_i(d)) per user.
TablePayoffModel bernoulli_table(std::size_t n, const std::vector<std::vector<Rational>>& p);

/// Random table whose expected payoffs are nonincreasing in the set of
/// higher-priority users. With enforce_equivalence the payoffs are scaled
/// marginal gains of a random submodular function, which also makes every
/// subset's projections coplanar.
TablePayoffModel gen_monotone_table(std::size_t n, std::uint64_t seed, bool enforce_equivalence);

/// Independent uniform entries in {1/20, ..., 20/20}; usually not monotone.
TablePayoffModel gen_random_table(std::size_t n, std::uint64_t seed);

/// Lowest rank whose <x, p(d)> is within tol of the maximum, by a plain
/// scan over permutations.
std::size_t mw_argmax(std::span<const double> x, const ExpectedPayoffTable& p, double tol = kDefaultTolerance);

struct SigmaSearch {
    double sigma = 0.0;
    std::vector<double> alpha;
};

/// Grid search of the alpha-simplex on S (step 1e-3 where affordable),
/// followed by local refinement around the best point.
SigmaSearch sigma_grid_search(const ExpectedPayoffTable& p, UserSubset s, double step = 1e-3);

struct TwoUserTrace {
    /// Deficits after each period, exact.
    std::vector<std::array<Rational, 2>> truncated;
    std::vector<std::array<Rational, 2>> signed_;
    std::array<Rational, 2> p_hat_truncated;
    std::array<Rational, 2> p_hat_signed;
};

/// Exact replay of LDF on the two-user example with q = (1/10, 1/2).
TwoUserTrace replay_two_user(std::size_t periods);

struct ScanPoint {
    std::vector<double> q;
    bool in_c = false;
    bool in_rib = false;
    bool in_r = false;
    double margin_c = 0.0;
    double margin_rib = 0.0;
    double margin_r = 0.0;
};

struct ScanViolation {
    std::vector<double> q;
    /// "int(R) not in R_IB", "R_IB not in cl(R)" or "int(C) not in R_IB".
    std::string kind;
};

struct ScanReport {
    std::vector<ScanPoint> points;
    bool monotone = false;
    bool equivalent = false;
    /// The sandwich assertions only apply to monotone tables.
    bool sandwich_checked = false;
    bool equivalence_checked = false;
    std::size_t sandwich_violations = 0;
    std::size_t equivalence_violations = 0;
    std::vector<ScanViolation> violations;
    std::vector<std::string> notes;
};

/// Classifies every grid point of [0, max_{d,i} p_i(d)]^n at the given
/// step and counts violations of the region inclusions the table's
/// properties promise.
ScanReport grid_scan_regions(const ExpectedPayoffTable& p, double resolution, double epsilon);

}  // namespace ldf::oracle
