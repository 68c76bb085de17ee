#pragma once

#include <ldf/lp.hpp>
#include <ldf/model.hpp>
#include <ldf/policy.hpp>
#include <ldf/rng.hpp>

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ldf {

enum class CertificateKind {
    none,
    /// Weights c_d of a convex combination over D(S); see certificate_ranks.
    combination,
    /// gamma >= 0 on the simplex with <gamma, q> > max_d <gamma, p(d)>.
    separating,
    /// Strictly positive alpha satisfying every subset-prefix inequality.
    alpha,
};

std::string_view to_string(CertificateKind kind);

struct RegionVerdict {
    bool member = false;
    /// The LP objective the decision is based on; -infinity when the LP is
    /// infeasible (only possible for R_IB).
    double margin = 0.0;
    CertificateKind kind = CertificateKind::none;
    std::vector<double> certificate;
    /// Decision ranks matching certificate entries when kind == combination.
    std::vector<std::size_t> certificate_ranks;
    std::optional<UserSubset> failing_subset;
    LpPath path = LpPath::floating;
};

/// On the exact path every comparison is made in rationals with zero
/// tolerance; q is converted via its shortest decimal.
struct GeometryOptions {
    Arithmetic arithmetic = Arithmetic::floating;
    double tol = kDefaultTolerance;
    /// Strict-positivity threshold for the R_IB alpha.
    double positivity = 1e-9;
    std::size_t cap = kDefaultGeometryCap;
    /// member_R stops at the first failing subset; its margin then covers
    /// only the subsets examined.
    bool first_failure_only = false;
};

/// Is q^S dominated by a convex combination of {p^S(d) : d in D(S)}?
RegionVerdict member_C(const ExpectedPayoffTable& p, const RequirementVector& q, std::optional<UserSubset> s = {},
                       const GeometryOptions& opt = {});
/// Does q^S dominate a convex combination of {p^S(d) : d in D(S)}?
RegionVerdict member_B(const ExpectedPayoffTable& p, const RequirementVector& q, std::optional<UserSubset> s = {},
                       const GeometryOptions& opt = {});
RegionVerdict member_RIB(const ExpectedPayoffTable& p, const RequirementVector& q, const GeometryOptions& opt = {});
/// In C^S and strictly outside B^S for every nonempty S. The margin is the
/// smallest of the C margins and negated B margins.
RegionVerdict member_R(const ExpectedPayoffTable& p, const RequirementVector& q, const GeometryOptions& opt = {});

struct DualCheckResult {
    std::size_t trials = 0;
    std::size_t violations = 0;
    /// Largest <gamma, q> - max_d <gamma, p(d)> seen.
    double worst_excess = -std::numeric_limits<double>::infinity();
    std::vector<double> worst_gamma;
};

/// Samples gamma uniformly from the simplex and counts those separating q
/// from the convex hull by more than tol.
DualCheckResult dual_check_C(const ExpectedPayoffTable& p, const RequirementVector& q, std::size_t trials,
                             RngStream& rng, double tol = kDefaultTolerance);

/// <gamma, q> - max_d <gamma, p(d)>.
double separation_excess(const ExpectedPayoffTable& p, std::span<const double> q, std::span<const double> gamma);

struct SigmaResult {
    UserSubset subset;
    double sigma = 0.0;
    /// Sums to 1, supported on S.
    std::vector<double> alpha;
    std::optional<Rational> exact_sigma;
    LpPath path = LpPath::floating;
};

/// max over alpha of min_d <alpha, p^S(d)> / max_d <alpha, p^S(d)> on D(S).
SigmaResult subset_payoff_ratio(const ExpectedPayoffTable& p, UserSubset s, const GeometryOptions& opt = {});

struct EfficiencyBound {
    double value = 1.0;
    std::optional<Rational> exact_value;
    UserSubset argmin;
    std::vector<SigmaResult> per_subset;
    /// False when the table is not monotone; the bound is then unproven.
    bool monotone = true;
    std::optional<std::string> warning;
};

EfficiencyBound efficiency_lower_bound(const ExpectedPayoffTable& p, const GeometryOptions& opt = {});

}  // namespace ldf
