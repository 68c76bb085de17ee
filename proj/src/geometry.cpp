#include <ldf/geometry.hpp>

#include <ldf/errors.hpp>

#include <cmath>
#include <limits>

namespace ldf {

std::string_view to_string(CertificateKind kind) {
    switch (kind) {
        case CertificateKind::combination: return "combination";
        case CertificateKind::separating: return "separating";
        case CertificateKind::alpha: return "alpha";
        default: return "none";
    }
}

namespace {

double as_double(double v) { return v; }
double as_double(const Rational& v) { return to_double(v); }

template <class Scalar>
struct Inputs {
    std::size_t n;
    std::span<const Scalar> p;
    std::vector<Scalar> q;
    Scalar tol;

    const Scalar& at(std::size_t rank, std::size_t i) const { return p[rank * n + i]; }
};

Inputs<double> float_inputs(const ExpectedPayoffTable& p, const RequirementVector& q, const GeometryOptions& opt) {
    return {p.users(), p.values(), std::vector<double>(q.values().begin(), q.values().end()), opt.tol};
}

Inputs<Rational> exact_inputs(const ExpectedPayoffTable& p, const RequirementVector& q) {
    return {p.users(), p.exact_values(), q.exact(), Rational(0)};
}

void check_inputs(const ExpectedPayoffTable& p, const RequirementVector& q, const GeometryOptions& opt) {
    if (p.users() > opt.cap) {
        throw CapacityError("geometry on n = " + std::to_string(p.users()) + " users", opt.cap);
    }
    if (q.size() != p.users()) throw DomainError("requirement vector length does not match the payoff table");
}

UserSubset resolve_subset(std::optional<UserSubset> s, std::size_t n) {
    UserSubset out = s.value_or(UserSubset::full(n));
    out.validate(n);
    if (out.empty()) throw DomainError("region test needs a nonempty user subset");
    return out;
}

// max t  s.t.  t + sign * (q_i - sum_d c_d p_i(d)) <= 0 for i in S, sum c = 1.
// sign = +1 tests domination by the hull (C), -1 tests dominating it (B).
template <class Scalar>
RegionVerdict hull_test(const Inputs<Scalar>& in, UserSubset s, int sign) {
    const auto ranks = prefix_decision_ranks(s, in.n);
    const auto members = s.members();
    const std::size_t k = ranks.size();
    BasicLinearProgram<Scalar> lp(k + 1);
    lp.set_free(k);
    lp.set_objective(k, Scalar(1));
    std::vector<std::size_t> user_rows;
    for (auto i : members) {
        std::vector<Scalar> row(k + 1);
        for (std::size_t j = 0; j < k; ++j) row[j] = sign > 0 ? Scalar(-in.at(ranks[j], i)) : in.at(ranks[j], i);
        row[k] = Scalar(1);
        user_rows.push_back(lp.add_constraint(std::move(row), Relation::less_equal, sign > 0 ? Scalar(-in.q[i]) : in.q[i]));
    }
    std::vector<Scalar> norm(k + 1, Scalar(1));
    norm[k] = Scalar(0);
    lp.add_constraint(std::move(norm), Relation::equal, Scalar(1));

    const auto sol = solve(lp);
    if (sol.status != LpStatus::optimal) throw std::logic_error("hull membership LP is always feasible and bounded");
    RegionVerdict v;
    v.path = sol.path;
    v.margin = as_double(sol.value);
    v.member = sol.value >= -in.tol;
    if (v.member) {
        v.kind = CertificateKind::combination;
        for (std::size_t j = 0; j < k; ++j) {
            v.certificate.push_back(as_double(sol.z[j]));
            v.certificate_ranks.push_back(ranks[j]);
        }
    } else {
        v.kind = CertificateKind::separating;
        v.certificate.assign(in.n, 0.0);
        Scalar total(0);
        for (std::size_t a = 0; a < members.size(); ++a) total += sol.duals[user_rows[a]];
        for (std::size_t a = 0; a < members.size(); ++a) {
            Scalar g = sol.duals[user_rows[a]];
            if (total > Scalar(0)) g /= total;
            v.certificate[members[a]] = as_double(g);
        }
        v.failing_subset = s;
    }
    return v;
}

template <class Scalar>
RegionVerdict rib_test(const Inputs<Scalar>& in, const Scalar& positivity) {
    const std::size_t n = in.n;
    BasicLinearProgram<Scalar> lp(n + 1);
    lp.set_free(n);
    lp.set_objective(n, Scalar(1));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Scalar> row(n + 1);
        row[i] = Scalar(-1);
        row[n] = Scalar(1);
        lp.add_constraint(std::move(row), Relation::less_equal, Scalar(0));
    }
    std::vector<Scalar> norm(n + 1, Scalar(1));
    norm[n] = Scalar(0);
    lp.add_constraint(std::move(norm), Relation::equal, Scalar(1));
    for (auto s : nonempty_subsets(n)) {
        const auto members = s.members();
        for (auto r : prefix_decision_ranks(s, n)) {
            std::vector<Scalar> row(n + 1);
            for (auto i : members) row[i] = in.at(r, i) - in.q[i];
            lp.add_constraint(std::move(row), Relation::greater_equal, Scalar(0));
        }
    }
    const auto sol = solve(lp);
    RegionVerdict v;
    v.path = sol.path;
    if (sol.status != LpStatus::optimal) {
        v.member = false;
        v.margin = -std::numeric_limits<double>::infinity();
        return v;
    }
    v.margin = as_double(sol.value);
    v.member = sol.value > positivity;
    v.kind = CertificateKind::alpha;
    for (std::size_t i = 0; i < n; ++i) v.certificate.push_back(as_double(sol.z[i]));
    return v;
}

template <class Scalar>
RegionVerdict r_test(const Inputs<Scalar>& in, bool first_failure_only) {
    RegionVerdict out;
    out.member = true;
    out.margin = std::numeric_limits<double>::infinity();
    for (auto s : nonempty_subsets(in.n)) {
        const auto c = hull_test(in, s, +1);
        const auto b = hull_test(in, s, -1);
        if (c.path == LpPath::exact || b.path == LpPath::exact) out.path = LpPath::exact;
        out.margin = std::min({out.margin, c.margin, -b.margin});
        const bool ok = c.member && !b.member;
        if (!ok && out.member) {
            out.member = false;
            out.failing_subset = s;
            // certificate explains the failure: a separating gamma if q^S left
            // C^S, the dominated combination if q^S entered B^S
            const auto& why = c.member ? b : c;
            out.kind = why.kind;
            out.certificate = why.certificate;
            out.certificate_ranks = why.certificate_ranks;
            if (first_failure_only) break;
        }
    }
    return out;
}

template <class Scalar>
SigmaResult sigma_test(std::size_t n, std::span<const Scalar> p, UserSubset s) {
    const auto members = s.members();
    const auto ranks = prefix_decision_ranks(s, n);
    const std::size_t k = members.size();
    bool all_zero = true;
    for (auto r : ranks) {
        for (auto i : members) {
            if (p[r * n + i] != Scalar(0)) all_zero = false;
        }
    }
    if (all_zero) throw DegenerateError("subset payoff ratio undefined: every projected payoff on " + s.to_string() + " is zero");

    BasicLinearProgram<Scalar> lp(k + 1);
    lp.set_objective(k, Scalar(1));
    for (auto r : ranks) {
        std::vector<Scalar> lower(k + 1), upper(k + 1);
        for (std::size_t a = 0; a < k; ++a) {
            lower[a] = -p[r * n + members[a]];
            upper[a] = p[r * n + members[a]];
        }
        lower[k] = Scalar(1);
        lp.add_constraint(std::move(lower), Relation::less_equal, Scalar(0));
        lp.add_constraint(std::move(upper), Relation::less_equal, Scalar(1));
    }
    const auto sol = solve(lp);
    if (sol.status != LpStatus::optimal) throw std::logic_error("subset payoff ratio LP must have an optimum");
    SigmaResult out;
    out.subset = s;
    out.path = sol.path;
    out.sigma = as_double(sol.value);
    if constexpr (std::is_same_v<Scalar, Rational>) out.exact_sigma = sol.value;
    Scalar total(0);
    for (std::size_t a = 0; a < k; ++a) total += sol.z[a];
    out.alpha.assign(n, 0.0);
    for (std::size_t a = 0; a < k; ++a) out.alpha[members[a]] = as_double(total > Scalar(0) ? Scalar(sol.z[a] / total) : sol.z[a]);
    return out;
}

}  // namespace

RegionVerdict member_C(const ExpectedPayoffTable& p, const RequirementVector& q, std::optional<UserSubset> s,
                       const GeometryOptions& opt) {
    check_inputs(p, q, opt);
    const auto subset = resolve_subset(s, p.users());
    if (opt.arithmetic == Arithmetic::exact) return hull_test(exact_inputs(p, q), subset, +1);
    return hull_test(float_inputs(p, q, opt), subset, +1);
}

RegionVerdict member_B(const ExpectedPayoffTable& p, const RequirementVector& q, std::optional<UserSubset> s,
                       const GeometryOptions& opt) {
    check_inputs(p, q, opt);
    const auto subset = resolve_subset(s, p.users());
    RegionVerdict v = opt.arithmetic == Arithmetic::exact ? hull_test(exact_inputs(p, q), subset, -1)
                                                          : hull_test(float_inputs(p, q, opt), subset, -1);
    // a point outside B has no meaningful gamma from this LP's duals
    if (!v.member) {
        v.kind = CertificateKind::none;
        v.certificate.clear();
    }
    return v;
}

RegionVerdict member_RIB(const ExpectedPayoffTable& p, const RequirementVector& q, const GeometryOptions& opt) {
    check_inputs(p, q, opt);
    if (opt.arithmetic == Arithmetic::exact) return rib_test(exact_inputs(p, q), Rational(0));
    return rib_test(float_inputs(p, q, opt), opt.positivity);
}

RegionVerdict member_R(const ExpectedPayoffTable& p, const RequirementVector& q, const GeometryOptions& opt) {
    check_inputs(p, q, opt);
    if (opt.arithmetic == Arithmetic::exact) return r_test(exact_inputs(p, q), opt.first_failure_only);
    return r_test(float_inputs(p, q, opt), opt.first_failure_only);
}

double separation_excess(const ExpectedPayoffTable& p, std::span<const double> q, std::span<const double> gamma) {
    const std::size_t n = p.users();
    double gq = 0.0;
    for (std::size_t i = 0; i < n; ++i) gq += gamma[i] * q[i];
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < p.decisions(); ++r) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += gamma[i] * p(r, i);
        best = std::max(best, s);
    }
    return gq - best;
}

DualCheckResult dual_check_C(const ExpectedPayoffTable& p, const RequirementVector& q, std::size_t trials,
                             RngStream& rng, double tol) {
    if (trials == 0) throw DomainError("dual check needs at least one trial");
    if (q.size() != p.users()) throw DomainError("requirement vector length does not match the payoff table");
    const std::size_t n = p.users();
    DualCheckResult out;
    out.trials = trials;
    std::vector<double> gamma(n);
    for (std::size_t k = 0; k < trials; ++k) {
        double total = 0.0;
        for (auto& g : gamma) {
            g = -std::log1p(-rng.uniform());
            total += g;
        }
        for (auto& g : gamma) g /= total;
        const double excess = separation_excess(p, q.values(), gamma);
        if (excess > tol) ++out.violations;
        if (excess > out.worst_excess) {
            out.worst_excess = excess;
            out.worst_gamma = gamma;
        }
    }
    return out;
}

SigmaResult subset_payoff_ratio(const ExpectedPayoffTable& p, UserSubset s, const GeometryOptions& opt) {
    if (p.users() > opt.cap) throw CapacityError("geometry on n = " + std::to_string(p.users()) + " users", opt.cap);
    s.validate(p.users());
    if (s.empty()) throw DomainError("subset payoff ratio needs a nonempty subset");
    if (opt.arithmetic == Arithmetic::exact) return sigma_test<Rational>(p.users(), p.exact_values(), s);
    return sigma_test<double>(p.users(), p.values(), s);
}

EfficiencyBound efficiency_lower_bound(const ExpectedPayoffTable& p, const GeometryOptions& opt) {
    EfficiencyBound out;
    out.monotone = check_monotonicity(p, opt.arithmetic, opt.tol).holds;
    if (!out.monotone) {
        out.warning = "payoff table is not monotone; the efficiency bound is only proven under monotonicity";
    }
    bool first = true;
    for (auto s : nonempty_subsets(p.users())) {
        auto r = subset_payoff_ratio(p, s, opt);
        const bool better = first || (r.exact_sigma && out.exact_value ? *r.exact_sigma < *out.exact_value
                                                                        : r.sigma < out.value);
        if (better) {
            out.value = r.sigma;
            out.exact_value = r.exact_sigma;
            out.argmin = s;
            first = false;
        }
        out.per_subset.push_back(std::move(r));
    }
    return out;
}

}  // namespace ldf
