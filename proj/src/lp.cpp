#include <ldf/lp.hpp>

#include <ldf/errors.hpp>

#include <algorithm>
#include <cmath>
#include <optional>

namespace ldf {

std::string_view to_string(LpStatus status) {
    switch (status) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
    }
    return "unknown";
}

std::string_view to_string(LpPath path) {
    return path == LpPath::exact ? "exact" : "floating";
}

template <class Scalar>
std::size_t BasicLinearProgram<Scalar>::add_constraint(std::vector<Scalar> coefficients, Relation relation,
                                                       Scalar rhs) {
    if (coefficients.size() != objective_.size()) {
        throw DomainError("constraint has " + std::to_string(coefficients.size()) + " coefficients, expected " +
                          std::to_string(objective_.size()));
    }
    rows_.push_back({std::move(coefficients), relation, std::move(rhs)});
    return rows_.size() - 1;
}

template class BasicLinearProgram<double>;
template class BasicLinearProgram<Rational>;

namespace {

template <class Scalar>
struct Tolerance;

template <>
struct Tolerance<double> {
    static constexpr bool exact = false;
    static bool positive(double v) { return v > 1e-9; }
    static bool negative(double v) { return v < -1e-9; }
    static bool nonzero(double v) { return std::abs(v) > 1e-9; }
    static void clean(double& v) {
        if (std::abs(v) < 1e-12) v = 0.0;
    }
    static bool ratio_less(double a, double b) { return a < b - 1e-12 * (1.0 + std::abs(b)); }
    static bool ratio_equal(double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)); }
};

template <>
struct Tolerance<Rational> {
    static constexpr bool exact = true;
    static bool positive(const Rational& v) { return v > 0; }
    static bool negative(const Rational& v) { return v < 0; }
    static bool nonzero(const Rational& v) { return v != 0; }
    static void clean(Rational&) {}
    static bool ratio_less(const Rational& a, const Rational& b) { return a < b; }
    static bool ratio_equal(const Rational& a, const Rational& b) { return a == b; }
};

/// Dense tableau over standard-form columns:
///   [structural | negated parts of free vars | slack/surplus | artificial]
template <class Scalar>
class Tableau {
    using Tol = Tolerance<Scalar>;

public:
    explicit Tableau(const BasicLinearProgram<Scalar>& lp) : lp_(lp) {
        const std::size_t nv = lp.num_variables();
        column_of_negative_.assign(nv, npos);
        std::size_t next = nv;
        for (std::size_t j = 0; j < nv; ++j) {
            if (lp.is_free(j)) column_of_negative_[j] = next++;
        }
        structural_ = next;

        const auto& rows = lp.constraints();
        m_ = rows.size();
        flipped_.assign(m_, false);
        relation_.resize(m_);
        for (std::size_t r = 0; r < m_; ++r) {
            Relation rel = rows[r].relation;
            if (rows[r].rhs < 0) {
                flipped_[r] = true;
                if (rel == Relation::less_equal) rel = Relation::greater_equal;
                else if (rel == Relation::greater_equal) rel = Relation::less_equal;
            }
            relation_[r] = rel;
        }

        slack_column_.assign(m_, npos);
        artificial_column_.assign(m_, npos);
        std::size_t col = structural_;
        for (std::size_t r = 0; r < m_; ++r) {
            if (relation_[r] != Relation::equal) slack_column_[r] = col++;
        }
        first_artificial_ = col;
        for (std::size_t r = 0; r < m_; ++r) {
            if (relation_[r] != Relation::less_equal) artificial_column_[r] = col++;
        }
        cols_ = col;
        width_ = cols_ + 1;

        t_.assign(m_ * width_, Scalar(0));
        basis_.resize(m_);
        for (std::size_t r = 0; r < m_; ++r) {
            const Scalar sign = flipped_[r] ? Scalar(-1) : Scalar(1);
            const auto& a = rows[r].coefficients;
            for (std::size_t j = 0; j < nv; ++j) {
                if (a[j] == 0) continue;
                at(r, j) = sign * a[j];
                if (column_of_negative_[j] != npos) at(r, column_of_negative_[j]) = -(sign * a[j]);
            }
            rhs(r) = sign * rows[r].rhs;
            if (slack_column_[r] != npos) {
                at(r, slack_column_[r]) = relation_[r] == Relation::less_equal ? Scalar(1) : Scalar(-1);
            }
            if (artificial_column_[r] != npos) {
                at(r, artificial_column_[r]) = Scalar(1);
                basis_[r] = artificial_column_[r];
            } else {
                basis_[r] = slack_column_[r];
            }
        }
        obj_.assign(width_, Scalar(0));
    }

    /// Returns nullopt on iteration-cap stall (floating path only).
    std::optional<BasicLpSolution<Scalar>> run(std::size_t iteration_cap) {
        BasicLpSolution<Scalar> out;
        out.path = Tol::exact ? LpPath::exact : LpPath::floating;

        if (first_artificial_ < cols_) {
            std::vector<Scalar> cost(cols_, Scalar(0));
            for (std::size_t j = first_artificial_; j < cols_; ++j) cost[j] = Scalar(-1);
            price(cost);
            auto status = iterate(cols_, iteration_cap, out.iterations);
            if (!status) return std::nullopt;
            const Scalar phase_one = obj_[cols_];
            const bool infeasible = Tol::exact ? phase_one < 0 : phase_one < -1e-9;
            if (infeasible) {
                out.status = LpStatus::infeasible;
                return out;
            }
            drive_out_artificials();
        }

        std::vector<Scalar> cost(cols_, Scalar(0));
        const auto& c = lp_.objective();
        for (std::size_t j = 0; j < lp_.num_variables(); ++j) {
            cost[j] = c[j];
            if (column_of_negative_[j] != npos) cost[column_of_negative_[j]] = -c[j];
        }
        price(cost);
        auto status = iterate(first_artificial_, iteration_cap, out.iterations);
        if (!status) return std::nullopt;
        if (*status == LpStatus::unbounded) {
            out.status = LpStatus::unbounded;
            return out;
        }

        out.status = LpStatus::optimal;
        std::vector<Scalar> column_value(cols_, Scalar(0));
        for (std::size_t r = 0; r < m_; ++r) column_value[basis_[r]] = rhs(r);
        const std::size_t nv = lp_.num_variables();
        out.z.assign(nv, Scalar(0));
        for (std::size_t j = 0; j < nv; ++j) {
            out.z[j] = column_value[j];
            if (column_of_negative_[j] != npos) out.z[j] -= column_value[column_of_negative_[j]];
        }
        out.value = Scalar(0);
        for (std::size_t j = 0; j < nv; ++j) out.value += c[j] * out.z[j];

        out.duals.assign(m_, Scalar(0));
        out.slacks.assign(m_, Scalar(0));
        const auto& rows = lp_.constraints();
        for (std::size_t r = 0; r < m_; ++r) {
            const std::size_t unit = artificial_column_[r] != npos ? artificial_column_[r] : slack_column_[r];
            // reduced cost of the initial identity column is (c_B B^-1)_r
            Scalar y = obj_[unit];
            out.duals[r] = flipped_[r] ? Scalar(-y) : y;
            Scalar lhs(0);
            for (std::size_t j = 0; j < nv; ++j) lhs += rows[r].coefficients[j] * out.z[j];
            out.slacks[r] = rows[r].rhs - lhs;
        }
        return out;
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    Scalar& at(std::size_t r, std::size_t j) { return t_[r * width_ + j]; }
    Scalar& rhs(std::size_t r) { return t_[r * width_ + cols_]; }

    void price(const std::vector<Scalar>& cost) {
        for (std::size_t j = 0; j <= cols_; ++j) obj_[j] = j < cols_ ? Scalar(-cost[j]) : Scalar(0);
        for (std::size_t r = 0; r < m_; ++r) {
            const Scalar& cb = cost[basis_[r]];
            if (cb == 0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) {
                const Scalar& v = t_[r * width_ + j];
                if (v != 0) obj_[j] += cb * v;
            }
        }
        for (auto& v : obj_) Tol::clean(v);
    }

    std::optional<LpStatus> iterate(std::size_t allowed_columns, std::size_t cap, std::size_t& iterations) {
        for (;;) {
            std::size_t entering = npos;
            for (std::size_t j = 0; j < allowed_columns; ++j) {
                if (Tol::negative(obj_[j])) {
                    entering = j;
                    break;
                }
            }
            if (entering == npos) return LpStatus::optimal;

            std::size_t leaving = npos;
            Scalar best_ratio{};
            for (std::size_t r = 0; r < m_; ++r) {
                const Scalar& a = at(r, entering);
                if (!Tol::positive(a)) continue;
                Scalar ratio = rhs(r) / a;
                if (leaving == npos || Tol::ratio_less(ratio, best_ratio) ||
                    (Tol::ratio_equal(ratio, best_ratio) && basis_[r] < basis_[leaving])) {
                    leaving = r;
                    best_ratio = std::move(ratio);
                }
            }
            if (leaving == npos) return LpStatus::unbounded;
            pivot(leaving, entering);
            if (++iterations > cap) return std::nullopt;
        }
    }

    void pivot(std::size_t pr, std::size_t pc) {
        const Scalar inv = Scalar(1) / at(pr, pc);
        Scalar* prow = &t_[pr * width_];
        for (std::size_t j = 0; j <= cols_; ++j) {
            if (prow[j] != 0) prow[j] *= inv;
        }
        prow[pc] = Scalar(1);
        for (std::size_t r = 0; r < m_; ++r) {
            if (r == pr) continue;
            Scalar* row = &t_[r * width_];
            if (row[pc] == 0) continue;
            const Scalar factor = row[pc];
            for (std::size_t j = 0; j <= cols_; ++j) {
                if (prow[j] != 0) {
                    row[j] -= factor * prow[j];
                    Tol::clean(row[j]);
                }
            }
            row[pc] = Scalar(0);
        }
        if (obj_[pc] != 0) {
            const Scalar factor = obj_[pc];
            for (std::size_t j = 0; j <= cols_; ++j) {
                if (prow[j] != 0) {
                    obj_[j] -= factor * prow[j];
                    Tol::clean(obj_[j]);
                }
            }
            obj_[pc] = Scalar(0);
        }
        basis_[pr] = pc;
    }

    void drive_out_artificials() {
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < first_artificial_) continue;
            for (std::size_t j = 0; j < first_artificial_; ++j) {
                if (Tol::nonzero(at(r, j))) {
                    pivot(r, j);
                    break;
                }
            }
            // otherwise the row is redundant; its artificial stays basic at zero
        }
    }

    const BasicLinearProgram<Scalar>& lp_;
    std::vector<std::size_t> column_of_negative_;
    std::vector<bool> flipped_;
    std::vector<Relation> relation_;
    std::vector<std::size_t> slack_column_;
    std::vector<std::size_t> artificial_column_;
    std::vector<std::size_t> basis_;
    std::vector<Scalar> t_;
    std::vector<Scalar> obj_;
    std::size_t structural_ = 0;
    std::size_t first_artificial_ = 0;
    std::size_t cols_ = 0;
    std::size_t width_ = 0;
    std::size_t m_ = 0;
};

template <class Scalar>
void check_finite(const BasicLinearProgram<Scalar>& lp) {
    if constexpr (std::is_same_v<Scalar, double>) {
        for (double c : lp.objective()) {
            if (!std::isfinite(c)) throw DomainError("non-finite objective coefficient");
        }
        for (const auto& row : lp.constraints()) {
            if (!std::isfinite(row.rhs)) throw DomainError("non-finite right-hand side");
            for (double a : row.coefficients) {
                if (!std::isfinite(a)) throw DomainError("non-finite constraint coefficient");
            }
        }
    }
}

ExactLinearProgram to_exact(const LinearProgram& lp) {
    ExactLinearProgram exact(lp.num_variables());
    for (std::size_t j = 0; j < lp.num_variables(); ++j) {
        exact.set_objective(j, Rational(lp.objective()[j]));
        if (lp.is_free(j)) exact.set_free(j);
    }
    for (const auto& row : lp.constraints()) {
        std::vector<Rational> a;
        a.reserve(row.coefficients.size());
        for (double v : row.coefficients) a.emplace_back(v);
        exact.add_constraint(std::move(a), row.relation, Rational(row.rhs));
    }
    return exact;
}

LpSolution to_floating(const ExactLpSolution& s) {
    LpSolution out;
    out.status = s.status;
    out.path = LpPath::exact;
    out.iterations = s.iterations;
    out.value = to_double(s.value);
    for (const auto& v : s.z) out.z.push_back(to_double(v));
    for (const auto& v : s.duals) out.duals.push_back(to_double(v));
    for (const auto& v : s.slacks) out.slacks.push_back(to_double(v));
    return out;
}

}  // namespace

double max_violation(const LinearProgram& lp, const std::vector<double>& z) {
    double worst = 0.0;
    for (std::size_t j = 0; j < lp.num_variables(); ++j) {
        if (!lp.is_free(j)) worst = std::max(worst, -z[j]);
    }
    for (const auto& row : lp.constraints()) {
        double lhs = 0.0;
        double scale = 1.0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            lhs += row.coefficients[j] * z[j];
            scale = std::max(scale, std::abs(row.coefficients[j] * z[j]));
        }
        double gap = 0.0;
        switch (row.relation) {
            case Relation::less_equal: gap = lhs - row.rhs; break;
            case Relation::greater_equal: gap = row.rhs - lhs; break;
            case Relation::equal: gap = std::abs(lhs - row.rhs); break;
        }
        worst = std::max(worst, gap / scale);
    }
    return worst;
}

LpSolution lp_solve(const LinearProgram& lp) {
    check_finite(lp);
    const std::size_t cap = 50 * (lp.num_constraints() + lp.num_variables()) + 1000;
    Tableau<double> tableau(lp);
    if (auto solution = tableau.run(cap)) {
        if (solution->status != LpStatus::optimal || max_violation(lp, solution->z) <= 1e-8) {
            return *solution;
        }
    }
    return to_floating(lp_solve_exact(to_exact(lp)));
}

ExactLpSolution lp_solve_exact(const ExactLinearProgram& lp) {
    Tableau<Rational> tableau(lp);
    return *tableau.run(static_cast<std::size_t>(-1));
}

}  // namespace ldf
