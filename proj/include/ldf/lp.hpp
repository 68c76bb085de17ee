#pragma once

#include <ldf/rational.hpp>

#include <cstddef>
#include <string_view>
#include <vector>

namespace ldf {

enum class Relation { less_equal, equal, greater_equal };
enum class LpStatus { optimal, infeasible, unbounded };
/// Which arithmetic produced an answer.
enum class LpPath { floating, exact };

std::string_view to_string(LpStatus status);
std::string_view to_string(LpPath path);

template <class Scalar>
struct BasicConstraint {
    std::vector<Scalar> coefficients;
    Relation relation = Relation::less_equal;
    Scalar rhs{};
};

/// maximize objective . z  subject to rows, z >= 0 except variables marked free.
template <class Scalar>
class BasicLinearProgram {
public:
    explicit BasicLinearProgram(std::size_t num_variables)
        : objective_(num_variables, Scalar(0)), free_(num_variables, false) {}

    std::size_t num_variables() const { return objective_.size(); }
    std::size_t num_constraints() const { return rows_.size(); }

    void set_objective(std::size_t var, Scalar coefficient) { objective_.at(var) = std::move(coefficient); }
    void set_free(std::size_t var) { free_.at(var) = true; }
    bool is_free(std::size_t var) const { return free_.at(var); }

    /// Appends a row; returns its index (the index of its dual value).
    std::size_t add_constraint(std::vector<Scalar> coefficients, Relation relation, Scalar rhs);

    const std::vector<Scalar>& objective() const { return objective_; }
    const std::vector<BasicConstraint<Scalar>>& constraints() const { return rows_; }

private:
    std::vector<Scalar> objective_;
    std::vector<bool> free_;
    std::vector<BasicConstraint<Scalar>> rows_;
};

template <class Scalar>
struct BasicLpSolution {
    LpStatus status = LpStatus::infeasible;
    LpPath path = LpPath::floating;
    std::vector<Scalar> z;
    Scalar value{};
    /// One multiplier per row from the optimal basis (c_B B^-1), in the
    /// orientation the row was given: >= 0 for <= rows, <= 0 for >= rows.
    std::vector<Scalar> duals;
    /// rhs - a.z per row.
    std::vector<Scalar> slacks;
    std::size_t iterations = 0;
};

using LinearProgram = BasicLinearProgram<double>;
using ExactLinearProgram = BasicLinearProgram<Rational>;
using LpSolution = BasicLpSolution<double>;
using ExactLpSolution = BasicLpSolution<Rational>;

/// Dense two-phase simplex with Bland's rule. Floating path uses a 1e-9 pivot
/// tolerance; if it stalls or its optimum fails the 1e-8 feasibility re-check,
/// the problem is re-solved exactly and `path` reports that.
LpSolution lp_solve(const LinearProgram& lp);

/// Exact rational simplex; never stalls.
ExactLpSolution lp_solve_exact(const ExactLinearProgram& lp);

/// Overload set so templated callers can pick the path by scalar type.
inline LpSolution solve(const LinearProgram& lp) { return lp_solve(lp); }
inline ExactLpSolution solve(const ExactLinearProgram& lp) { return lp_solve_exact(lp); }

/// Largest violation of any row or sign bound by `z` (0 when feasible).
double max_violation(const LinearProgram& lp, const std::vector<double>& z);

}  // namespace ldf
