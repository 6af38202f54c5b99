#ifndef RAILPLAN_LP_HPP
#define RAILPLAN_LP_HPP

#include <utility>
#include <vector>

#include "railplan/milp.hpp"

namespace railplan {

/// min c'x  s.t.  rows (<=, =, >=),  lower <= x <= upper (finite).
struct LpProblem {
    int columns = 0;
    std::vector<std::vector<std::pair<int, double>>> rows;
    std::vector<Sense> senses;
    std::vector<double> rhs;
    std::vector<double> cost;
    std::vector<double> lower;
    std::vector<double> upper;
};

/// The relaxation of `m` with integrality dropped.
LpProblem relaxation_of(const MilpModel& m);

enum class LpStatus { optimal, infeasible, iteration_limit };

/// Dense bounded-variable dual simplex on a full tableau.
///
/// Every row gets a slack; the slack basis with each structural at the bound matching the
/// sign of its cost is dual feasible, and bound changes keep it so. Callers can therefore
/// tighten or relax structural bounds between solves without storing bases.
class DualSimplex {
public:
    explicit DualSimplex(const LpProblem& lp);

    void set_bounds(int column, double lower, double upper);
    double lower(int column) const { return lower_[std::size_t(column)]; }
    double upper(int column) const { return upper_[std::size_t(column)]; }

    LpStatus solve(long max_iterations = 100000);

    double objective() const;
    /// Structural values.
    std::vector<double> primal() const;
    long iterations() const { return iterations_; }

private:
    double& at(int row, int col) { return tableau_[std::size_t(row) * std::size_t(width_) + std::size_t(col)]; }
    double at(int row, int col) const { return tableau_[std::size_t(row) * std::size_t(width_) + std::size_t(col)]; }
    void pivot(int row, int col, double target);
    void refactor();
    void place_nonbasic(int j);

    int m_ = 0;      // rows
    int n_ = 0;      // structurals
    int width_ = 0;  // n + m
    std::vector<double> a_;  // original [A | I], row-major
    std::vector<double> b_;
    std::vector<double> cost_;
    std::vector<double> lower_, upper_;
    std::vector<double> tableau_;
    std::vector<double> value_;
    std::vector<double> reduced_;
    std::vector<int> basis_;     // variable per row
    std::vector<int> position_;  // row per variable, -1 when nonbasic
    long iterations_ = 0;
    long since_refactor_ = 0;
};

}  // namespace railplan

#endif  // RAILPLAN_LP_HPP
