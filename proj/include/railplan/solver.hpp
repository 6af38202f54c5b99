#ifndef RAILPLAN_SOLVER_HPP
#define RAILPLAN_SOLVER_HPP

#include <stdexcept>

#include "railplan/milp.hpp"

namespace railplan {

struct SolveBudget {
    double max_seconds = 60.0;
    long max_nodes = 2'000'000;
    double gap = 1e-9;  // relative
};

/// Branch-and-bound over dual-simplex relaxations.
///
/// Dives depth-first toward the rounded value of the most fractional variable (lowest id on
/// ties) and restarts from the open node with the best bound. A starting assignment on the
/// model becomes the first incumbent; it must pass check_feasibility or ModelError is thrown.
///
/// Status: optimal when the gap closes, feasible when the budget runs out with an incumbent,
/// budget_exceeded without one, infeasible when the tree is exhausted empty-handed.
Solution solve_bb(const MilpModel& m, const SolveBudget& budget = {});

class EnumerationCapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultOracleCap = 24;

/// Exhaustive search over the variable box with row-activity pruning. Ties keep the
/// lexicographically smallest assignment. Throws EnumerationCapError past `cap` variables.
Solution solve_enumeration(const MilpModel& m, int cap = kDefaultOracleCap);

}  // namespace railplan

#endif  // RAILPLAN_SOLVER_HPP
