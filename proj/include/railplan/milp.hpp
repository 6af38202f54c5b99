#ifndef RAILPLAN_MILP_HPP
#define RAILPLAN_MILP_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace railplan {

using VarRef = int;

enum class VarFamily { x, y_so, y_pu, u, z1, z2, w1, w2, other };
enum class Integrality { integer, binary };
enum class Sense { le, eq, ge };

/// Objective terms are tagged with the cost component they belong to.
enum class CostGroup { ownership, deadhead, light_travel, work_event, other };
inline constexpr std::size_t kCostGroups = 5;

const char* to_string(VarFamily family);
const char* to_string(Sense sense);
const char* to_string(CostGroup group);

struct Variable {
    VarRef id = -1;
    std::string name;
    VarFamily family = VarFamily::other;
    std::string subject;
    std::int64_t lower = 0;
    std::int64_t upper = 0;
    Integrality integrality = Integrality::integer;
    std::string bound_tag;  // reported when a value leaves [lower, upper]
};

struct Term {
    VarRef var = -1;
    double coef = 0.0;
};

struct LinearConstraint {
    std::vector<Term> terms;
    Sense sense = Sense::le;
    double rhs = 0.0;
    std::string tag;
};

struct ObjectiveTerm {
    VarRef var = -1;
    double coef = 0.0;
    CostGroup group = CostGroup::other;
};

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A solver-agnostic integer program: min objective + offset subject to linear rows.
class MilpModel {
public:
    VarRef add_variable(std::string name, VarFamily family, std::string subject, std::int64_t lower,
                        std::int64_t upper, Integrality integrality, std::string bound_tag = {});
    /// Merges repeated variables and drops zero coefficients.
    void add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string tag);
    void add_objective(VarRef var, double coef, CostGroup group);
    void add_offset(double value, CostGroup group);

    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<LinearConstraint>& constraints() const { return constraints_; }
    const std::vector<ObjectiveTerm>& objective() const { return objective_; }
    double offset() const;
    const std::array<double, kCostGroups>& offsets() const { return offsets_; }

    const Variable& variable(VarRef v) const { return variables_.at(std::size_t(v)); }
    Variable& mutable_variable(VarRef v) { return variables_.at(std::size_t(v)); }
    std::optional<VarRef> find(const std::string& name) const;
    std::size_t size() const { return variables_.size(); }

    /// Objective coefficient per variable with duplicate terms summed.
    std::vector<double> dense_objective() const;

    /// Starting assignment handed to the solver as an incumbent.
    std::optional<std::vector<std::int64_t>> initial;

private:
    std::vector<Variable> variables_;
    std::vector<LinearConstraint> constraints_;
    std::vector<ObjectiveTerm> objective_;
    std::array<double, kCostGroups> offsets_{};
    std::map<std::string, VarRef> by_name_;
};

/// Same variables, rows, objective and offset (ignores families and cost groups).
bool same_program(const MilpModel& a, const MilpModel& b, double tol = 0.0);

enum class SolveStatus { optimal, feasible, infeasible, budget_exceeded };
const char* to_string(SolveStatus status);

struct CostDecomposition {
    double ownership = 0.0;
    double deadhead = 0.0;
    double light_travel = 0.0;
    double work_event = 0.0;
    double other = 0.0;
    double total() const { return ownership + deadhead + light_travel + work_event + other; }
};

struct Solution {
    SolveStatus status = SolveStatus::infeasible;
    std::vector<std::int64_t> values;  // indexed by VarRef; empty without an incumbent
    double objective = 0.0;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    long node_count = 0;
    double wall_time = 0.0;
    CostDecomposition decomposition;

    bool has_incumbent() const { return !values.empty(); }
};

struct FeasibilityViolation {
    std::string tag;
    double slack = 0.0;  // negative amount by which the row or bound is missed
};

/// Empty iff every bound and row holds. Throws ModelError when `values` is the wrong size.
std::vector<FeasibilityViolation> check_feasibility(const MilpModel& m, const std::vector<std::int64_t>& values,
                                                    double tol = 1e-6);

struct ObjectiveValue {
    double total = 0.0;
    CostDecomposition parts;
};

ObjectiveValue evaluate_objective(const MilpModel& m, const std::vector<std::int64_t>& values);

nlohmann::json solution_to_json(const MilpModel& m, const Solution& s);
/// Reads a solution file against `m`; values are matched by variable name.
Solution solution_from_json(const MilpModel& m, const nlohmann::json& doc);

}  // namespace railplan

#endif  // RAILPLAN_MILP_HPP
