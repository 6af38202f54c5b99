#include "railplan/milp.hpp"

#include <algorithm>
#include <cmath>

namespace railplan {

const char* to_string(VarFamily family) {
    switch (family) {
        case VarFamily::x: return "x";
        case VarFamily::y_so: return "y_so";
        case VarFamily::y_pu: return "y_pu";
        case VarFamily::u: return "u";
        case VarFamily::z1: return "z1";
        case VarFamily::z2: return "z2";
        case VarFamily::w1: return "w1";
        case VarFamily::w2: return "w2";
        case VarFamily::other: return "other";
    }
    return "?";
}

const char* to_string(Sense sense) {
    switch (sense) {
        case Sense::le: return "<=";
        case Sense::eq: return "=";
        case Sense::ge: return ">=";
    }
    return "?";
}

const char* to_string(CostGroup group) {
    switch (group) {
        case CostGroup::ownership: return "ownership";
        case CostGroup::deadhead: return "deadhead";
        case CostGroup::light_travel: return "light_travel";
        case CostGroup::work_event: return "work_event";
        case CostGroup::other: return "other";
    }
    return "?";
}

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::feasible: return "feasible";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::budget_exceeded: return "budget_exceeded";
    }
    return "?";
}

VarRef MilpModel::add_variable(std::string name, VarFamily family, std::string subject, std::int64_t lower,
                               std::int64_t upper, Integrality integrality, std::string bound_tag) {
    if (by_name_.count(name)) throw ModelError("duplicate variable name '" + name + "'");
    Variable v;
    v.id = VarRef(variables_.size());
    v.name = std::move(name);
    v.family = family;
    v.subject = std::move(subject);
    v.lower = lower;
    v.upper = upper;
    v.integrality = integrality;
    v.bound_tag = bound_tag.empty() ? "bound:" + v.name : std::move(bound_tag);
    by_name_[v.name] = v.id;
    variables_.push_back(std::move(v));
    return variables_.back().id;
}

void MilpModel::add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string tag) {
    std::map<VarRef, double> merged;
    for (const auto& t : terms) {
        if (t.var < 0 || std::size_t(t.var) >= variables_.size()) {
            throw ModelError("constraint '" + tag + "' references an undeclared variable");
        }
        merged[t.var] += t.coef;
    }
    LinearConstraint c;
    for (const auto& [var, coef] : merged) {
        if (coef != 0.0) c.terms.push_back({var, coef});
    }
    c.sense = sense;
    c.rhs = rhs;
    c.tag = std::move(tag);
    constraints_.push_back(std::move(c));
}

void MilpModel::add_objective(VarRef var, double coef, CostGroup group) {
    if (var < 0 || std::size_t(var) >= variables_.size()) throw ModelError("objective references an undeclared variable");
    if (coef != 0.0) objective_.push_back({var, coef, group});
}

void MilpModel::add_offset(double value, CostGroup group) { offsets_[std::size_t(group)] += value; }

double MilpModel::offset() const {
    double total = 0.0;
    for (double v : offsets_) total += v;
    return total;
}

std::optional<VarRef> MilpModel::find(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

std::vector<double> MilpModel::dense_objective() const {
    std::vector<double> c(variables_.size(), 0.0);
    for (const auto& t : objective_) c[std::size_t(t.var)] += t.coef;
    return c;
}

bool same_program(const MilpModel& a, const MilpModel& b, double tol) {
    auto close = [tol](double x, double y) { return std::abs(x - y) <= tol; };
    if (a.size() != b.size() || a.constraints().size() != b.constraints().size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& va = a.variables()[i];
        const auto& vb = b.variables()[i];
        if (va.name != vb.name || va.lower != vb.lower || va.upper != vb.upper || va.integrality != vb.integrality) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.constraints().size(); ++i) {
        const auto& ca = a.constraints()[i];
        const auto& cb = b.constraints()[i];
        if (ca.tag != cb.tag || ca.sense != cb.sense || !close(ca.rhs, cb.rhs) || ca.terms.size() != cb.terms.size()) {
            return false;
        }
        for (std::size_t t = 0; t < ca.terms.size(); ++t) {
            if (ca.terms[t].var != cb.terms[t].var || !close(ca.terms[t].coef, cb.terms[t].coef)) return false;
        }
    }
    auto oa = a.dense_objective();
    auto ob = b.dense_objective();
    for (std::size_t i = 0; i < oa.size(); ++i) {
        if (!close(oa[i], ob[i])) return false;
    }
    return close(a.offset(), b.offset());
}

std::vector<FeasibilityViolation> check_feasibility(const MilpModel& m, const std::vector<std::int64_t>& values,
                                                    double tol) {
    if (values.size() != m.size()) {
        throw ModelError("assignment covers " + std::to_string(values.size()) + " of " + std::to_string(m.size()) +
                         " variables");
    }
    std::vector<FeasibilityViolation> out;
    for (const auto& v : m.variables()) {
        auto x = values[std::size_t(v.id)];
        if (x < v.lower) out.push_back({v.bound_tag, double(x - v.lower)});
        else if (x > v.upper) out.push_back({v.bound_tag, double(v.upper - x)});
    }
    for (const auto& c : m.constraints()) {
        double lhs = 0.0;
        for (const auto& t : c.terms) lhs += t.coef * double(values[std::size_t(t.var)]);
        double slack = 0.0;
        switch (c.sense) {
            case Sense::le: slack = c.rhs - lhs; break;
            case Sense::ge: slack = lhs - c.rhs; break;
            case Sense::eq: slack = -std::abs(lhs - c.rhs); break;
        }
        if (slack < -tol) out.push_back({c.tag, slack});
    }
    return out;
}

ObjectiveValue evaluate_objective(const MilpModel& m, const std::vector<std::int64_t>& values) {
    if (values.size() != m.size()) {
        throw ModelError("assignment covers " + std::to_string(values.size()) + " of " + std::to_string(m.size()) +
                         " variables");
    }
    std::array<double, kCostGroups> parts = m.offsets();
    for (const auto& t : m.objective()) parts[std::size_t(t.group)] += t.coef * double(values[std::size_t(t.var)]);
    ObjectiveValue out;
    out.parts.ownership = parts[std::size_t(CostGroup::ownership)];
    out.parts.deadhead = parts[std::size_t(CostGroup::deadhead)];
    out.parts.light_travel = parts[std::size_t(CostGroup::light_travel)];
    out.parts.work_event = parts[std::size_t(CostGroup::work_event)];
    out.parts.other = parts[std::size_t(CostGroup::other)];
    out.total = out.parts.total();
    return out;
}

nlohmann::json solution_to_json(const MilpModel& m, const Solution& s) {
    nlohmann::json values = nlohmann::json::object();
    for (std::size_t i = 0; i < s.values.size() && i < m.size(); ++i) values[m.variables()[i].name] = s.values[i];
    const auto& d = s.decomposition;
    return {{"status", to_string(s.status)},
            {"objective", s.objective},
            {"bounds", {{"lower", s.lower_bound}, {"upper", s.upper_bound}}},
            {"nodes", s.node_count},
            {"wall_time", s.wall_time},
            {"decomposition",
             {{"ownership", d.ownership},
              {"deadhead", d.deadhead},
              {"light_travel", d.light_travel},
              {"work_event", d.work_event},
              {"other", d.other}}},
            {"values", values}};
}

Solution solution_from_json(const MilpModel& m, const nlohmann::json& doc) {
    Solution s;
    const std::string status = doc.at("status").get<std::string>();
    if (status == "optimal") s.status = SolveStatus::optimal;
    else if (status == "feasible") s.status = SolveStatus::feasible;
    else if (status == "infeasible") s.status = SolveStatus::infeasible;
    else if (status == "budget_exceeded") s.status = SolveStatus::budget_exceeded;
    else throw ModelError("unknown solution status '" + status + "'");
    s.objective = doc.value("objective", 0.0);
    if (doc.contains("bounds")) {
        s.lower_bound = doc["bounds"].value("lower", 0.0);
        s.upper_bound = doc["bounds"].value("upper", 0.0);
    }
    s.node_count = doc.value("nodes", 0L);
    s.wall_time = doc.value("wall_time", 0.0);
    const auto& values = doc.at("values");
    if (!values.empty()) {
        s.values.assign(m.size(), 0);
        for (const auto& v : m.variables()) {
            auto it = values.find(v.name);
            if (it == values.end()) throw ModelError("solution file lacks a value for " + v.name);
            s.values[std::size_t(v.id)] = it->get<std::int64_t>();
        }
        auto value = evaluate_objective(m, s.values);
        s.decomposition = value.parts;
    }
    return s;
}

}  // namespace railplan
