#include "railplan/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <queue>

#include "railplan/lp.hpp"

namespace railplan {

namespace {

constexpr double kIntTol = 1e-6;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct BoundChange {
    int var;
    double lower;
    double upper;
};

struct OpenNode {
    double bound;
    long order;  // creation order breaks ties deterministically
    std::vector<BoundChange> changes;  // relative to the root box
};

struct ByBound {
    bool operator()(const OpenNode& a, const OpenNode& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.order > b.order;
    }
};

bool integral_objective(const MilpModel& m) {
    for (double c : m.dense_objective()) {
        if (c != std::floor(c)) return false;
    }
    return m.offset() == std::floor(m.offset());
}

void finish(const MilpModel& m, Solution& s) {
    if (!s.has_incumbent()) return;
    const auto value = evaluate_objective(m, s.values);
    s.objective = value.total;
    s.decomposition = value.parts;
    s.upper_bound = value.total;
}

}  // namespace

Solution solve_bb(const MilpModel& m, const SolveBudget& budget) {
    if (budget.max_seconds <= 0 || budget.max_nodes <= 0 || budget.gap < 0) {
        throw ModelError("solve budget must be positive");
    }
    const auto start = Clock::now();
    Solution sol;
    const std::size_t n = m.size();
    const bool integral = integral_objective(m);
    const double offset = m.offset();

    double incumbent = std::numeric_limits<double>::infinity();
    if (m.initial) {
        auto violations = check_feasibility(m, *m.initial);
        if (!violations.empty()) {
            throw ModelError("starting assignment violates " + violations.front().tag);
        }
        sol.values = *m.initial;
        incumbent = evaluate_objective(m, sol.values).total;
    }
    for (const auto& v : m.variables()) {
        if (v.lower > v.upper) {
            sol.status = SolveStatus::infeasible;
            sol.wall_time = seconds_since(start);
            return sol;
        }
    }

    // a bound b can prune nodes whose relaxation value cannot beat the incumbent
    auto prunable = [&](double lp_bound) {
        if (!std::isfinite(incumbent)) return false;
        if (integral) return std::ceil(lp_bound - 1e-6) >= incumbent - 0.5;
        const double tol = budget.gap * std::max(1.0, std::abs(incumbent));
        return lp_bound >= incumbent - std::max(tol, 1e-9);
    };
    auto gap_closed = [&](double global_lb) {
        if (!std::isfinite(incumbent)) return false;
        if (integral && std::ceil(global_lb - 1e-6) >= incumbent - 0.5) return true;
        return incumbent - global_lb <= budget.gap * std::max(1.0, std::abs(incumbent));
    };

    const LpProblem lp = relaxation_of(m);
    DualSimplex simplex(lp);
    std::vector<double> root_lower(lp.lower), root_upper(lp.upper);

    std::priority_queue<OpenNode, std::vector<OpenNode>, ByBound> open;
    long order = 0;
    open.push({-std::numeric_limits<double>::infinity(), order++, {}});
    bool out_of_budget = false;
    double open_floor = std::numeric_limits<double>::infinity();  // bound of nodes dropped at exit

    std::vector<double> cur_lower = root_lower, cur_upper = root_upper;
    auto load = [&](const std::vector<BoundChange>& changes) {
        std::vector<double> lo = root_lower, hi = root_upper;
        for (const auto& c : changes) {
            lo[std::size_t(c.var)] = c.lower;
            hi[std::size_t(c.var)] = c.upper;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (lo[j] != cur_lower[j] || hi[j] != cur_upper[j]) {
                simplex.set_bounds(int(j), lo[j], hi[j]);
                cur_lower[j] = lo[j];
                cur_upper[j] = hi[j];
            }
        }
    };

    while (!open.empty()) {
        OpenNode node = open.top();
        if (prunable(node.bound)) {
            open.pop();
            continue;
        }
        if (gap_closed(node.bound)) break;
        open.pop();

        // dive from this node
        std::vector<BoundChange> changes = std::move(node.changes);
        double parent_bound = node.bound;
        while (true) {
            if (sol.node_count >= budget.max_nodes || seconds_since(start) >= budget.max_seconds) {
                out_of_budget = true;
                open_floor = std::min(open_floor, parent_bound);
                break;
            }
            ++sol.node_count;
            load(changes);
            const LpStatus status = simplex.solve();
            if (status == LpStatus::iteration_limit) throw std::runtime_error("simplex iteration limit reached");
            if (status == LpStatus::infeasible) break;
            const double bound = simplex.objective() + offset;
            if (prunable(bound)) break;

            const auto x = simplex.primal();
            int branch = -1;
            double best_frac = kIntTol;
            for (std::size_t j = 0; j < n; ++j) {
                const double frac = x[j] - std::floor(x[j]);
                const double dist = std::min(frac, 1.0 - frac);
                if (dist > best_frac + 1e-12) {
                    best_frac = dist;
                    branch = int(j);
                }
            }
            if (branch < 0) {
                std::vector<std::int64_t> values(n);
                for (std::size_t j = 0; j < n; ++j) values[j] = std::llround(x[j]);
                if (check_feasibility(m, values).empty()) {
                    const double z = evaluate_objective(m, values).total;
                    if (z < incumbent) {
                        incumbent = z;
                        sol.values = std::move(values);
                    }
                }
                break;
            }

            const double v = x[std::size_t(branch)];
            const double down_hi = std::floor(v);
            const double up_lo = down_hi + 1.0;
            std::vector<BoundChange> down = changes, up = changes;
            down.push_back({branch, cur_lower[std::size_t(branch)], down_hi});
            up.push_back({branch, up_lo, cur_upper[std::size_t(branch)]});
            const bool go_up = v - down_hi >= 0.5;
            open.push({bound, order++, go_up ? std::move(down) : std::move(up)});
            changes = go_up ? std::move(up) : std::move(down);
            parent_bound = bound;
        }
        if (out_of_budget) break;
    }

    double lower = std::isfinite(incumbent) ? incumbent : std::numeric_limits<double>::infinity();
    if (out_of_budget) {
        lower = std::min(lower, open_floor);
        while (!open.empty()) {
            lower = std::min(lower, open.top().bound);
            open.pop();
        }
    } else if (!open.empty()) {
        lower = std::min(lower, open.top().bound);
    }

    sol.wall_time = seconds_since(start);
    if (!sol.has_incumbent()) {
        sol.status = out_of_budget ? SolveStatus::budget_exceeded : SolveStatus::infeasible;
        sol.lower_bound = std::isfinite(lower) ? lower : 0.0;
        return sol;
    }
    finish(m, sol);
    if (!out_of_budget || gap_closed(lower)) {
        sol.status = SolveStatus::optimal;
        sol.lower_bound = sol.objective;
    } else {
        sol.status = SolveStatus::feasible;
        sol.lower_bound = std::min(lower, sol.objective);
    }
    return sol;
}

// ---------------------------------------------------------------------------

namespace {

class Enumerator {
public:
    explicit Enumerator(const MilpModel& m) : m_(m), cost_(m.dense_objective()) {
        const std::size_t n = m.size();
        rows_of_.resize(n);
        for (std::size_t r = 0; r < m.constraints().size(); ++r) {
            for (const auto& t : m.constraints()[r].terms) rows_of_[std::size_t(t.var)].push_back({int(r), t.coef});
        }
        lo_.assign(m.constraints().size(), 0.0);
        hi_.assign(m.constraints().size(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const auto& v = m.variables()[j];
            for (const auto& [r, a] : rows_of_[j]) {
                lo_[std::size_t(r)] += std::min(a * double(v.lower), a * double(v.upper));
                hi_[std::size_t(r)] += std::max(a * double(v.lower), a * double(v.upper));
            }
        }
        // cheapest completion of the suffix starting at each variable
        suffix_.assign(n + 1, 0.0);
        for (std::size_t j = n; j-- > 0;) {
            const auto& v = m.variables()[j];
            suffix_[j] = suffix_[j + 1] + std::min(cost_[j] * double(v.lower), cost_[j] * double(v.upper));
        }
        values_.assign(n, 0);
    }

    void run() {
        // rows without terms are only checked here
        for (int r = 0; r < int(m_.constraints().size()); ++r) {
            if (!row_ok(r)) return;
        }
        visit(0, m_.offset());
    }

    bool found() const { return !best_values_.empty(); }
    const std::vector<std::int64_t>& best() const { return best_values_; }

private:
    bool row_ok(int r) const {
        const auto& c = m_.constraints()[std::size_t(r)];
        constexpr double tol = 1e-9;
        switch (c.sense) {
            case Sense::le: return lo_[std::size_t(r)] <= c.rhs + tol;
            case Sense::ge: return hi_[std::size_t(r)] >= c.rhs - tol;
            case Sense::eq: return lo_[std::size_t(r)] <= c.rhs + tol && hi_[std::size_t(r)] >= c.rhs - tol;
        }
        return false;
    }

    void visit(std::size_t j, double partial) {
        if (j == values_.size()) {
            if (partial < best_ - 1e-9) {
                best_ = partial;
                best_values_ = values_;
            }
            return;
        }
        const auto& v = m_.variables()[j];
        for (std::int64_t x = v.lower; x <= v.upper; ++x) {
            const double z = partial + cost_[j] * double(x);
            if (z + suffix_[j + 1] >= best_ - 1e-9) {
                if (cost_[j] >= 0) break;  // larger x only costs more
                continue;
            }
            bool ok = true;
            for (const auto& [r, a] : rows_of_[j]) {
                lo_[std::size_t(r)] += a * double(x) - std::min(a * double(v.lower), a * double(v.upper));
                hi_[std::size_t(r)] += a * double(x) - std::max(a * double(v.lower), a * double(v.upper));
            }
            for (const auto& [r, a] : rows_of_[j]) {
                if (!row_ok(r)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                values_[j] = x;
                visit(j + 1, z);
            }
            for (const auto& [r, a] : rows_of_[j]) {
                lo_[std::size_t(r)] -= a * double(x) - std::min(a * double(v.lower), a * double(v.upper));
                hi_[std::size_t(r)] -= a * double(x) - std::max(a * double(v.lower), a * double(v.upper));
            }
        }
    }

    const MilpModel& m_;
    std::vector<double> cost_;
    std::vector<std::vector<std::pair<int, double>>> rows_of_;
    std::vector<double> lo_, hi_;
    std::vector<double> suffix_;
    std::vector<std::int64_t> values_;
    std::vector<std::int64_t> best_values_;
    double best_ = std::numeric_limits<double>::infinity();
};

}  // namespace

Solution solve_enumeration(const MilpModel& m, int cap) {
    if (int(m.size()) > cap) {
        throw EnumerationCapError("model has " + std::to_string(m.size()) + " variables; oracle cap is " +
                                  std::to_string(cap));
    }
    const auto start = Clock::now();
    Solution sol;
    for (const auto& v : m.variables()) {
        if (v.lower > v.upper) {
            sol.status = SolveStatus::infeasible;
            return sol;
        }
    }
    Enumerator e(m);
    e.run();
    sol.wall_time = seconds_since(start);
    if (!e.found()) {
        sol.status = SolveStatus::infeasible;
        return sol;
    }
    sol.values = e.best();
    finish(m, sol);
    sol.status = SolveStatus::optimal;
    sol.lower_bound = sol.objective;
    sol.node_count = 1;
    return sol;
}

}  // namespace railplan
