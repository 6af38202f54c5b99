#include "railplan/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace railplan {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr double kInfinity = 1e30;
constexpr long kRefactorEvery = 200;
constexpr int kDegenerateSwitch = 50;

}  // namespace

LpProblem relaxation_of(const MilpModel& m) {
    LpProblem lp;
    lp.columns = int(m.size());
    lp.cost = m.dense_objective();
    for (const auto& v : m.variables()) {
        lp.lower.push_back(double(v.lower));
        lp.upper.push_back(double(v.upper));
    }
    for (const auto& c : m.constraints()) {
        std::vector<std::pair<int, double>> row;
        for (const auto& t : c.terms) row.emplace_back(t.var, t.coef);
        lp.rows.push_back(std::move(row));
        lp.senses.push_back(c.sense);
        lp.rhs.push_back(c.rhs);
    }
    return lp;
}

DualSimplex::DualSimplex(const LpProblem& lp) : m_(int(lp.rows.size())), n_(lp.columns), width_(n_ + m_) {
    a_.assign(std::size_t(m_) * std::size_t(width_), 0.0);
    b_.assign(std::size_t(m_), 0.0);
    for (int i = 0; i < m_; ++i) {
        // >= rows are negated so every slack is s >= 0
        const double sign = lp.senses[std::size_t(i)] == Sense::ge ? -1.0 : 1.0;
        for (const auto& [j, coef] : lp.rows[std::size_t(i)]) {
            a_[std::size_t(i) * std::size_t(width_) + std::size_t(j)] += sign * coef;
        }
        a_[std::size_t(i) * std::size_t(width_) + std::size_t(n_ + i)] = 1.0;
        b_[std::size_t(i)] = sign * lp.rhs[std::size_t(i)];
    }
    cost_.assign(std::size_t(width_), 0.0);
    lower_.assign(std::size_t(width_), 0.0);
    upper_.assign(std::size_t(width_), kInfinity);
    for (int j = 0; j < n_; ++j) {
        cost_[std::size_t(j)] = lp.cost[std::size_t(j)];
        lower_[std::size_t(j)] = std::max(lp.lower[std::size_t(j)], -1e9);
        upper_[std::size_t(j)] = std::min(lp.upper[std::size_t(j)], 1e9);
    }
    for (int i = 0; i < m_; ++i) {
        if (lp.senses[std::size_t(i)] == Sense::eq) upper_[std::size_t(n_ + i)] = 0.0;
    }

    basis_.resize(std::size_t(m_));
    position_.assign(std::size_t(width_), -1);
    for (int i = 0; i < m_; ++i) {
        basis_[std::size_t(i)] = n_ + i;
        position_[std::size_t(n_ + i)] = i;
    }
    value_.assign(std::size_t(width_), 0.0);
    for (int j = 0; j < n_; ++j) {
        value_[std::size_t(j)] = cost_[std::size_t(j)] >= 0.0 ? lower_[std::size_t(j)] : upper_[std::size_t(j)];
    }
    tableau_ = a_;
    reduced_ = cost_;
    for (int i = 0; i < m_; ++i) {
        double v = b_[std::size_t(i)];
        for (int j = 0; j < n_; ++j) v -= at(i, j) * value_[std::size_t(j)];
        value_[std::size_t(n_ + i)] = v;
    }
}

void DualSimplex::place_nonbasic(int j) {
    const double d = reduced_[std::size_t(j)];
    const double lo = lower_[std::size_t(j)];
    const double hi = upper_[std::size_t(j)];
    double target;
    if (d > 0.0) target = lo;
    else if (d < 0.0) target = hi;
    else target = std::clamp(value_[std::size_t(j)], lo, hi) == hi ? hi : lo;
    const double delta = target - value_[std::size_t(j)];
    if (delta == 0.0) return;
    value_[std::size_t(j)] = target;
    for (int i = 0; i < m_; ++i) {
        const double t = at(i, j);
        if (t != 0.0) value_[std::size_t(basis_[std::size_t(i)])] -= t * delta;
    }
}

void DualSimplex::set_bounds(int column, double lo, double hi) {
    if (column < 0 || column >= n_) throw std::out_of_range("column out of range");
    lower_[std::size_t(column)] = lo;
    upper_[std::size_t(column)] = hi;
    if (position_[std::size_t(column)] < 0) place_nonbasic(column);
}

void DualSimplex::pivot(int r, int q, double target) {
    const int leaving = basis_[std::size_t(r)];
    const double a_rq = at(r, q);
    // primal step: entering moves so the leaving variable lands on its bound
    const double step = (value_[std::size_t(leaving)] - target) / a_rq;
    for (int i = 0; i < m_; ++i) {
        const double t = at(i, q);
        if (t != 0.0) value_[std::size_t(basis_[std::size_t(i)])] -= t * step;
    }
    value_[std::size_t(q)] += step;
    value_[std::size_t(leaving)] = target;

    double* prow = &tableau_[std::size_t(r) * std::size_t(width_)];
    const double inv = 1.0 / a_rq;
    for (int j = 0; j < width_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
        if (i == r) continue;
        double* row = &tableau_[std::size_t(i) * std::size_t(width_)];
        const double f = row[q];
        if (f == 0.0) continue;
        for (int j = 0; j < width_; ++j) {
            if (prow[j] != 0.0) row[j] -= f * prow[j];
        }
        row[q] = 0.0;
    }
    const double dq = reduced_[std::size_t(q)];
    if (dq != 0.0) {
        for (int j = 0; j < width_; ++j) {
            if (prow[j] != 0.0) reduced_[std::size_t(j)] -= dq * prow[j];
        }
    }
    reduced_[std::size_t(q)] = 0.0;

    basis_[std::size_t(r)] = q;
    position_[std::size_t(q)] = r;
    position_[std::size_t(leaving)] = -1;
    value_[std::size_t(leaving)] = target;
}

void DualSimplex::refactor() {
    std::vector<double> t = a_;
    std::vector<double> rhs = b_;
    for (int k = 0; k < m_; ++k) {
        const int col = basis_[std::size_t(k)];
        int best = -1;
        double mag = 0.0;
        for (int i = k; i < m_; ++i) {
            const double v = std::abs(t[std::size_t(i) * std::size_t(width_) + std::size_t(col)]);
            if (v > mag) {
                mag = v;
                best = i;
            }
        }
        if (best < 0 || mag < 1e-12) throw std::runtime_error("simplex basis became singular");
        if (best != k) {
            std::swap_ranges(t.begin() + std::ptrdiff_t(best) * width_, t.begin() + std::ptrdiff_t(best + 1) * width_,
                             t.begin() + std::ptrdiff_t(k) * width_);
            std::swap(rhs[std::size_t(best)], rhs[std::size_t(k)]);
        }
        double* prow = &t[std::size_t(k) * std::size_t(width_)];
        const double inv = 1.0 / prow[col];
        for (int j = 0; j < width_; ++j) prow[j] *= inv;
        rhs[std::size_t(k)] *= inv;
        for (int i = 0; i < m_; ++i) {
            if (i == k) continue;
            double* row = &t[std::size_t(i) * std::size_t(width_)];
            const double f = row[col];
            if (f == 0.0) continue;
            for (int j = 0; j < width_; ++j) row[j] -= f * prow[j];
            rhs[std::size_t(i)] -= f * rhs[std::size_t(k)];
        }
    }
    tableau_ = std::move(t);
    for (int i = 0; i < m_; ++i) {
        double v = rhs[std::size_t(i)];
        for (int j = 0; j < width_; ++j) {
            if (position_[std::size_t(j)] < 0) v -= at(i, j) * value_[std::size_t(j)];
        }
        value_[std::size_t(basis_[std::size_t(i)])] = v;
    }
    for (int j = 0; j < width_; ++j) {
        if (position_[std::size_t(j)] >= 0) {
            reduced_[std::size_t(j)] = 0.0;
            continue;
        }
        double d = cost_[std::size_t(j)];
        for (int i = 0; i < m_; ++i) d -= cost_[std::size_t(basis_[std::size_t(i)])] * at(i, j);
        reduced_[std::size_t(j)] = d;
    }
    since_refactor_ = 0;
}

LpStatus DualSimplex::solve(long max_iterations) {
    int degenerate_run = 0;
    for (long iter = 0; iter < max_iterations; ++iter) {
        if (since_refactor_ >= kRefactorEvery) refactor();
        const bool bland = degenerate_run >= kDegenerateSwitch;

        int r = -1;
        double worst = kFeasTol;
        for (int i = 0; i < m_; ++i) {
            const int var = basis_[std::size_t(i)];
            const double v = value_[std::size_t(var)];
            const double infeas = std::max(lower_[std::size_t(var)] - v, v - upper_[std::size_t(var)]);
            if (infeas <= kFeasTol) continue;
            if (bland) {
                if (r < 0 || var < basis_[std::size_t(r)]) r = i;
            } else if (infeas > worst) {
                worst = infeas;
                r = i;
            }
        }
        if (r < 0) return LpStatus::optimal;

        const int leaving = basis_[std::size_t(r)];
        const bool to_lower = value_[std::size_t(leaving)] < lower_[std::size_t(leaving)];
        const double target = to_lower ? lower_[std::size_t(leaving)] : upper_[std::size_t(leaving)];

        int q = -1;
        double best_ratio = 0.0;
        double best_mag = 0.0;
        for (int j = 0; j < width_; ++j) {
            if (position_[std::size_t(j)] >= 0) continue;
            if (lower_[std::size_t(j)] == upper_[std::size_t(j)]) continue;
            const double a = at(r, j);
            if (std::abs(a) <= kPivotTol) continue;
            const bool at_upper = value_[std::size_t(j)] == upper_[std::size_t(j)] &&
                                  value_[std::size_t(j)] != lower_[std::size_t(j)];
            const bool eligible = to_lower ? ((!at_upper && a < 0) || (at_upper && a > 0))
                                           : ((!at_upper && a > 0) || (at_upper && a < 0));
            if (!eligible) continue;
            const double ratio = std::abs(reduced_[std::size_t(j)]) / std::abs(a);
            if (q < 0 || ratio < best_ratio - 1e-12 ||
                (!bland && ratio <= best_ratio + 1e-12 && std::abs(a) > best_mag)) {
                q = j;
                best_ratio = ratio;
                best_mag = std::abs(a);
            }
        }
        if (q < 0) {
            if (since_refactor_ > 0) {
                // confirm on a fresh factorisation before declaring infeasibility
                refactor();
                continue;
            }
            return LpStatus::infeasible;
        }
        degenerate_run = best_ratio <= 1e-12 ? degenerate_run + 1 : 0;
        pivot(r, q, target);
        ++iterations_;
        ++since_refactor_;
    }
    return LpStatus::iteration_limit;
}

double DualSimplex::objective() const {
    double z = 0.0;
    for (int j = 0; j < n_; ++j) z += cost_[std::size_t(j)] * value_[std::size_t(j)];
    return z;
}

std::vector<double> DualSimplex::primal() const {
    return std::vector<double>(value_.begin(), value_.begin() + n_);
}

}  // namespace railplan
