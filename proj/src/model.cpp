#include "railplan/model.hpp"

#include <algorithm>
#include <set>

namespace railplan {

std::pair<double, double> rc_coefficients(const RailcarFlags& flags, const CostParams& c) {
    if (flags.so) return {c.c1, c.c2};
    if (flags.pu) return {c.c2, c.c1};
    if (flags.both) return {c.c1, c.c1};
    return {c.c3, c.c3};
}

std::vector<RcTerm> rc_penalty_terms(const SpaceTimeNetwork& net, const CostParams& costs) {
    std::vector<RcTerm> out;
    for (const auto& a : net.arcs()) {
        if (a.kind != ArcKind::transition) continue;
        const auto [so, pu] = rc_coefficients(a.flags.value_or(RailcarFlags{false, false, true, false}), costs);
        for (ArcId l : net.out_arcs(a.tail)) {
            if (net.is_setout(net.arc(l))) out.push_back({a.id, l, true, so});
        }
        for (ArcId l : net.in_arcs(a.head)) {
            if (net.is_pickup(net.arc(l))) out.push_back({a.id, l, false, pu});
        }
    }
    return out;
}

int stop_day(const SpaceTimeNetwork& net, ArcId transition) {
    return int(net.node(net.arc(transition).tail).time / kDayMinutes);
}

namespace {

std::string arc_label(ArcId a) { return "arc_" + std::to_string(a); }

std::string pair_label(TerminalIndex k, int d) { return "k" + std::to_string(k) + "d" + std::to_string(d); }

}  // namespace

LapModel build_base_model(const SpaceTimeNetwork& net, const CostParams& costs, const ModelOptions& options) {
    LapModel lm;
    auto& m = lm.milp;
    const std::size_t n_arcs = net.arcs().size();
    lm.x_of_arc.assign(n_arcs, -1);
    lm.yso_of_arc.assign(n_arcs, -1);
    lm.ypu_of_arc.assign(n_arcs, -1);
    lm.u_of_arc.assign(n_arcs, -1);
    lm.terminal_count = net.terminal_count();
    lm.day_count = int((net.horizon() + kDayMinutes - 1) / kDayMinutes);
    lm.applied.push_back("base");

    const std::int64_t cap = options.flow_cap.value_or(std::int64_t(costs.f) * std::int64_t(net.legs().size()));
    const std::int64_t rho = std::max(1, costs.rho_u);

    for (const auto& a : net.arcs()) {
        const std::string subject = arc_label(a.id);
        if (a.kind == ArcKind::train) {
            lm.x_of_arc[std::size_t(a.id)] = m.add_variable("x_" + std::to_string(a.id), VarFamily::x, subject, a.power,
                                                            costs.f, Integrality::integer,
                                                            "cap:leg_" + std::to_string(a.leg));
        } else {
            lm.x_of_arc[std::size_t(a.id)] =
                m.add_variable("x_" + std::to_string(a.id), VarFamily::x, subject, 0, cap, Integrality::integer);
        }
    }
    for (const auto& a : net.arcs()) {
        const std::string subject = arc_label(a.id);
        if (net.is_setout(a)) {
            lm.yso_of_arc[std::size_t(a.id)] =
                m.add_variable("yso_" + std::to_string(a.id), VarFamily::y_so, subject, 0, 1, Integrality::binary);
        } else if (net.is_pickup(a)) {
            lm.ypu_of_arc[std::size_t(a.id)] =
                m.add_variable("ypu_" + std::to_string(a.id), VarFamily::y_pu, subject, 0, 1, Integrality::binary);
        } else if (a.kind == ArcKind::light) {
            lm.u_of_arc[std::size_t(a.id)] = m.add_variable("u_" + std::to_string(a.id), VarFamily::u, subject, 0,
                                                            (cap + rho - 1) / rho, Integrality::integer);
        }
    }

    // objective
    double dh_offset = 0.0;
    for (const auto& a : net.arcs()) {
        const VarRef x = lm.x_of_arc[std::size_t(a.id)];
        if (a.crossings > 0) m.add_objective(x, costs.q * a.crossings, CostGroup::ownership);
        if (a.kind == ArcKind::train) {
            m.add_objective(x, a.unit_cost, CostGroup::deadhead);
            dh_offset -= a.unit_cost * a.power;
        } else if (a.kind == ArcKind::light) {
            m.add_objective(x, a.unit_cost, CostGroup::light_travel);
            m.add_objective(lm.u_of_arc[std::size_t(a.id)], a.fixed_cost, CostGroup::light_travel);
        }
    }
    m.add_offset(dh_offset, CostGroup::deadhead);
    for (const auto& t : rc_penalty_terms(net, costs)) {
        VarRef y = t.setout ? lm.yso_of_arc[std::size_t(t.arc)] : lm.ypu_of_arc[std::size_t(t.arc)];
        m.add_objective(y, t.coef, CostGroup::work_event);
    }

    // flow conservation
    for (const auto& n : net.nodes()) {
        std::vector<Term> terms;
        for (ArcId a : net.in_arcs(n.id)) terms.push_back({lm.x_of_arc[std::size_t(a)], 1.0});
        for (ArcId a : net.out_arcs(n.id)) terms.push_back({lm.x_of_arc[std::size_t(a)], -1.0});
        m.add_constraint(std::move(terms), Sense::eq, 0.0, "flow:node_" + std::to_string(n.id));
    }
    // work-event activation and light-train capacity
    for (const auto& a : net.arcs()) {
        const VarRef x = lm.x_of_arc[std::size_t(a.id)];
        if (VarRef y = lm.yso_of_arc[std::size_t(a.id)]; y >= 0) {
            m.add_constraint({{x, 1.0}, {y, -double(costs.f)}}, Sense::le, 0.0, "so:" + arc_label(a.id));
        }
        if (VarRef y = lm.ypu_of_arc[std::size_t(a.id)]; y >= 0) {
            m.add_constraint({{x, 1.0}, {y, -double(costs.f)}}, Sense::le, 0.0, "pu:" + arc_label(a.id));
        }
        if (VarRef u = lm.u_of_arc[std::size_t(a.id)]; u >= 0) {
            m.add_constraint({{x, 1.0}, {u, -double(rho)}}, Sense::le, 0.0, "lt:" + arc_label(a.id));
        }
    }
    if (options.mutual_exclusion) {
        for (const auto& a : net.arcs()) {
            if (a.kind != ArcKind::transition) continue;
            std::vector<Term> terms;
            for (ArcId l : net.out_arcs(a.tail)) {
                if (VarRef y = lm.yso_of_arc[std::size_t(l)]; y >= 0) terms.push_back({y, 1.0});
            }
            for (ArcId l : net.in_arcs(a.head)) {
                if (VarRef y = lm.ypu_of_arc[std::size_t(l)]; y >= 0) terms.push_back({y, 1.0});
            }
            if (terms.size() > 1) m.add_constraint(std::move(terms), Sense::le, 1.0, "mutex:" + arc_label(a.id));
        }
    }

    lm.event_groups = group_events_by_terminal_day(net, lm);
    return lm;
}

std::map<TerminalDay, std::vector<VarRef>> group_events_by_terminal_day(const SpaceTimeNetwork& net,
                                                                      const LapModel& model) {
    std::map<TerminalDay, std::vector<VarRef>> groups;
    for (const auto& a : net.arcs()) {
        if (a.kind != ArcKind::transition) continue;
        const TerminalDay key{net.node(a.tail).terminal, stop_day(net, a.id)};
        auto& vars = groups[key];
        for (ArcId l : net.out_arcs(a.tail)) {
            if (VarRef y = model.yso_of_arc.at(std::size_t(l)); y >= 0) vars.push_back(y);
        }
        for (ArcId l : net.in_arcs(a.head)) {
            if (VarRef y = model.ypu_of_arc.at(std::size_t(l)); y >= 0) vars.push_back(y);
        }
    }
    return groups;
}

// ---------------------------------------------------------------------------

ExtensionVersion parse_extension(const std::string& name) {
    if (name == "V0") return ExtensionVersion::V0;
    if (name == "V1") return ExtensionVersion::V1;
    if (name == "V1prime" || name == "V1'" || name == "V1p") return ExtensionVersion::V1prime;
    if (name == "V2") return ExtensionVersion::V2;
    if (name == "V3") return ExtensionVersion::V3;
    if (name == "V4") return ExtensionVersion::V4;
    if (name == "V5") return ExtensionVersion::V5;
    throw ExtensionConfigError("unknown extension version '" + name + "'");
}

const char* to_string(ExtensionVersion version) {
    switch (version) {
        case ExtensionVersion::V0: return "V0";
        case ExtensionVersion::V1: return "V1";
        case ExtensionVersion::V1prime: return "V1p";
        case ExtensionVersion::V2: return "V2";
        case ExtensionVersion::V3: return "V3";
        case ExtensionVersion::V4: return "V4";
        case ExtensionVersion::V5: return "V5";
    }
    return "?";
}

namespace {

template <class T>
const T& need(const std::optional<T>& value, const char* what, ExtensionVersion v) {
    if (!value) throw ExtensionConfigError(std::string(to_string(v)) + " requires " + what);
    return *value;
}

class ExtensionBuilder {
public:
    ExtensionBuilder(LapModel& lm, std::string label) : lm_(lm), label_(std::move(label)) {}

    std::vector<Term> events(TerminalIndex k, int d) const {
        std::vector<Term> terms;
        auto it = lm_.event_groups.find({k, d});
        if (it != lm_.event_groups.end()) {
            for (VarRef y : it->second) terms.push_back({y, 1.0});
        }
        return terms;
    }

    /// Largest meaningful daily cap at (k, d).
    std::int64_t cap(TerminalIndex k, int d, int theta) const {
        return std::min<std::int64_t>(theta, std::int64_t(events(k, d).size()));
    }

    void row(std::vector<Term> terms, Sense sense, double rhs, const std::string& number, const std::string& subject) {
        if (terms.empty()) return;
        lm_.milp.add_constraint(std::move(terms), sense, rhs, tag(number, subject));
    }

    /// sum over L_kd <= M * activation
    void gated(TerminalIndex k, int d, int theta, VarRef activation, const std::string& number) {
        auto terms = events(k, d);
        if (terms.empty()) return;
        terms.push_back({activation, -double(cap(k, d, theta))});
        lm_.milp.add_constraint(std::move(terms), Sense::le, 0.0, tag(number, pair_label(k, d)));
    }

    std::string tag(const std::string& number, const std::string& subject) const {
        std::string t = label_ + ":(" + number + ")";
        if (!subject.empty()) t += ":" + subject;
        return t;
    }

    LapModel& lm_;
    std::string label_;
};

}  // namespace

LapModel apply_extension(const LapModel& base, const ExtensionConfig& cfg) {
    LapModel lm = base;
    const auto v = cfg.version;
    if (v == ExtensionVersion::V0) return lm;

    const int theta = need(cfg.theta, "theta", v);
    if (theta < 0) throw ExtensionConfigError("theta must be non-negative");
    const int nk = lm.terminal_count;
    const int nd = lm.day_count;
    ExtensionBuilder b(lm, to_string(v));
    auto& m = lm.milp;

    const bool uses_baseline = v == ExtensionVersion::V1 || v == ExtensionVersion::V1prime ||
                               v == ExtensionVersion::V2 || v == ExtensionVersion::V3;
    const BaselinePlan* plan = nullptr;
    if (uses_baseline) plan = &need(cfg.baseline, "a baseline plan", v);

    if (v == ExtensionVersion::V1) {
        const int lambda = need(cfg.lambda, "lambda", v);
        for (TerminalIndex k = 0; k < nk; ++k) {
            for (int d = 0; d < nd; ++d) {
                const std::string subject = pair_label(k, d);
                if (plan->pair_inactive(k, d)) {
                    b.row(b.events(k, d), Sense::eq, 0.0, "13", subject);
                } else {
                    b.row(b.events(k, d), Sense::le, double(plan->h(k, d) + lambda), "11", subject);
                    b.row(b.events(k, d), Sense::le, double(b.cap(k, d, theta)), "12", subject);
                }
            }
        }
    }

    if (v == ExtensionVersion::V1prime || v == ExtensionVersion::V2 || v == ExtensionVersion::V3) {
        for (TerminalIndex k = 0; k < nk; ++k) {
            for (int d = 0; d < nd; ++d) {
                const std::string subject = pair_label(k, d);
                if (!plan->pair_inactive(k, d)) {
                    b.row(b.events(k, d), Sense::le, double(2 * plan->h(k, d)), "14", subject);
                    b.row(b.events(k, d), Sense::le, double(b.cap(k, d, theta)), "15", subject);
                } else if (v == ExtensionVersion::V1prime ||
                           (v == ExtensionVersion::V2 && !plan->terminal_inactive(k))) {
                    // inactive pairs stay closed unless an activation variable governs them
                    b.row(b.events(k, d), Sense::eq, 0.0, "closed", subject);
                }
            }
        }
    }

    if (v == ExtensionVersion::V2) {
        const int alpha = need(cfg.alpha_c, "alpha_c", v);
        std::vector<Term> budget;
        for (TerminalIndex k = 0; k < nk; ++k) {
            if (!plan->terminal_inactive(k)) continue;
            VarRef z = m.add_variable("z1_" + std::to_string(k), VarFamily::z1, "k" + std::to_string(k), 0, 1,
                                      Integrality::binary);
            budget.push_back({z, 1.0});
            for (int d = 0; d < nd; ++d) b.gated(k, d, theta, z, "17");
        }
        b.row(std::move(budget), Sense::le, double(alpha), "16", "");
    }

    if (v == ExtensionVersion::V3) {
        const int alpha = need(cfg.alpha_d, "alpha_d", v);
        std::vector<Term> budget;
        for (TerminalIndex k = 0; k < nk; ++k) {
            for (int d = 0; d < nd; ++d) {
                if (!plan->pair_inactive(k, d)) continue;
                VarRef z = m.add_variable("z2_" + std::to_string(k) + "_" + std::to_string(d), VarFamily::z2,
                                          pair_label(k, d), 0, 1, Integrality::binary);
                budget.push_back({z, 1.0});
                b.gated(k, d, theta, z, "20");
            }
        }
        b.row(std::move(budget), Sense::le, double(alpha), "19", "");
    }

    if (v == ExtensionVersion::V4) {
        const int alpha = need(cfg.alpha_e, "alpha_e", v);
        std::vector<Term> budget;
        for (TerminalIndex k = 0; k < nk; ++k) {
            VarRef w = m.add_variable("w1_" + std::to_string(k), VarFamily::w1, "k" + std::to_string(k), 0, 1,
                                      Integrality::binary);
            budget.push_back({w, 1.0});
            for (int d = 0; d < nd; ++d) b.gated(k, d, theta, w, "23");
        }
        b.row(std::move(budget), Sense::le, double(alpha), "22", "");
    }

    if (v == ExtensionVersion::V5) {
        const int alpha = need(cfg.alpha_f, "alpha_f", v);
        std::vector<Term> budget;
        for (TerminalIndex k = 0; k < nk; ++k) {
            for (int d = 0; d < nd; ++d) {
                VarRef w = m.add_variable("w2_" + std::to_string(k) + "_" + std::to_string(d), VarFamily::w2,
                                          pair_label(k, d), 0, 1, Integrality::binary);
                budget.push_back({w, 1.0});
                b.gated(k, d, theta, w, "26");
            }
        }
        b.row(std::move(budget), Sense::le, double(alpha), "25", "");
    }

    lm.applied.push_back(to_string(v));
    lm.milp.initial.reset();
    return lm;
}

LapModel warm_start_from(const LapModel& target, const MilpModel& source, const Solution& sol) {
    if (!sol.has_incumbent()) throw WarmStartError("warm start requires a solution with values", {});
    if (sol.values.size() != source.size()) throw WarmStartError("solution does not match its source model", {});

    const auto& m = target.milp;
    std::vector<std::int64_t> values(m.size(), 0);
    std::vector<VarRef> activation;
    for (const auto& v : m.variables()) {
        switch (v.family) {
            case VarFamily::z1:
            case VarFamily::z2:
            case VarFamily::w1:
            case VarFamily::w2: activation.push_back(v.id); continue;
            default: break;
        }
        auto src = source.find(v.name);
        if (!src) throw WarmStartError("warm start has no value for " + v.name, {});
        values[std::size_t(v.id)] = sol.values[std::size_t(*src)];
    }

    std::set<TerminalIndex> busy_terminals;
    std::set<TerminalDay> busy_pairs;
    for (const auto& [key, vars] : target.event_groups) {
        for (VarRef y : vars) {
            if (values[std::size_t(y)] > 0) {
                busy_terminals.insert(key.first);
                busy_pairs.insert(key);
            }
        }
    }
    for (VarRef a : activation) {
        const auto& v = m.variable(a);
        bool on = false;
        if (v.family == VarFamily::z1 || v.family == VarFamily::w1) {
            on = busy_terminals.count(std::stoi(v.subject.substr(1))) > 0;
        } else {
            auto dpos = v.subject.find('d');
            TerminalDay key{std::stoi(v.subject.substr(1, dpos - 1)), std::stoi(v.subject.substr(dpos + 1))};
            on = busy_pairs.count(key) > 0;
        }
        values[std::size_t(a)] = on ? 1 : 0;
    }

    auto violations = check_feasibility(m, values);
    if (!violations.empty()) {
        std::vector<std::string> tags;
        std::string msg = "infeasible warm start:";
        for (const auto& viol : violations) {
            tags.push_back(viol.tag);
            msg += " " + viol.tag;
        }
        throw WarmStartError(msg, std::move(tags));
    }
    LapModel out = target;
    out.milp.initial = std::move(values);
    return out;
}

}  // namespace railplan
