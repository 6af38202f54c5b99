#include "railplan/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace railplan {

KpiReport compute_kpis(const SpaceTimeNetwork& net, const LapModel& model, const Solution& sol) {
    if (!sol.has_incumbent()) throw ReportError("solution carries no values");
    const auto violations = check_feasibility(model.milp, sol.values);
    if (!violations.empty()) throw ReportError("solution violates " + violations.front().tag);

    KpiReport k;
    k.train_count = net.train_count();
    auto x_of = [&](const Arc& a) { return sol.values[std::size_t(model.x_of_arc[std::size_t(a.id)])]; };

    std::map<VarRef, TerminalDay> day_of_event;
    for (const auto& [key, vars] : model.event_groups) {
        for (VarRef y : vars) day_of_event[y] = key;
    }
    std::set<TerminalIndex> busy_terminals;
    std::set<std::pair<TerminalIndex, TerminalIndex>> od;
    std::int64_t opportunities = 0;

    for (const auto& a : net.arcs()) {
        const std::int64_t x = x_of(a);
        k.fleet_size += std::int64_t(a.crossings) * x;
        switch (a.kind) {
            case ArcKind::train:
                k.active_minutes += std::int64_t(a.power) * a.duration;
                k.dh_minutes += (x - a.power) * a.duration;
                break;
            case ArcKind::ground_departure: k.pre_departure_minutes += x * a.duration; break;
            case ArcKind::arrival_ground: k.post_arrival_minutes += x * a.duration; break;
            case ArcKind::transition: k.connection_minutes += x * a.duration; break;
            case ArcKind::ground: k.idle_minutes += x * a.duration; break;
            case ArcKind::light:
                k.lt_minutes += x * a.travel;
                k.idle_minutes += x * (a.duration - a.travel);
                if (x > 0) {
                    ++k.light_arcs_used;
                    k.light_trains += sol.values[std::size_t(model.u_of_arc[std::size_t(a.id)])];
                    od.insert({net.node(a.tail).terminal, net.node(a.head).terminal});
                }
                break;
        }
        const bool setout = net.is_setout(a);
        const bool pickup = net.is_pickup(a);
        if (!setout && !pickup) continue;
        ++opportunities;
        if (x <= 0) continue;
        if (setout) {
            ++k.setout_events;
            k.setout_units += x;
        } else {
            ++k.pickup_events;
            k.pickup_units += x;
        }
        const VarRef y = setout ? model.yso_of_arc[std::size_t(a.id)] : model.ypu_of_arc[std::size_t(a.id)];
        if (auto it = day_of_event.find(y); it != day_of_event.end()) {
            ++k.events_by_terminal_day[it->second];
            busy_terminals.insert(it->second.first);
        }
    }
    k.active_terminals = int(busy_terminals.size());
    k.active_terminal_days = int(k.events_by_terminal_day.size());
    k.unique_od_pairs = int(od.size());
    const std::int64_t used = k.setout_events + k.pickup_events;
    k.coverage_ratio = opportunities > 0 ? double(used) / double(opportunities) : 0.0;

    if (k.fleet_size > 0) {
        const double total = double(k.fleet_size) * double(net.horizon());
        k.shares.active = double(k.active_minutes) / total;
        k.shares.deadhead = double(k.dh_minutes) / total;
        k.shares.pre_departure = double(k.pre_departure_minutes) / total;
        k.shares.post_arrival = double(k.post_arrival_minutes) / total;
        k.shares.connection = double(k.connection_minutes) / total;
        k.shares.light_travel = double(k.lt_minutes) / total;
        k.shares.idle = double(k.idle_minutes) / total;
    }
    const auto value = evaluate_objective(model.milp, sol.values);
    k.objective = value.total;
    k.costs = value.parts;
    return k;
}

nlohmann::json kpis_to_json(const KpiReport& k) {
    nlohmann::json heat = nlohmann::json::array();
    for (const auto& [key, n] : k.events_by_terminal_day) heat.push_back({{"terminal", key.first}, {"day", key.second}, {"events", n}});
    const double per_train = k.train_count > 0 ? 1.0 / k.train_count : 0.0;
    return {
        {"fleet_size", k.fleet_size},
        {"work_events",
         {{"pickup", k.pickup_events}, {"setout", k.setout_events}, {"pickup_units", k.pickup_units},
          {"setout_units", k.setout_units}}},
        {"active_terminals", k.active_terminals},
        {"active_terminal_days", k.active_terminal_days},
        {"coverage_ratio", k.coverage_ratio},
        {"light_travel", {{"arcs_used", k.light_arcs_used}, {"trains", k.light_trains}, {"od_pairs", k.unique_od_pairs}}},
        {"minutes",
         {{"active", k.active_minutes}, {"deadhead", k.dh_minutes}, {"pre_departure", k.pre_departure_minutes},
          {"post_arrival", k.post_arrival_minutes}, {"connection", k.connection_minutes},
          {"light_travel", k.lt_minutes}, {"idle", k.idle_minutes}}},
        {"per_train_minutes",
         {{"active", double(k.active_minutes) * per_train}, {"deadhead", double(k.dh_minutes) * per_train},
          {"pre_departure", double(k.pre_departure_minutes) * per_train},
          {"post_arrival", double(k.post_arrival_minutes) * per_train},
          {"connection", double(k.connection_minutes) * per_train},
          {"light_travel", double(k.lt_minutes) * per_train}, {"idle", double(k.idle_minutes) * per_train}}},
        {"shares",
         {{"active", k.shares.active}, {"deadhead", k.shares.deadhead}, {"pre_departure", k.shares.pre_departure},
          {"post_arrival", k.shares.post_arrival}, {"connection", k.shares.connection},
          {"light_travel", k.shares.light_travel}, {"idle", k.shares.idle}}},
        {"objective", k.objective},
        {"costs",
         {{"ownership", k.costs.ownership}, {"deadhead", k.costs.deadhead}, {"light_travel", k.costs.light_travel},
          {"work_event", k.costs.work_event}}},
        {"events_by_terminal_day", heat},
    };
}

// ---------------------------------------------------------------------------

SweepParam parse_sweep_param(const std::string& name) {
    if (name == "q") return SweepParam::q;
    if (name == "e") return SweepParam::e;
    if (name == "c") return SweepParam::c;
    if (name == "g") return SweepParam::g;
    throw std::invalid_argument("unknown sweep parameter '" + name + "' (expected q, e, c or g)");
}

const char* to_string(SweepParam p) {
    switch (p) {
        case SweepParam::q: return "q";
        case SweepParam::e: return "e";
        case SweepParam::c: return "c";
        case SweepParam::g: return "g";
    }
    return "?";
}

std::vector<double> default_sweep_factors() {
    std::vector<double> f;
    for (int i = 1; i <= 10; ++i) f.push_back(i / 10.0);
    for (int i = 2; i <= 10; ++i) f.push_back(double(i));
    return f;
}

CostParams scale_costs(const CostParams& base, SweepParam p, double factor) {
    CostParams c = base;
    switch (p) {
        case SweepParam::q: c.q *= factor; break;
        case SweepParam::e: c.e_rate *= factor; break;
        case SweepParam::c:
            c.c1 *= factor;
            c.c2 *= factor;
            c.c3 *= factor;
            break;
        case SweepParam::g: c.g_rate *= factor; break;
    }
    return c;
}

namespace {

/// Runs `job(i)` for i in [0, n) on up to `workers` threads.
template <class Job>
void for_each_index(std::size_t n, int workers, Job job) {
    workers = std::max(1, std::min<int>(workers, int(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<SweepRow> run_sweep(const Instance& inst, const SweepConfig& cfg) {
    for (std::size_t i = 0; i < cfg.factors.size(); ++i) {
        if (cfg.factors[i] <= 0) throw std::invalid_argument("sweep factors must be positive");
        if (i > 0 && cfg.factors[i] <= cfg.factors[i - 1]) throw std::invalid_argument("sweep factors must be sorted");
    }
    std::vector<SweepRow> rows(cfg.factors.size());
    for_each_index(rows.size(), cfg.parallel, [&](std::size_t i) {
        Instance scaled = inst;
        scaled.costs = scale_costs(inst.costs, cfg.parameter, cfg.factors[i]);
        const Pipeline p = build_pipeline(scaled, cfg.light, cfg.model, cfg.extension);
        SweepRow row;
        row.factor = cfg.factors[i];
        row.solution = solve_bb(p.model.milp, cfg.budget);
        if (row.solution.has_incumbent()) row.kpis = compute_kpis(p.net, p.model, row.solution);
        rows[i] = std::move(row);
    });
    return rows;
}

ShapeCheck check_sweep_shape(const std::vector<double>& f, const std::vector<double>& z, double tol) {
    ShapeCheck out;
    if (f.size() != z.size()) throw std::invalid_argument("factor and objective counts differ");
    auto slack = [tol](double a, double b) { return tol * std::max({1.0, std::abs(a), std::abs(b)}); };
    for (std::size_t i = 1; i < z.size(); ++i) {
        if (z[i] < z[i - 1] - slack(z[i], z[i - 1])) {
            out.monotone = false;
            out.detail += "decrease at factor " + std::to_string(f[i]) + "; ";
        }
    }
    for (std::size_t i = 2; i < z.size(); ++i) {
        const double left = (z[i - 1] - z[i - 2]) / (f[i - 1] - f[i - 2]);
        const double right = (z[i] - z[i - 1]) / (f[i] - f[i - 1]);
        // compare the chord increments on the objective scale
        const double excess = (right - left) * (f[i] - f[i - 1]);
        if (excess > slack(z[i], z[i - 1])) {
            out.concave = false;
            out.detail += "convex kink at factor " + std::to_string(f[i - 1]) + "; ";
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

int inactive_terminals(const BaselinePlan& plan, int terminals) {
    int n = 0;
    for (int k = 0; k < terminals; ++k) n += plan.terminal_inactive(k) ? 1 : 0;
    return n;
}

int inactive_pairs(const BaselinePlan& plan, int terminals, int days) {
    int n = 0;
    for (int k = 0; k < terminals; ++k) {
        for (int d = 0; d < days; ++d) n += plan.pair_inactive(k, d) ? 1 : 0;
    }
    return n;
}

std::vector<int> stepped(int from, int to, int step) {
    std::vector<int> out;
    for (int v = from; v < to; v += step) out.push_back(v);
    out.push_back(to);
    return out;
}

bool needs_baseline(ExtensionVersion v) {
    return v == ExtensionVersion::V1 || v == ExtensionVersion::V1prime || v == ExtensionVersion::V2 ||
           v == ExtensionVersion::V3;
}

}  // namespace

std::vector<int> default_ladder_grid(const Instance& inst, ExtensionVersion v, int theta) {
    const int nk = inst.terminal_count();
    const int nd = int((inst.costs.horizon + kDayMinutes - 1) / kDayMinutes);
    const BaselinePlan plan = inst.baseline.value_or(BaselinePlan{});
    switch (v) {
        case ExtensionVersion::V0:
        case ExtensionVersion::V1prime: return {0};
        case ExtensionVersion::V1: return stepped(0, std::min(theta, 64), 1);
        case ExtensionVersion::V2: return stepped(0, inactive_terminals(plan, nk), 1);
        case ExtensionVersion::V3: return stepped(0, inactive_pairs(plan, nk, nd), 5);
        case ExtensionVersion::V4: return stepped(nk - inactive_terminals(plan, nk), nk, 1);
        case ExtensionVersion::V5: return stepped(nk * nd - inactive_pairs(plan, nk, nd), nk * nd, 5);
    }
    return {0};
}

std::vector<LadderRow> run_extension_ladder(const Instance& inst, const LadderConfig& cfg) {
    if (!inst.baseline) throw ReportError("the extension ladder needs a baseline plan");
    const Pipeline base = build_pipeline(inst, cfg.light, cfg.model);

    auto config_for = [&](ExtensionVersion v, int budget) {
        ExtensionConfig c;
        c.version = v;
        c.theta = cfg.theta;
        c.baseline = inst.baseline;
        switch (v) {
            case ExtensionVersion::V1: c.lambda = budget; break;
            case ExtensionVersion::V2: c.alpha_c = budget; break;
            case ExtensionVersion::V3: c.alpha_d = budget; break;
            case ExtensionVersion::V4: c.alpha_e = budget; break;
            case ExtensionVersion::V5: c.alpha_f = budget; break;
            default: break;
        }
        return c;
    };

    std::vector<LadderRow> rows;
    const LapModel ref_model = apply_extension(base.model, config_for(ExtensionVersion::V1prime, 0));
    LadderRow ref;
    ref.version = ExtensionVersion::V1prime;
    ref.solution = solve_bb(ref_model.milp, cfg.budget);
    const double ref_obj = ref.solution.has_incumbent() ? ref.solution.objective : 0.0;
    rows.push_back(ref);

    for (ExtensionVersion v : cfg.versions) {
        if (v == ExtensionVersion::V1prime) continue;
        if (needs_baseline(v) && !inst.baseline) throw ReportError("version needs a baseline plan");
        auto grid_it = cfg.budgets.find(v);
        const std::vector<int> grid =
            grid_it != cfg.budgets.end() ? grid_it->second : default_ladder_grid(inst, v, cfg.theta);

        // the chain starts from V1p except for V1, whose tightest rung is not implied by it
        const LapModel* prev_model = v == ExtensionVersion::V1 ? nullptr : &ref_model;
        const Solution* prev_sol = v == ExtensionVersion::V1 ? nullptr : &rows.front().solution;
        LapModel prev_holder;
        Solution prev_sol_holder;
        for (int budget : grid) {
            LadderRow row;
            row.version = v;
            row.budget = budget;
            LapModel lm = apply_extension(base.model, config_for(v, budget));
            if (cfg.warm_chain && prev_model && prev_sol && prev_sol->has_incumbent()) {
                try {
                    lm = warm_start_from(lm, prev_model->milp, *prev_sol);
                    row.warm_started = true;
                    row.start_objective = evaluate_objective(lm.milp, *lm.milp.initial).total;
                } catch (const WarmStartError&) {
                    row.warm_started = false;
                }
            }
            row.solution = solve_bb(lm.milp, cfg.budget);
            if (row.solution.has_incumbent() && ref_obj != 0.0) {
                row.improvement = (ref_obj - row.solution.objective) / ref_obj;
            }
            rows.push_back(row);
            prev_holder = std::move(lm);
            prev_sol_holder = rows.back().solution;
            prev_model = &prev_holder;
            prev_sol = &prev_sol_holder;
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------

Table kpi_table(const KpiReport& k) {
    Table t;
    t.columns = {"fleet_size",      "pickup_events",     "setout_events",      "pickup_units",   "setout_units",
                 "active_terminals", "active_terminal_days", "coverage_ratio", "light_arcs_used", "light_trains",
                 "unique_od_pairs", "active_minutes",    "dh_minutes",         "pre_departure_minutes",
                 "post_arrival_minutes", "connection_minutes", "lt_minutes", "idle_minutes", "share_active",
                 "share_deadhead",  "share_pre_departure", "share_post_arrival", "share_connection",
                 "share_light_travel", "share_idle", "objective", "cost_ownership", "cost_deadhead",
                 "cost_light_travel", "cost_work_event"};
    t.rows.push_back({k.fleet_size, k.pickup_events, k.setout_events, k.pickup_units, k.setout_units,
                      k.active_terminals, k.active_terminal_days, k.coverage_ratio, k.light_arcs_used,
                      k.light_trains, k.unique_od_pairs, k.active_minutes, k.dh_minutes, k.pre_departure_minutes,
                      k.post_arrival_minutes, k.connection_minutes, k.lt_minutes, k.idle_minutes, k.shares.active,
                      k.shares.deadhead, k.shares.pre_departure, k.shares.post_arrival, k.shares.connection,
                      k.shares.light_travel, k.shares.idle, k.objective, k.costs.ownership, k.costs.deadhead,
                      k.costs.light_travel, k.costs.work_event});
    return t;
}

Table heatmap_table(const KpiReport& k) {
    Table t;
    t.columns = {"terminal", "day", "events"};
    for (const auto& [key, n] : k.events_by_terminal_day) t.rows.push_back({key.first, key.second, n});
    return t;
}

Table sweep_table(SweepParam p, const std::vector<SweepRow>& rows) {
    Table t;
    t.columns = {"parameter", "factor", "status", "objective", "lower_bound", "nodes", "wall_time", "fleet_size",
                 "work_events", "coverage_ratio", "dh_minutes", "lt_minutes", "light_trains"};
    for (const auto& r : rows) {
        const auto& s = r.solution;
        std::vector<nlohmann::json> row = {to_string(p), r.factor, to_string(s.status)};
        if (s.has_incumbent()) row.push_back(s.objective);
        else row.push_back(nullptr);
        row.push_back(s.lower_bound);
        row.push_back(s.node_count);
        row.push_back(s.wall_time);
        if (r.kpis) {
            row.push_back(r.kpis->fleet_size);
            row.push_back(r.kpis->pickup_events + r.kpis->setout_events);
            row.push_back(r.kpis->coverage_ratio);
            row.push_back(r.kpis->dh_minutes);
            row.push_back(r.kpis->lt_minutes);
            row.push_back(r.kpis->light_trains);
        } else {
            for (int i = 0; i < 6; ++i) row.push_back(nullptr);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table ladder_table(const std::vector<LadderRow>& rows) {
    Table t;
    t.columns = {"version", "budget", "status", "objective", "lower_bound", "improvement", "warm_started",
                 "start_objective", "nodes", "wall_time"};
    for (const auto& r : rows) {
        const auto& s = r.solution;
        std::vector<nlohmann::json> row = {to_string(r.version), r.budget, to_string(s.status)};
        if (s.has_incumbent()) row.push_back(s.objective);
        else row.push_back(nullptr);
        row.push_back(s.lower_bound);
        row.push_back(r.improvement);
        row.push_back(r.warm_started);
        if (r.start_objective) row.push_back(*r.start_objective);
        else row.push_back(nullptr);
        row.push_back(s.node_count);
        row.push_back(s.wall_time);
        t.rows.push_back(std::move(row));
    }
    return t;
}

ReportFormat parse_report_format(const std::string& name) {
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    throw std::invalid_argument("unknown format '" + name + "' (expected csv or json)");
}

namespace {

std::string csv_field(const nlohmann::json& v) {
    std::string s;
    if (v.is_null()) return "";
    if (v.is_string()) s = v.get<std::string>();
    else if (v.is_boolean()) s = v.get<bool>() ? "true" : "false";
    else s = v.dump();
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

}  // namespace

std::string to_csv(const Table& t) {
    std::ostringstream out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << csv_field(t.columns[i]);
    out << "\r\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
        out << "\r\n";
    }
    return out.str();
}

nlohmann::ordered_json to_json(const Table& t) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < t.columns.size() && i < row.size(); ++i) {
            obj[t.columns[i]] = nlohmann::ordered_json::parse(row[i].dump());
        }
        out.push_back(std::move(obj));
    }
    return {{"columns", t.columns}, {"rows", out}};
}

Table table_from_json(const nlohmann::ordered_json& doc) {
    Table t;
    t.columns = doc.at("columns").get<std::vector<std::string>>();
    for (const auto& obj : doc.at("rows")) {
        std::vector<nlohmann::json> row;
        for (const auto& c : t.columns) row.push_back(nlohmann::json::parse(obj.at(c).dump()));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void emit_report(const Table& t, ReportFormat format, const std::filesystem::path& path) {
    const std::string text = format == ReportFormat::csv ? to_csv(t) : to_json(t).dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ReportError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw ReportError("failed writing " + path.string());
}

}  // namespace railplan
