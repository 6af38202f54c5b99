#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../support.hpp"
#include "railplan/report.hpp"

using namespace railplan;
using namespace railplan::testing;

namespace {

struct Solved {
    Pipeline p;
    Solution s;
};

Solved solve(const Instance& inst, LtMethod method = LtMethod::exact) {
    Solved out{build_pipeline(inst, LightTravelOptions{method}), {}};
    out.s = solve_bb(out.p.model.milp);
    return out;
}

std::int64_t ledger_total(const KpiReport& k) {
    return k.active_minutes + k.dh_minutes + k.pre_departure_minutes + k.post_arrival_minutes +
           k.connection_minutes + k.lt_minutes + k.idle_minutes;
}

/// Surplus at B that must travel back to A: one train A->B with two units.
Instance surplus_instance() {
    Instance inst = uniform_instance(2, 600);
    add_train(inst, "T", {0, 1}, {100}, 2);
    return inst;
}

Instance ladder_instance() {
    Instance inst = event_instance();
    BaselinePlan plan;
    plan.events[{1, 0}] = 1;
    inst.baseline = plan;
    return inst;
}

}  // namespace

TEST_CASE("M2 minute ledger") {
    const Instance inst = m2_instance();
    const auto [p, s] = solve(inst, LtMethod::none);
    REQUIRE(s.status == SolveStatus::optimal);
    const auto k = compute_kpis(p.net, p.model, s);
    CHECK(k.fleet_size == 1);
    CHECK(k.dh_minutes == 0);
    CHECK(k.lt_minutes == 0);
    CHECK(k.active_minutes == 1200);
    CHECK(k.pre_departure_minutes == 2 * inst.costs.prep);
    CHECK(k.post_arrival_minutes == 2 * inst.costs.inspect);
    CHECK(k.connection_minutes == 0);
    CHECK(k.idle_minutes == kWeekMinutes - 1200 - 2 * inst.costs.prep - 2 * inst.costs.inspect);
    CHECK(ledger_total(k) == kWeekMinutes);
    CHECK(k.shares.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.shares.active == doctest::Approx(1200.0 / kWeekMinutes));
    CHECK(k.train_count == 2);
    CHECK(k.objective == doctest::Approx(inst.costs.q));
    CHECK(k.costs.ownership == doctest::Approx(inst.costs.q));
    CHECK(k.coverage_ratio == 0.0);
}

TEST_CASE("one light train of two units") {
    const auto [p, s] = solve(surplus_instance());
    REQUIRE(s.status == SolveStatus::optimal);
    const auto k = compute_kpis(p.net, p.model, s);
    CHECK(k.lt_minutes == 1200);
    CHECK(k.light_trains == 1);
    CHECK(k.light_arcs_used == 1);
    CHECK(k.unique_od_pairs == 1);
    CHECK(k.dh_minutes == 0);
    CHECK(ledger_total(k) == k.fleet_size * kWeekMinutes);
}

TEST_CASE("work events are counted per terminal-day") {
    const auto [p, s] = solve(event_instance());
    REQUIRE(s.status == SolveStatus::optimal);
    const auto k = compute_kpis(p.net, p.model, s);
    CHECK(k.pickup_events == 2);
    CHECK(k.setout_events == 0);
    CHECK(k.pickup_units == 2);
    CHECK(k.active_terminals == 1);
    CHECK(k.active_terminal_days == 1);
    CHECK(k.events_by_terminal_day.at({1, 0}) == 2);
    CHECK(k.coverage_ratio == doctest::Approx(0.5));
    const auto heat = heatmap_table(k);
    REQUIRE(heat.rows.size() == 1);
    CHECK(heat.rows[0] == std::vector<nlohmann::json>{1, 0, 2});
}

TEST_CASE("ledger partitions the fleet week on synthetic instances") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        CAPTURE(seed);
        const auto [p, s] = solve(generate_synthetic(seed, 3, 5, 2));
        REQUIRE(s.has_incumbent());
        const auto k = compute_kpis(p.net, p.model, s);
        CHECK(ledger_total(k) == k.fleet_size * kWeekMinutes);
        CHECK(k.shares.sum() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(k.coverage_ratio >= 0.0);
        CHECK(k.coverage_ratio <= 1.0);
        CHECK(k.dh_minutes >= 0);
        CHECK(k.objective == doctest::Approx(s.objective));
    }
}

TEST_CASE("kpis reject unusable solutions") {
    const auto [p, s] = solve(m2_instance(), LtMethod::none);
    CHECK_THROWS_AS(compute_kpis(p.net, p.model, Solution{}), ReportError);
    Solution bad = s;
    bad.values.assign(bad.values.size(), 0);
    CHECK_THROWS_AS(compute_kpis(p.net, p.model, bad), ReportError);
}

TEST_CASE("sweep parameters and factors") {
    const auto f = default_sweep_factors();
    REQUIRE(f.size() == 19);
    CHECK(f.front() == doctest::Approx(0.1));
    CHECK(f[9] == doctest::Approx(1.0));
    CHECK(f.back() == doctest::Approx(10.0));
    for (auto p : {SweepParam::q, SweepParam::e, SweepParam::c, SweepParam::g})
        CHECK(parse_sweep_param(to_string(p)) == p);
    CHECK_THROWS(parse_sweep_param("z"));

    const CostParams base;
    CHECK(scale_costs(base, SweepParam::q, 2).q == 2 * base.q);
    CHECK(scale_costs(base, SweepParam::e, 2).e_rate == 2 * base.e_rate);
    CHECK(scale_costs(base, SweepParam::g, 0.5).g_rate == 0.5 * base.g_rate);
    const auto c = scale_costs(base, SweepParam::c, 3);
    CHECK(c.c1 == 3 * base.c1);
    CHECK(c.c2 == 3 * base.c2);
    CHECK(c.c3 == 3 * base.c3);
    CHECK(c.q == base.q);
}

TEST_CASE("shape check") {
    CHECK(check_sweep_shape({1, 2, 3}, {1, 2, 3}).monotone);
    CHECK(check_sweep_shape({1, 2, 3}, {1, 2, 3}).concave);
    CHECK_FALSE(check_sweep_shape({1, 2, 3}, {3, 2, 1}).monotone);
    CHECK_FALSE(check_sweep_shape({1, 2, 3}, {1, 2, 4}).concave);
    CHECK(check_sweep_shape({1, 2, 4}, {1, 2, 3}).concave);
}

TEST_CASE("sweeps") {
    const Instance inst = generate_synthetic(3, 3, 5, 2);

    SUBCASE("factor one reproduces a direct solve") {
        SweepConfig cfg;
        cfg.parameter = SweepParam::g;
        cfg.factors = {1.0};
        const auto rows = run_sweep(inst, cfg);
        REQUIRE(rows.size() == 1);
        const auto direct = solve(inst).s;
        CHECK(rows[0].solution.objective == doctest::Approx(direct.objective));
        CHECK(rows[0].solution.values == direct.values);
    }
    SUBCASE("q sweep is non-decreasing and concave") {
        SweepConfig cfg;
        cfg.parameter = SweepParam::q;
        cfg.factors = {0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
        cfg.parallel = 3;
        const auto rows = run_sweep(inst, cfg);
        std::vector<double> obj;
        for (const auto& r : rows) {
            REQUIRE(r.solution.status == SolveStatus::optimal);
            obj.push_back(r.solution.objective);
        }
        const auto shape = check_sweep_shape(cfg.factors, obj);
        CHECK_MESSAGE(shape.monotone, shape.detail);
        CHECK_MESSAGE(shape.concave, shape.detail);
    }
    SUBCASE("parallel rows match serial rows") {
        SweepConfig cfg;
        cfg.parameter = SweepParam::c;
        cfg.factors = {0.5, 1.0, 4.0};
        const auto serial = run_sweep(inst, cfg);
        cfg.parallel = 3;
        const auto parallel = run_sweep(inst, cfg);
        REQUIRE(serial.size() == parallel.size());
        for (std::size_t i = 0; i < serial.size(); ++i) {
            CHECK(serial[i].factor == parallel[i].factor);
            CHECK(serial[i].solution.values == parallel[i].solution.values);
        }
        const auto t = sweep_table(SweepParam::c, serial);
        CHECK(t.rows.size() == 3);
        CHECK(t.columns.front() == "parameter");
    }
    SUBCASE("dearer light trains do not add light travel") {
        SweepConfig cfg;
        cfg.parameter = SweepParam::e;
        cfg.factors = {0.1, 10.0};
        const auto rows = run_sweep(surplus_instance(), cfg);
        REQUIRE(rows[0].kpis);
        REQUIRE(rows[1].kpis);
        CHECK(rows[1].kpis->lt_minutes <= rows[0].kpis->lt_minutes);
    }
}

TEST_CASE("ladder grids") {
    const Instance inst = ladder_instance();  // 2 terminals, 14 terminal-days, one active
    CHECK(default_ladder_grid(inst, ExtensionVersion::V1, 6) == std::vector<int>{0, 1, 2, 3, 4, 5, 6});
    CHECK(default_ladder_grid(inst, ExtensionVersion::V2, 6) == std::vector<int>{0, 1});
    CHECK(default_ladder_grid(inst, ExtensionVersion::V3, 6) == std::vector<int>{0, 5, 10, 13});
    CHECK(default_ladder_grid(inst, ExtensionVersion::V4, 6) == std::vector<int>{1, 2});
    CHECK(default_ladder_grid(inst, ExtensionVersion::V5, 6) == std::vector<int>{1, 6, 11, 14});
}

TEST_CASE("extension ladder") {
    const Instance inst = ladder_instance();
    const double v0 = solve(inst).s.objective;

    LadderConfig cfg;
    cfg.versions = {ExtensionVersion::V4, ExtensionVersion::V5};
    cfg.theta = kUnboundedTheta;
    cfg.budgets[ExtensionVersion::V5] = {0, 1, 2, 14};
    const auto rows = run_extension_ladder(inst, cfg);
    REQUIRE(rows.front().version == ExtensionVersion::V1prime);

    double prev = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        REQUIRE(r.solution.status == SolveStatus::optimal);
        if (r.version == ExtensionVersion::V4 && r.budget == 2) CHECK(r.solution.objective == doctest::Approx(v0));
        if (r.version == ExtensionVersion::V5) {
            CHECK(r.solution.objective <= prev + 1e-6);
            prev = r.solution.objective;
            if (r.warm_started) {
                REQUIRE(r.start_objective);
                CHECK(*r.start_objective >= r.solution.objective - 1e-6);
            }
        }
    }
    CHECK(prev == doctest::Approx(v0));
    const auto t = ladder_table(rows);
    CHECK(t.rows.size() == rows.size());

    Instance no_plan = inst;
    no_plan.baseline.reset();
    CHECK_THROWS_AS(run_extension_ladder(no_plan, cfg), ReportError);
}

TEST_CASE("csv output") {
    Table t;
    t.columns = {"name", "value"};
    CHECK(to_csv(t) == "name,value\r\n");
    t.rows.push_back({"a", 1});
    CHECK(to_csv(t) == "name,value\r\na,1\r\n");
    t.rows.push_back({"say \"hi\", bye", 2.5});
    CHECK(to_csv(t) == "name,value\r\na,1\r\n\"say \"\"hi\"\", bye\",2.5\r\n");
    CHECK(parse_report_format("csv") == ReportFormat::csv);
    CHECK(parse_report_format("json") == ReportFormat::json);
    CHECK_THROWS(parse_report_format("xml"));
}

TEST_CASE("json output round trips") {
    const auto [p, s] = solve(m2_instance(), LtMethod::none);
    const Table t = kpi_table(compute_kpis(p.net, p.model, s));
    const Table back = table_from_json(to_json(t));
    CHECK(back.columns == t.columns);
    CHECK(back.rows == t.rows);
    CHECK(to_json(t).at("columns").front() == "fleet_size");
}

TEST_CASE("reports are written to files") {
    Table t;
    t.columns = {"x"};
    t.rows.push_back({7});
    const auto path = std::filesystem::temp_directory_path() / "railplan_report_test.csv";
    emit_report(t, ReportFormat::csv, path);
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "x\r\n7\r\n");
    std::filesystem::remove(path);
    CHECK_THROWS(emit_report(t, ReportFormat::csv, "/nonexistent-dir/out.csv"));
}
