#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "../support.hpp"
#include "railplan/lp.hpp"
#include "railplan/mps.hpp"
#include "railplan/pipeline.hpp"

using namespace railplan;
using namespace railplan::testing;

namespace {

LapModel bare_model(const Instance& inst) { return build_base_model(build_network(inst), inst.costs); }

std::int64_t fleet(const SpaceTimeNetwork& net, const LapModel& lm, const Solution& s) {
    std::int64_t n = 0;
    for (const auto& a : net.arcs()) n += a.crossings * s.values[std::size_t(lm.x_of_arc[std::size_t(a.id)])];
    return n;
}

MilpModel random_milp(std::mt19937_64& rng) {
    auto pick = [&](int lo, int hi) { return lo + int(rng() % std::uint64_t(hi - lo + 1)); };
    MilpModel m;
    const int n = pick(2, 7);
    for (int i = 0; i < n; ++i) {
        const bool binary = pick(0, 2) == 0;
        const int lo = binary ? 0 : pick(-1, 1);
        const int hi = binary ? 1 : lo + pick(1, 4);
        m.add_variable("v" + std::to_string(i), VarFamily::other, "", lo, hi,
                       binary ? Integrality::binary : Integrality::integer);
        m.add_objective(i, pick(-6, 6), CostGroup::other);
    }
    const int rows = pick(1, 4);
    for (int r = 0; r < rows; ++r) {
        std::vector<Term> terms;
        for (int i = 0; i < n; ++i) {
            if (pick(0, 1)) terms.push_back({i, double(pick(-3, 3))});
        }
        const Sense sense = std::array{Sense::le, Sense::ge, Sense::eq}[std::size_t(pick(0, 2))];
        m.add_constraint(terms, sense, pick(-3, 6), "r" + std::to_string(r));
    }
    m.add_offset(pick(-5, 5), CostGroup::other);
    return m;
}

}  // namespace

TEST_CASE("dual simplex on a small LP") {
    LpProblem lp;
    lp.columns = 2;
    lp.rows = {{{0, 1.0}, {1, 2.0}}, {{0, 3.0}, {1, 1.0}}};
    lp.senses = {Sense::le, Sense::le};
    lp.rhs = {4, 6};
    lp.cost = {-1, -1};
    lp.lower = {0, 0};
    lp.upper = {10, 10};
    DualSimplex s(lp);
    REQUIRE(s.solve() == LpStatus::optimal);
    CHECK(s.objective() == doctest::Approx(-14.0 / 5));
    CHECK(s.primal()[0] == doctest::Approx(1.6));
    CHECK(s.primal()[1] == doctest::Approx(1.2));

    s.set_bounds(0, 0, 1);
    REQUIRE(s.solve() == LpStatus::optimal);
    CHECK(s.objective() == doctest::Approx(-2.5));

    s.set_bounds(0, 0, 10);
    REQUIRE(s.solve() == LpStatus::optimal);
    CHECK(s.objective() == doctest::Approx(-14.0 / 5));
}

TEST_CASE("dual simplex detects infeasibility") {
    LpProblem lp;
    lp.columns = 2;
    lp.rows = {{{0, 1.0}, {1, 1.0}}};
    lp.senses = {Sense::ge};
    lp.rhs = {5};
    lp.cost = {1, 1};
    lp.lower = {0, 0};
    lp.upper = {2, 2};
    DualSimplex s(lp);
    CHECK(s.solve() == LpStatus::infeasible);
    lp.senses = {Sense::eq};
    lp.rhs = {3};
    DualSimplex e(lp);
    REQUIRE(e.solve() == LpStatus::optimal);
    CHECK(e.objective() == doctest::Approx(3));
}

TEST_CASE("M2 needs one locomotive") {
    const Instance inst = m2_instance();
    const auto net = build_network(inst);
    const auto lm = build_base_model(net, inst.costs);
    const auto sol = solve_bb(lm.milp);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(fleet(net, lm, sol) == 1);
    CHECK(sol.objective == doctest::Approx(inst.costs.q));
    CHECK(sol.lower_bound == doctest::Approx(sol.objective));
    CHECK(sol.upper_bound == doctest::Approx(sol.objective));
    CHECK(sol.decomposition.ownership == doctest::Approx(inst.costs.q));
    CHECK(sol.decomposition.deadhead == 0);
    CHECK(sol.decomposition.light_travel == 0);
    CHECK(sol.decomposition.work_event == 0);
    CHECK(check_feasibility(lm.milp, sol.values).empty());

    const auto oracle = solve_enumeration(lm.milp);
    CHECK(oracle.status == SolveStatus::optimal);
    CHECK(oracle.objective == doctest::Approx(sol.objective));
}

TEST_CASE("single leg uses exactly the required power") {
    Instance inst = uniform_instance(2, 300);
    add_train(inst, "T", {0, 1}, {100}, 2);
    const auto p = build_pipeline(inst, LightTravelOptions{});
    REQUIRE(p.model.milp.size() <= std::size_t(kDefaultOracleCap));
    const auto oracle = solve_enumeration(p.model.milp);
    REQUIRE(oracle.status == SolveStatus::optimal);
    const VarRef x = p.model.x_of_arc[std::size_t(p.net.legs()[0].train_arc)];
    CHECK(oracle.values[std::size_t(x)] == 2);
    CHECK(solve_bb(p.model.milp).objective == doctest::Approx(oracle.objective));
}

TEST_CASE("injected infeasibility") {
    const Instance inst = m2_instance();
    auto lm = bare_model(inst);
    const auto net = build_network(inst);
    auto& x = lm.milp.mutable_variable(lm.x_of_arc[std::size_t(net.legs()[0].train_arc)]);
    x.lower = 3;
    x.upper = 2;
    CHECK(solve_bb(lm.milp).status == SolveStatus::infeasible);
    CHECK_FALSE(solve_bb(lm.milp).has_incumbent());

    Instance one_way = uniform_instance(2, 300);
    add_train(one_way, "T", {0, 1}, {100}, 1);
    const auto none = build_pipeline(one_way, LightTravelOptions{LtMethod::none});
    CHECK(solve_bb(none.model.milp).status == SolveStatus::infeasible);
}

TEST_CASE("node budgets make solves repeatable") {
    const auto p = build_pipeline(generate_synthetic(5, 4, 6, 2), LightTravelOptions{});
    SolveBudget budget;
    budget.max_nodes = 25;
    const auto a = solve_bb(p.model.milp, budget);
    const auto b = solve_bb(p.model.milp, budget);
    CHECK(a.status == b.status);
    CHECK(a.values == b.values);
    CHECK(a.objective == b.objective);
    CHECK(a.node_count == b.node_count);
    CHECK(a.lower_bound <= a.objective + 1e-6);
}

TEST_CASE("budget outcomes") {
    const auto p = build_pipeline(generate_synthetic(5, 4, 6, 2), LightTravelOptions{});
    SolveBudget tiny;
    tiny.max_nodes = 1;
    const auto s = solve_bb(p.model.milp, tiny);
    CHECK((s.status == SolveStatus::budget_exceeded || s.status == SolveStatus::feasible ||
           s.status == SolveStatus::optimal));
    if (s.status == SolveStatus::budget_exceeded) CHECK_FALSE(s.has_incumbent());
    if (s.status == SolveStatus::feasible) CHECK(s.has_incumbent());

    SolveBudget bad;
    bad.max_seconds = 0;
    CHECK_THROWS_AS(solve_bb(p.model.milp, bad), ModelError);
}

TEST_CASE("a starting assignment is checked and used") {
    const Instance inst = m2_instance();
    auto lm = bare_model(inst);
    const auto sol = solve_bb(lm.milp);
    lm.milp.initial = sol.values;
    SolveBudget one;
    one.max_nodes = 1;
    const auto warm = solve_bb(lm.milp, one);
    CHECK(warm.has_incumbent());
    CHECK(warm.objective == doctest::Approx(sol.objective));

    auto broken = sol.values;
    broken[0] += 1;
    lm.milp.initial = broken;
    CHECK_THROWS_AS(solve_bb(lm.milp), ModelError);
}

TEST_CASE("enumeration oracle") {
    SUBCASE("cap") {
        MilpModel m;
        for (int i = 0; i < 30; ++i) m.add_variable("b" + std::to_string(i), VarFamily::other, "", 0, 1, Integrality::binary);
        CHECK_THROWS_AS(solve_enumeration(m), EnumerationCapError);
        CHECK_NOTHROW(solve_enumeration(m, 30));
    }
    SUBCASE("ties keep the lexicographically smallest point") {
        MilpModel m;
        m.add_variable("a", VarFamily::other, "", 0, 2, Integrality::integer);
        m.add_variable("b", VarFamily::other, "", 0, 2, Integrality::integer);
        m.add_constraint({{0, 1}, {1, 1}}, Sense::eq, 2, "sum");
        const auto s = solve_enumeration(m);
        CHECK(s.values == std::vector<std::int64_t>{0, 2});
        CHECK(s.objective == 0);
    }
    SUBCASE("infeasible box") {
        MilpModel m;
        m.add_variable("a", VarFamily::other, "", 0, 1, Integrality::binary);
        m.add_constraint({{0, 1}}, Sense::ge, 2, "too_much");
        CHECK(solve_enumeration(m).status == SolveStatus::infeasible);
    }
}

TEST_CASE("branch-and-bound agrees with enumeration on random models") {
    std::mt19937_64 rng(77);
    int feasible = 0;
    for (int trial = 0; trial < 300; ++trial) {
        CAPTURE(trial);
        const MilpModel m = random_milp(rng);
        const auto bb = solve_bb(m);
        const auto ex = solve_enumeration(m);
        REQUIRE((bb.status == SolveStatus::optimal || bb.status == SolveStatus::infeasible));
        CHECK(bb.status == ex.status);
        if (ex.status == SolveStatus::optimal) {
            ++feasible;
            CHECK(bb.objective == doctest::Approx(ex.objective));
            CHECK(check_feasibility(m, bb.values).empty());
            CHECK(evaluate_objective(m, bb.values).total == doctest::Approx(bb.objective));
        }
    }
    CHECK(feasible > 100);
}

TEST_CASE("feasibility check names rows and bounds") {
    const Instance inst = m2_instance();
    const auto net = build_network(inst);
    const auto lm = build_base_model(net, inst.costs);
    auto values = solve_bb(lm.milp).values;
    CHECK(check_feasibility(lm.milp, values).empty());

    const ArcId train = net.legs()[0].train_arc;
    values[std::size_t(lm.x_of_arc[std::size_t(train)])] = 0;
    const auto v = check_feasibility(lm.milp, values);
    auto has = [&](const std::string& tag) {
        return std::any_of(v.begin(), v.end(), [&](const auto& x) { return x.tag == tag; });
    };
    CHECK(has("cap:leg_0"));
    CHECK(has("flow:node_" + std::to_string(net.arc(train).tail)));
    for (const auto& x : v) CHECK(x.slack < 0);

    values.pop_back();
    CHECK_THROWS_AS(check_feasibility(lm.milp, values), ModelError);
    CHECK_THROWS_AS(evaluate_objective(lm.milp, values), ModelError);
}

TEST_CASE("objective evaluation") {
    SUBCASE("all zero with no required power") {
        Instance inst = m2_instance();
        for (auto& t : inst.trains) t.legs[0].power = 0;
        const auto lm = bare_model(inst);
        const std::vector<std::int64_t> zero(lm.milp.size(), 0);
        CHECK(check_feasibility(lm.milp, zero).empty());
        CHECK(evaluate_objective(lm.milp, zero).total == 0);
    }
    SUBCASE("one pick-up at a pick-up stop costs c1") {
        const Instance inst = stopover_instance(false, "pu");
        const auto net = build_network(inst);
        const auto lm = build_base_model(net, inst.costs);
        std::vector<std::int64_t> values(lm.milp.size(), 0);
        const ArcId pu = pickup_arcs(net).front();
        values[std::size_t(lm.ypu_of_arc[std::size_t(pu)])] = 1;
        const auto v = evaluate_objective(lm.milp, values);
        CHECK(v.parts.work_event == inst.costs.c1);
    }
}

TEST_CASE("solution json round trip") {
    const auto lm = bare_model(m2_instance());
    const auto sol = solve_bb(lm.milp);
    const auto back = solution_from_json(lm.milp, solution_to_json(lm.milp, sol));
    CHECK(back.status == sol.status);
    CHECK(back.values == sol.values);
    CHECK(back.objective == sol.objective);
    CHECK(back.decomposition.ownership == sol.decomposition.ownership);
}

TEST_CASE("mps export") {
    SUBCASE("round trip") {
        const auto p = build_pipeline(generate_synthetic(2, 3, 5, 2), LightTravelOptions{});
        std::ostringstream first;
        write_mps(p.model.milp, first);
        std::istringstream in(first.str());
        const MilpModel back = read_mps(in);
        CHECK(same_program(back, p.model.milp, 1e-12));
        std::ostringstream second;
        write_mps(back, second);
        CHECK(second.str() == first.str());
    }
    SUBCASE("M2 file round trip keeps the optimum") {
        const auto lm = bare_model(m2_instance());
        const auto path = std::filesystem::temp_directory_path() / "railplan_m2_test.mps";
        export_mps(lm.milp, path);
        const MilpModel back = import_mps(path);
        std::filesystem::remove(path);
        CHECK(same_program(back, lm.milp));
        CHECK(solve_enumeration(back).objective == doctest::Approx(solve_enumeration(lm.milp).objective));
    }
    SUBCASE("binary columns use BV") {
        const auto lm = bare_model(stopover_instance());
        std::ostringstream out;
        write_mps(lm.milp, out);
        const std::string text = out.str();
        const std::string y = lm.milp.variable(lm.ypu_of_arc[std::size_t(pickup_arcs(build_network(stopover_instance())).front())]).name;
        CHECK(text.find(" BV BND " + y) != std::string::npos);
        CHECK(text.find("'MARKER'") != std::string::npos);
    }
    SUBCASE("empty objective has only the objective row") {
        MilpModel m;
        m.add_variable("a", VarFamily::other, "", 0, 4, Integrality::integer);
        std::ostringstream out;
        write_mps(m, out);
        const std::string text = out.str();
        const auto rows = text.find("ROWS");
        const auto cols = text.find("COLUMNS");
        REQUIRE(rows != std::string::npos);
        REQUIRE(cols != std::string::npos);
        CHECK(text.substr(rows, cols - rows) == "ROWS\n N obj\n");
        std::istringstream in(text);
        CHECK(same_program(read_mps(in), m));
    }
    SUBCASE("ranges are refused") {
        std::istringstream in("NAME x\nROWS\n N obj\n L r\nCOLUMNS\n a r 1\nRHS\n RHS r 1\nRANGES\n RNG r 2\nENDATA\n");
        CHECK_THROWS_AS(read_mps(in), MpsError);
    }
}
