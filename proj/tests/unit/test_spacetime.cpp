#include "doctest.h"

#include "../support.hpp"
#include "railplan/lighttravel.hpp"
#include "railplan/spacetime.hpp"

using namespace railplan;
using namespace railplan::testing;

namespace {

int count_kind(const SpaceTimeNetwork& net, ArcKind kind) {
    int n = 0;
    for (const auto& a : net.arcs()) n += a.kind == kind ? 1 : 0;
    return n;
}

int ground_nodes(const SpaceTimeNetwork& net) {
    int n = 0;
    for (const auto& v : net.nodes()) n += v.is_ground() ? 1 : 0;
    return n;
}

void check_time_identity(const SpaceTimeNetwork& net) {
    const Minutes H = net.horizon();
    for (const auto& a : net.arcs()) {
        const Minutes tail = net.node(a.tail).time;
        const Minutes head = net.node(a.head).time;
        CHECK(head == tail + a.duration - H * a.crossings);
        CHECK(a.crossings == boundary_crossings(tail, a.duration, H));
        CHECK(a.wrap == (a.crossings > 0));
        CHECK(a.duration >= 0);
    }
}

}  // namespace

TEST_CASE("boundary crossings") {
    CHECK(boundary_crossings(100, 50) == 0);
    CHECK(boundary_crossings(10000, 79) == 0);
    CHECK(boundary_crossings(10000, 80) == 1);
    CHECK(boundary_crossings(10000, 200) == 1);
    CHECK(boundary_crossings(0, kWeekMinutes) == 1);
    CHECK(boundary_crossings(9000, 2 * kWeekMinutes) == 2);
    CHECK(classify_wrap(10000, 120, 200));
    CHECK_FALSE(classify_wrap(100, 150, 50));
}

TEST_CASE("M2 network shape") {
    const Instance inst = m2_instance();
    const auto net = build_network(inst);
    CHECK(net.nodes().size() == 2 + 2 * 4);
    CHECK(count_kind(net, ArcKind::train) == 2);
    CHECK(count_kind(net, ArcKind::ground_departure) == 2);
    CHECK(count_kind(net, ArcKind::arrival_ground) == 2);
    CHECK(count_kind(net, ArcKind::transition) == 0);
    // initial + one departure-side + one arrival-side ground node per terminal
    CHECK(count_kind(net, ArcKind::ground) == 6);
    CHECK(net.ground_chain(0).size() == 3);
    CHECK(net.node(net.initial_node(0)).kind == NodeKind::initial);
    CHECK(pickup_arcs(net).empty());
    CHECK(setout_arcs(net).empty());
    check_time_identity(net);
}

TEST_CASE("ground node timing uses preparation and inspection") {
    const Instance inst = m2_instance();
    const auto net = build_network(inst);
    const auto& leg = net.legs()[0];
    CHECK(net.node(leg.ground_departure).time == 60 - inst.costs.prep);
    CHECK(net.node(leg.arrival_ground).time == 660 + inst.costs.inspect);
    CHECK(net.arc(leg.ground_departure_arc).duration == inst.costs.prep);
    CHECK(net.arc(leg.arrival_ground_arc).duration == inst.costs.inspect);
}

TEST_CASE("ground chain orders arrival-ground before ground-departure at equal times") {
    Instance inst = uniform_instance(2, 500);
    inst.costs.prep = 60;
    inst.costs.inspect = 120;
    add_train(inst, "in", {1, 0}, {1000}, 1);   // arrival-ground at A: 1000 + 500 + 120 = 1620
    add_train(inst, "out", {0, 1}, {1680}, 1);  // ground-departure at A: 1680 - 60 = 1620
    const auto net = build_network(inst);
    const auto& chain = net.ground_chain(0);
    REQUIRE(chain.size() == 3);
    CHECK(net.node(chain[1]).kind == NodeKind::arrival_ground);
    CHECK(net.node(chain[2]).kind == NodeKind::ground_departure);
    check_time_identity(net);
}

TEST_CASE("legs crossing the week end land in S") {
    Instance inst = uniform_instance(2, 600);
    add_train(inst, "late", {0, 1}, {10000}, 1);
    add_train(inst, "back", {1, 0}, {3000}, 1);
    const auto net = build_network(inst);
    const auto& a = net.arc(net.legs()[0].train_arc);
    CHECK(a.crossings == 1);
    CHECK(net.node(a.head).time == 520);
    check_time_identity(net);
}

TEST_CASE("every terminal has exactly one wrapping ground arc") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto net = build_network(generate_synthetic(seed, 4, 6, 2));
        std::vector<int> wraps(std::size_t(net.terminal_count()), 0);
        for (const auto& a : net.arcs()) {
            if (a.kind == ArcKind::ground && a.crossings > 0) ++wraps[std::size_t(net.node(a.tail).terminal)];
        }
        for (int w : wraps) CHECK(w == 1);
    }
}

TEST_CASE("stopover topology") {
    for (bool extra : {false, true}) {
        CAPTURE(extra);
        const Instance inst = stopover_instance(extra);
        const auto net = build_network(inst);
        CHECK(pickup_arcs(net).size() == 1);
        CHECK(setout_arcs(net).size() == 1);
        CHECK(count_kind(net, ArcKind::transition) == 1);
        CHECK(ground_nodes(net) == (extra ? 9 : 7));
        const auto& first = net.legs()[0];
        const auto& second = net.legs()[1];
        CHECK(net.is_setout(net.arc(first.arrival_ground_arc)));
        CHECK_FALSE(net.is_pickup(net.arc(first.ground_departure_arc)));
        CHECK(net.is_pickup(net.arc(second.ground_departure_arc)));
        CHECK_FALSE(net.is_setout(net.arc(second.arrival_ground_arc)));
        const auto& transition = net.arc(first.transition_out);
        CHECK(transition.kind == ArcKind::transition);
        CHECK(transition.flags.has_value());
        CHECK(transition.flags->pu);
        check_time_identity(net);
    }
}

TEST_CASE("arcs_of_kind orders by tail terminal then time") {
    const auto net = build_network(generate_synthetic(3, 4, 6, 2));
    const auto ids = arcs_of_kind(net, ArcKind::train);
    CHECK(ids.size() == net.legs().size());
    for (std::size_t i = 1; i < ids.size(); ++i) {
        const auto& p = net.node(net.arc(ids[i - 1]).tail);
        const auto& q = net.node(net.arc(ids[i]).tail);
        CHECK(std::make_pair(p.terminal, p.time) <= std::make_pair(q.terminal, q.time));
    }
}

TEST_CASE("time identity holds with light arcs merged") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Instance inst = generate_synthetic(seed, 4, 6, 2);
        const auto base = build_network(inst);
        check_time_identity(merge_light_arcs(base, enumerate_full_arcs(base, inst)));
        check_time_identity(merge_light_arcs(base, reduce_exact(base, inst)));
    }
}
