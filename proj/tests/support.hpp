// Hand-built instances shared by the unit and acceptance tests.
#ifndef RAILPLAN_TESTS_SUPPORT_HPP
#define RAILPLAN_TESTS_SUPPORT_HPP

#include <string>
#include <vector>

#include "railplan/instance.hpp"

namespace railplan::testing {

/// Terminals named A, B, C, ... with the same transit time on every ordered pair.
inline Instance uniform_instance(int terminals, Minutes transit) {
    Instance inst;
    for (int k = 0; k < terminals; ++k) {
        const std::string id(1, char('A' + k));
        inst.terminals.push_back({id, id});
    }
    for (int a = 0; a < terminals; ++a) {
        for (int b = 0; b < terminals; ++b) {
            if (a != b) inst.transit.set(a, b, transit);
        }
    }
    return inst;
}

inline RailcarFlags flags_of(const std::string& which) {
    RailcarFlags f;
    if (which == "pu") f.pu = true;
    else if (which == "so") f.so = true;
    else if (which == "both") f.both = true;
    else f.no = true;
    return f;
}

/// Appends a train through `stops` (terminal indices) with the given departures; arrival = dep + transit.
inline void add_train(Instance& inst, const std::string& id, const std::vector<TerminalIndex>& stops,
                      const std::vector<Minutes>& deps, int power, const std::string& flags = "no") {
    Train t;
    t.id = id;
    for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
        TrainLeg l;
        l.seq = int(i) + 1;
        l.from = stops[i];
        l.to = stops[i + 1];
        l.dep = deps[i];
        l.arr = wrap_time(deps[i] + inst.transit.at(l.from, l.to), inst.costs.horizon);
        l.power = power;
        t.legs.push_back(l);
        if (i + 2 < stops.size()) t.stops[l.seq] = flags_of(flags);
    }
    inst.trains.push_back(std::move(t));
}

/// Two terminals; T1 A->B leaves Monday, T2 B->A leaves Wednesday, one unit each.
inline Instance m2_instance() {
    Instance inst = uniform_instance(2, 600);
    add_train(inst, "T1", {0, 1}, {60}, 1);
    add_train(inst, "T2", {1, 0}, {2 * kDayMinutes + 60}, 1);
    return inst;
}

/// Three terminals with one two-leg train T3 -> T2 -> T1 stopping at T2.
inline Instance stopover_instance(bool with_single_leg_train = false, const std::string& flags = "pu") {
    Instance inst = uniform_instance(3, 300);
    inst.terminals = {{"T1", "T1"}, {"T2", "T2"}, {"T3", "T3"}};
    add_train(inst, "R1", {2, 1, 0}, {1000, 1500}, 1, flags);
    if (with_single_leg_train) add_train(inst, "R2", {0, 2}, {4000}, 1);
    return inst;
}

/// A->B twice a week, B->A once: one unit suffices only if it can light-travel home.
inline Instance threshold_instance() {
    Instance inst = uniform_instance(2, 600);
    add_train(inst, "AB1", {0, 1}, {0}, 1);
    add_train(inst, "BA", {1, 0}, {2000}, 1);
    add_train(inst, "AB2", {0, 1}, {5040}, 1);
    return inst;
}

/// Two A->B->A trains that must each pick up a unit left at B by a terminating train.
/// Both pick-ups fall on (B, day 0).
inline Instance event_instance() {
    Instance inst = uniform_instance(2, 300);
    add_train(inst, "IN", {0, 1}, {0}, 2);
    add_train(inst, "S1", {0, 1, 0}, {100, 1000}, 1, "pu");
    add_train(inst, "S2", {0, 1, 0}, {200, 1100}, 1, "pu");
    inst.trains[1].legs[1].power = 2;
    inst.trains[2].legs[1].power = 2;
    return inst;
}

}  // namespace railplan::testing

#endif  // RAILPLAN_TESTS_SUPPORT_HPP
