#include "railplan/lighttravel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <tuple>

namespace railplan {

LtMethod parse_lt_method(const std::string& name) {
    if (name == "exact") return LtMethod::exact;
    if (name == "mcf") return LtMethod::mcf;
    if (name == "full") return LtMethod::full;
    if (name == "none") return LtMethod::none;
    throw std::invalid_argument("unknown light-travel method '" + name + "'");
}

const char* to_string(LtMethod method) {
    switch (method) {
        case LtMethod::exact: return "exact";
        case LtMethod::mcf: return "mcf";
        case LtMethod::full: return "full";
        case LtMethod::none: return "none";
    }
    return "?";
}

namespace {

/// First node of the chain at `k` whose time is at or after `arrival` (cyclically)
/// and satisfies `eligible`; -1 if the chain has no eligible node.
template <class Pred>
NodeId first_reachable(const SpaceTimeNetwork& net, TerminalIndex k, Minutes arrival, Pred eligible) {
    const Minutes t = wrap_time(arrival, net.horizon());
    NodeId first_in_cycle = -1;
    for (NodeId n : net.ground_chain(k)) {
        const Node& node = net.node(n);
        if (!eligible(node)) continue;
        if (first_in_cycle < 0) first_in_cycle = n;
        if (node.time >= t) return n;
    }
    return first_in_cycle;
}

LightArcSpec make_spec(const SpaceTimeNetwork& net, const Instance& inst, NodeId tail, NodeId head, Minutes travel) {
    const Node& from = net.node(tail);
    const Node& to = net.node(head);
    LightArcSpec spec;
    spec.tail = tail;
    spec.head = head;
    spec.travel = travel;
    spec.duration = travel + wrap_time(to.time - from.time - travel, net.horizon());
    spec.crossings = boundary_crossings(from.time, spec.duration, net.horizon());
    spec.wrap = spec.crossings > 0;
    spec.fixed_cost = inst.costs.e_rate * double(travel);
    spec.unit_cost = inst.costs.g_rate * double(travel);
    return spec;
}

std::vector<int> chain_positions(const SpaceTimeNetwork& net) {
    std::vector<int> pos(net.nodes().size(), -1);
    for (TerminalIndex k = 0; k < net.terminal_count(); ++k) {
        const auto& chain = net.ground_chain(k);
        for (std::size_t i = 0; i < chain.size(); ++i) pos[std::size_t(chain[i])] = int(i);
    }
    return pos;
}

void sort_specs(const SpaceTimeNetwork& net, std::vector<LightArcSpec>& arcs) {
    auto pos = chain_positions(net);
    std::sort(arcs.begin(), arcs.end(), [&](const LightArcSpec& a, const LightArcSpec& b) {
        const Node& ta = net.node(a.tail);
        const Node& tb = net.node(b.tail);
        return std::tuple(ta.terminal, pos[std::size_t(a.tail)], net.node(a.head).terminal, a.head) <
               std::tuple(tb.terminal, pos[std::size_t(b.tail)], net.node(b.head).terminal, b.head);
    });
}

}  // namespace

std::vector<LightArcSpec> enumerate_full_arcs(const SpaceTimeNetwork& net, const Instance& inst, int ground_node_cap) {
    int ground_nodes = 0;
    for (const auto& n : net.nodes()) ground_nodes += n.is_ground() ? 1 : 0;
    if (ground_nodes > ground_node_cap) {
        throw LightTravelError("full light-travel enumeration refused: " + std::to_string(ground_nodes) +
                               " ground nodes exceed the cap of " + std::to_string(ground_node_cap));
    }
    std::vector<LightArcSpec> out;
    for (const auto& n : net.nodes()) {
        if (!n.is_ground()) continue;
        for (TerminalIndex k = 0; k < net.terminal_count(); ++k) {
            if (k == n.terminal) continue;
            auto delta = inst.transit.find(n.terminal, k);
            if (!delta) continue;
            NodeId head = first_reachable(net, k, n.time + *delta, [](const Node&) { return true; });
            if (head >= 0) out.push_back(make_spec(net, inst, n.id, head, *delta));
        }
    }
    sort_specs(net, out);
    return out;
}

std::vector<LightArcSpec> reduce_exact(const SpaceTimeNetwork& net, const Instance& inst) {
    auto pos = chain_positions(net);
    // (origin terminal, head node) -> retained arc
    std::map<std::pair<TerminalIndex, NodeId>, LightArcSpec> best;
    for (const auto& n : net.nodes()) {
        if (n.kind != NodeKind::arrival_ground) continue;
        for (TerminalIndex k = 0; k < net.terminal_count(); ++k) {
            if (k == n.terminal) continue;
            auto delta = inst.transit.find(n.terminal, k);
            if (!delta) continue;
            NodeId head = first_reachable(net, k, n.time + *delta,
                                          [](const Node& m) { return m.kind == NodeKind::ground_departure; });
            if (head < 0) continue;
            LightArcSpec spec = make_spec(net, inst, n.id, head, *delta);
            auto key = std::pair(n.terminal, head);
            auto it = best.find(key);
            if (it == best.end()) {
                best.emplace(key, spec);
                continue;
            }
            // latest origin = least waiting before the head; equal times resolve to the later chain position
            const LightArcSpec& cur = it->second;
            if (spec.duration < cur.duration ||
                (spec.duration == cur.duration && pos[std::size_t(spec.tail)] > pos[std::size_t(cur.tail)])) {
                it->second = spec;
            }
        }
    }
    std::vector<LightArcSpec> out;
    out.reserve(best.size());
    for (auto& [key, spec] : best) out.push_back(spec);
    sort_specs(net, out);
    return out;
}

SpaceTimeNetwork merge_light_arcs(const SpaceTimeNetwork& net, const std::vector<LightArcSpec>& arcs) {
    SpaceTimeNetwork merged = net;
    for (const auto& spec : arcs) merged.add_light_arc(spec.tail, spec.head, spec.travel, spec.fixed_cost, spec.unit_cost);
    return merged;
}

// ---------------------------------------------------------------------------

double mcf_cost(double delta, std::int64_t trips, double alpha) {
    if (!(delta > 0)) throw std::invalid_argument("mcf_cost: delta must be positive");
    if (trips < 0) throw std::invalid_argument("mcf_cost: trip count must be non-negative");
    if (!(alpha > 2)) throw std::invalid_argument("mcf_cost: alpha must exceed 2");
    if (trips <= 2) return delta;
    if (double(trips) < alpha) return delta * alpha;
    return delta * alpha * alpha;
}

McfProblem build_mcf(const Instance& inst, std::optional<double> alpha) {
    McfProblem p;
    p.supplies = net_power_balance(inst);
    const int nk = inst.terminal_count();

    std::map<TerminalPair, std::int64_t> undirected;
    for (const auto& t : inst.trains) {
        for (const auto& l : t.legs) undirected[{std::min(l.from, l.to), std::max(l.from, l.to)}] += 1;
    }
    if (alpha) {
        p.alpha = *alpha;
    } else {
        double sum = 0.0;
        int count = 0;
        for (const auto& [pair, n] : undirected) {
            if (n > 0) {
                sum += double(n);
                ++count;
            }
        }
        double mean = count > 0 ? sum / count : 0.0;
        p.alpha = mean > 2.0 ? mean : kMinMcfAlpha;
    }

    for (TerminalIndex i = 0; i < nk; ++i) {
        for (TerminalIndex j = 0; j < nk; ++j) {
            if (i == j) continue;
            auto delta = inst.transit.find(i, j);
            if (!delta) continue;
            auto it = undirected.find({std::min(i, j), std::max(i, j)});
            std::int64_t o = it == undirected.end() ? 0 : it->second;
            p.distance[{i, j}] = *delta;
            p.trips[{i, j}] = o;
            p.cost[{i, j}] = mcf_cost(double(*delta), o, p.alpha);
        }
    }
    return p;
}

namespace {

struct ResidualArc {
    int from;
    int to;
    double cost;
    std::int64_t capacity;  // -1 = unbounded
    TerminalPair original;
    bool reverse;
};

std::vector<ResidualArc> residual_arcs(const McfProblem& p, const std::map<TerminalPair, std::int64_t>& flow) {
    std::vector<ResidualArc> arcs;
    for (const auto& [pair, c] : p.cost) arcs.push_back({pair.first, pair.second, c, -1, pair, false});
    for (const auto& [pair, x] : flow) {
        if (x > 0) arcs.push_back({pair.second, pair.first, -p.cost.at(pair), x, pair, true});
    }
    return arcs;
}

constexpr double kCostEps = 1e-9;

}  // namespace

McfFlow solve_mcf(const McfProblem& p) {
    const int n = int(p.supplies.size());
    std::int64_t total = 0;
    for (auto s : p.supplies) total += s;
    if (total != 0) throw std::invalid_argument("solve_mcf: supplies must sum to zero");

    std::vector<std::int64_t> excess = p.supplies;
    std::map<TerminalPair, std::int64_t> flow;

    for (int s = 0; s < n; ++s) {
        while (excess[std::size_t(s)] > 0) {
            auto arcs = residual_arcs(p, flow);
            const double inf = std::numeric_limits<double>::infinity();
            std::vector<double> dist(std::size_t(n), inf);
            std::vector<int> via(std::size_t(n), -1);
            dist[std::size_t(s)] = 0.0;
            for (int round = 0; round < n; ++round) {
                bool changed = false;
                for (std::size_t a = 0; a < arcs.size(); ++a) {
                    const auto& arc = arcs[a];
                    if (dist[std::size_t(arc.from)] == inf) continue;
                    double d = dist[std::size_t(arc.from)] + arc.cost;
                    if (d < dist[std::size_t(arc.to)] - kCostEps) {
                        dist[std::size_t(arc.to)] = d;
                        via[std::size_t(arc.to)] = int(a);
                        changed = true;
                    }
                }
                if (!changed) break;
            }
            int sink = -1;
            for (int t = 0; t < n; ++t) {
                if (excess[std::size_t(t)] >= 0 || dist[std::size_t(t)] == inf) continue;
                if (sink < 0 || dist[std::size_t(t)] < dist[std::size_t(sink)] - kCostEps) sink = t;
            }
            if (sink < 0) {
                throw std::runtime_error("solve_mcf: terminal " + std::to_string(s) +
                                         " cannot reach any deficit terminal; transit entries are missing");
            }
            std::int64_t amount = std::min(excess[std::size_t(s)], -excess[std::size_t(sink)]);
            for (int v = sink; v != s; v = arcs[std::size_t(via[std::size_t(v)])].from) {
                const auto& arc = arcs[std::size_t(via[std::size_t(v)])];
                if (arc.capacity >= 0) amount = std::min(amount, arc.capacity);
            }
            for (int v = sink; v != s; v = arcs[std::size_t(via[std::size_t(v)])].from) {
                const auto& arc = arcs[std::size_t(via[std::size_t(v)])];
                flow[arc.original] += arc.reverse ? -amount : amount;
            }
            excess[std::size_t(s)] -= amount;
            excess[std::size_t(sink)] += amount;
        }
    }

    McfFlow out;
    for (const auto& [pair, x] : flow) {
        if (x <= 0) continue;
        auto back = flow.find({pair.second, pair.first});
        std::int64_t opposite = back == flow.end() ? 0 : back->second;
        std::int64_t net = x - std::max<std::int64_t>(opposite, 0);
        if (net > 0) out.flow[pair] = net;
    }
    for (const auto& [pair, x] : out.flow) out.cost += double(x) * p.cost.at(pair);
    return out;
}

bool mcf_optimality_certificate(const McfProblem& p, const McfFlow& f) {
    const int n = int(p.supplies.size());
    std::vector<std::int64_t> balance(std::size_t(n), 0);
    for (const auto& [pair, x] : f.flow) {
        if (x < 0 || !p.cost.count(pair)) return false;
        balance[std::size_t(pair.first)] += x;
        balance[std::size_t(pair.second)] -= x;
    }
    for (int i = 0; i < n; ++i) {
        if (balance[std::size_t(i)] != p.supplies[std::size_t(i)]) return false;
    }
    // Potentials from a virtual root; a further improving pass means a negative residual cycle.
    auto arcs = residual_arcs(p, f.flow);
    std::vector<double> pi(std::size_t(n), 0.0);
    for (int round = 0; round <= n; ++round) {
        bool changed = false;
        for (const auto& arc : arcs) {
            if (pi[std::size_t(arc.from)] + arc.cost < pi[std::size_t(arc.to)] - kCostEps) {
                pi[std::size_t(arc.to)] = pi[std::size_t(arc.from)] + arc.cost;
                changed = true;
            }
        }
        if (!changed) return true;
    }
    return false;
}

int borrow_window(const std::vector<bool>& occupied, int w) {
    const int count = int(occupied.size());
    if (occupied[std::size_t(w)]) return w;
    int best = -1;
    int best_distance = 0;
    for (int v = 0; v < count; ++v) {
        if (!occupied[std::size_t(v)]) continue;
        int d = std::abs(v - w);
        d = std::min(d, count - d);
        if (best < 0 || d < best_distance) {
            best = v;
            best_distance = d;
        }
    }
    return best;
}

std::vector<LightArcSpec> mcf_insert_arcs(const SpaceTimeNetwork& net, const Instance& inst, const McfFlow& flow,
                                          const McfInsertOptions& options, std::vector<std::string>* warnings) {
    if (options.window <= 0) throw std::invalid_argument("mcf_insert_arcs: window must be positive");
    const Minutes H = net.horizon();
    const int windows = int((H + options.window - 1) / options.window);
    std::vector<LightArcSpec> out;

    for (const auto& [pair, units] : flow.flow) {
        if (units <= options.threshold) continue;
        const auto [i, j] = pair;
        auto delta = inst.transit.find(i, j);
        if (!delta) continue;

        // earliest ground node of the origin in each window
        std::vector<NodeId> earliest(std::size_t(windows), -1);
        std::vector<bool> occupied(std::size_t(windows), false);
        for (NodeId n : net.ground_chain(i)) {
            int w = int(net.node(n).time / options.window);
            if (!occupied[std::size_t(w)]) {
                occupied[std::size_t(w)] = true;
                earliest[std::size_t(w)] = n;
            }
        }
        if (std::none_of(occupied.begin(), occupied.end(), [](bool b) { return b; }) ||
            net.ground_chain(j).empty()) {
            if (warnings) warnings->push_back("no ground nodes for OD pair " + std::to_string(i) + "->" + std::to_string(j));
            continue;
        }
        std::vector<NodeId> tails;
        for (int w = 0; w < windows; ++w) {
            NodeId tail = earliest[std::size_t(borrow_window(occupied, w))];
            if (std::find(tails.begin(), tails.end(), tail) == tails.end()) tails.push_back(tail);
        }
        for (NodeId tail : tails) {
            NodeId head = first_reachable(net, j, net.node(tail).time + *delta, [](const Node&) { return true; });
            if (head >= 0) out.push_back(make_spec(net, inst, tail, head, *delta));
        }
    }
    sort_specs(net, out);
    return out;
}

std::vector<LightArcSpec> generate_light_arcs(const SpaceTimeNetwork& net, const Instance& inst,
                                              const LightTravelOptions& options) {
    switch (options.method) {
        case LtMethod::exact: return reduce_exact(net, inst);
        case LtMethod::full: return enumerate_full_arcs(net, inst, options.enumeration_cap);
        case LtMethod::mcf: {
            auto problem = build_mcf(inst, options.mcf_alpha);
            return mcf_insert_arcs(net, inst, solve_mcf(problem), options.mcf);
        }
        case LtMethod::none: return {};
    }
    return {};
}

}  // namespace railplan
