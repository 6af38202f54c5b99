#include "railplan/spacetime.hpp"

#include <algorithm>
#include <stdexcept>

namespace railplan {

const char* to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::departure: return "departure";
        case NodeKind::arrival: return "arrival";
        case NodeKind::initial: return "initial";
        case NodeKind::ground_departure: return "ground_departure";
        case NodeKind::arrival_ground: return "arrival_ground";
    }
    return "?";
}

const char* to_string(ArcKind kind) {
    switch (kind) {
        case ArcKind::train: return "train";
        case ArcKind::transition: return "transition";
        case ArcKind::ground_departure: return "ground_departure";
        case ArcKind::arrival_ground: return "arrival_ground";
        case ArcKind::ground: return "ground";
        case ArcKind::light: return "light";
    }
    return "?";
}

bool classify_wrap(Minutes tail_time, Minutes /*head_time*/, Minutes duration, Minutes horizon) {
    return tail_time + duration >= horizon;
}

int boundary_crossings(Minutes tail_time, Minutes duration, Minutes horizon) {
    return int((tail_time + duration) / horizon);
}

bool SpaceTimeNetwork::is_pickup(const Arc& a) const {
    return a.kind == ArcKind::ground_departure && legs_.at(std::size_t(a.leg)).seq > 1;
}

bool SpaceTimeNetwork::is_setout(const Arc& a) const {
    if (a.kind != ArcKind::arrival_ground) return false;
    const auto& leg = legs_.at(std::size_t(a.leg));
    return leg.seq < leg.legs_in_train;
}

NodeId SpaceTimeNetwork::add_node(NodeKind kind, TerminalIndex k, Minutes time, int leg) {
    Node n;
    n.id = NodeId(nodes_.size());
    n.kind = kind;
    n.terminal = k;
    n.time = time;
    n.leg = leg;
    nodes_.push_back(n);
    in_.emplace_back();
    out_.emplace_back();
    return n.id;
}

ArcId SpaceTimeNetwork::add_arc(Arc arc) {
    arc.id = ArcId(arcs_.size());
    arc.crossings = boundary_crossings(nodes_[std::size_t(arc.tail)].time, arc.duration, horizon_);
    arc.wrap = arc.crossings > 0;
    out_[std::size_t(arc.tail)].push_back(arc.id);
    in_[std::size_t(arc.head)].push_back(arc.id);
    arcs_.push_back(std::move(arc));
    return arcs_.back().id;
}

ArcId SpaceTimeNetwork::add_light_arc(NodeId tail, NodeId head, Minutes travel, double fixed_cost, double unit_cost) {
    const Node& from = node(tail);
    const Node& to = node(head);
    if (!from.is_ground() || !to.is_ground()) throw std::invalid_argument("light arcs connect ground nodes");
    if (from.terminal == to.terminal) throw std::invalid_argument("light arcs connect distinct terminals");
    Arc a;
    a.kind = ArcKind::light;
    a.tail = tail;
    a.head = head;
    a.travel = travel;
    // travel, then wait for the next occurrence of the head's clock time
    a.duration = travel + wrap_time(to.time - from.time - travel, horizon_);
    a.fixed_cost = fixed_cost;
    a.unit_cost = unit_cost;
    return add_arc(std::move(a));
}

SpaceTimeNetwork build_network(const Instance& inst) {
    SpaceTimeNetwork net;
    const Minutes H = inst.costs.horizon;
    net.horizon_ = H;
    net.train_count_ = int(inst.trains.size());
    const int nk = inst.terminal_count();

    for (TerminalIndex k = 0; k < nk; ++k) net.add_node(NodeKind::initial, k, 0, -1);

    for (std::size_t t = 0; t < inst.trains.size(); ++t) {
        const auto& train = inst.trains[t];
        for (const auto& leg : train.legs) {
            LegInfo info;
            info.train = int(t);
            info.seq = leg.seq;
            info.legs_in_train = int(train.legs.size());
            info.data = leg;
            const int li = int(net.legs_.size());
            info.departure = net.add_node(NodeKind::departure, leg.from, leg.dep, li);
            info.arrival = net.add_node(NodeKind::arrival, leg.to, leg.arr, li);
            info.ground_departure = net.add_node(NodeKind::ground_departure, leg.from, wrap_time(leg.dep - inst.costs.prep, H), li);
            info.arrival_ground = net.add_node(NodeKind::arrival_ground, leg.to, wrap_time(leg.arr + inst.costs.inspect, H), li);
            net.legs_.push_back(info);
        }
    }

    for (std::size_t li = 0; li < net.legs_.size(); ++li) {
        auto& info = net.legs_[li];
        const auto& leg = info.data;
        const Minutes travel = wrap_time(leg.arr - leg.dep, H);

        Arc train;
        train.kind = ArcKind::train;
        train.tail = info.departure;
        train.head = info.arrival;
        train.duration = travel;
        train.travel = travel;
        train.leg = int(li);
        train.power = leg.power;
        train.unit_cost = inst.costs.g_rate * double(travel);
        info.train_arc = net.add_arc(std::move(train));

        Arc prep;
        prep.kind = ArcKind::ground_departure;
        prep.tail = info.ground_departure;
        prep.head = info.departure;
        prep.duration = inst.costs.prep;
        prep.travel = inst.costs.prep;
        prep.leg = int(li);
        info.ground_departure_arc = net.add_arc(std::move(prep));

        Arc inspect;
        inspect.kind = ArcKind::arrival_ground;
        inspect.tail = info.arrival;
        inspect.head = info.arrival_ground;
        inspect.duration = inst.costs.inspect;
        inspect.travel = inst.costs.inspect;
        inspect.leg = int(li);
        info.arrival_ground_arc = net.add_arc(std::move(inspect));
    }

    for (std::size_t li = 0; li + 1 < net.legs_.size(); ++li) {
        auto& cur = net.legs_[li];
        const auto& next = net.legs_[li + 1];
        if (cur.train != next.train) continue;
        const auto& train = inst.trains[std::size_t(cur.train)];
        Arc c;
        c.kind = ArcKind::transition;
        c.tail = cur.arrival;
        c.head = next.departure;
        c.duration = wrap_time(next.data.dep - cur.data.arr, H);
        c.travel = c.duration;
        c.leg = int(li);
        auto it = train.stops.find(cur.seq);
        if (it != train.stops.end()) c.flags = it->second;
        cur.transition_out = net.add_arc(std::move(c));
    }

    // Ground chains: initial first, then by time; at equal times arrival-ground
    // precedes ground-departure so a unit finishing inspection can leave at once.
    auto rank = [](NodeKind kind) {
        switch (kind) {
            case NodeKind::initial: return 0;
            case NodeKind::arrival_ground: return 1;
            default: return 2;
        }
    };
    net.chains_.assign(std::size_t(nk), {});
    for (const auto& n : net.nodes_) {
        if (n.is_ground()) net.chains_[std::size_t(n.terminal)].push_back(n.id);
    }
    for (auto& chain : net.chains_) {
        std::sort(chain.begin(), chain.end(), [&](NodeId a, NodeId b) {
            const Node& na = net.nodes_[std::size_t(a)];
            const Node& nb = net.nodes_[std::size_t(b)];
            if (rank(na.kind) == 0 || rank(nb.kind) == 0) return rank(na.kind) < rank(nb.kind);
            if (na.time != nb.time) return na.time < nb.time;
            if (rank(na.kind) != rank(nb.kind)) return rank(na.kind) < rank(nb.kind);
            return a < b;
        });
        for (std::size_t i = 0; i < chain.size(); ++i) {
            Arc g;
            g.kind = ArcKind::ground;
            g.tail = chain[i];
            if (i + 1 < chain.size()) {
                g.head = chain[i + 1];
                g.duration = net.nodes_[std::size_t(g.head)].time - net.nodes_[std::size_t(g.tail)].time;
            } else {
                g.head = chain.front();
                g.duration = H - net.nodes_[std::size_t(g.tail)].time;
            }
            g.travel = g.duration;
            net.add_arc(std::move(g));
        }
    }
    return net;
}

std::vector<ArcId> arcs_of_kind(const SpaceTimeNetwork& net, ArcKind kind,
                                const std::function<bool(const Arc&)>& predicate) {
    std::vector<ArcId> out;
    for (const auto& a : net.arcs()) {
        if (a.kind == kind && (!predicate || predicate(a))) out.push_back(a.id);
    }
    std::sort(out.begin(), out.end(), [&](ArcId x, ArcId y) {
        const Node& tx = net.node(net.arc(x).tail);
        const Node& ty = net.node(net.arc(y).tail);
        if (tx.terminal != ty.terminal) return tx.terminal < ty.terminal;
        if (tx.time != ty.time) return tx.time < ty.time;
        return x < y;
    });
    return out;
}

std::vector<ArcId> pickup_arcs(const SpaceTimeNetwork& net) {
    return arcs_of_kind(net, ArcKind::ground_departure, [&](const Arc& a) { return net.is_pickup(a); });
}

std::vector<ArcId> setout_arcs(const SpaceTimeNetwork& net) {
    return arcs_of_kind(net, ArcKind::arrival_ground, [&](const Arc& a) { return net.is_setout(a); });
}

nlohmann::json network_to_json(const SpaceTimeNetwork& net, const Instance& inst) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : net.nodes()) {
        nodes.push_back({{"id", n.id},
                         {"kind", to_string(n.kind)},
                         {"terminal", inst.terminals.at(std::size_t(n.terminal)).id},
                         {"time", n.time},
                         {"leg", n.leg}});
    }
    nlohmann::json arcs = nlohmann::json::array();
    for (const auto& a : net.arcs()) {
        nlohmann::json j = {{"id", a.id},       {"kind", to_string(a.kind)}, {"tail", a.tail},
                            {"head", a.head},   {"duration", a.duration},    {"wrap", a.wrap},
                            {"crossings", a.crossings}};
        if (a.kind == ArcKind::train) j["b"] = a.power;
        if (a.kind == ArcKind::light) {
            j["travel"] = a.travel;
            j["e"] = a.fixed_cost;
            j["g"] = a.unit_cost;
        }
        if (net.is_pickup(a)) j["pickup"] = true;
        if (net.is_setout(a)) j["setout"] = true;
        arcs.push_back(std::move(j));
    }
    return {{"horizon", net.horizon()}, {"nodes", nodes}, {"arcs", arcs}};
}

}  // namespace railplan
