#ifndef RAILPLAN_SPACETIME_HPP
#define RAILPLAN_SPACETIME_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "railplan/instance.hpp"

namespace railplan {

using NodeId = int;
using ArcId = int;

enum class NodeKind { departure, arrival, initial, ground_departure, arrival_ground };
enum class ArcKind { train, transition, ground_departure, arrival_ground, ground, light };

const char* to_string(NodeKind kind);
const char* to_string(ArcKind kind);

struct Node {
    NodeId id = -1;
    NodeKind kind = NodeKind::initial;
    TerminalIndex terminal = 0;
    Minutes time = 0;
    int leg = -1;  // owning leg for non-initial nodes

    bool is_ground() const {
        return kind == NodeKind::initial || kind == NodeKind::ground_departure || kind == NodeKind::arrival_ground;
    }
};

/// An arc spans `duration` minutes from its tail; `crossings` counts how many
/// times that interval passes the week boundary. Arcs with crossings > 0 form S.
struct Arc {
    ArcId id = -1;
    ArcKind kind = ArcKind::ground;
    NodeId tail = -1;
    NodeId head = -1;
    Minutes duration = 0;
    Minutes travel = 0;  // moving time; light arcs add waiting on top of it
    bool wrap = false;
    int crossings = 0;
    int leg = -1;    // train, ground-departure, arrival-ground and (outbound leg of) transition arcs
    int power = 0;   // b_l on train arcs
    std::optional<RailcarFlags> flags;  // transition arcs
    double fixed_cost = 0.0;  // e_l on light arcs
    double unit_cost = 0.0;   // g_l on train and light arcs
};

/// Leg bookkeeping, indexed in train order then sequence order.
struct LegInfo {
    int train = -1;
    int seq = 1;
    int legs_in_train = 1;
    TrainLeg data;
    NodeId departure = -1;
    NodeId arrival = -1;
    NodeId ground_departure = -1;
    NodeId arrival_ground = -1;
    ArcId train_arc = -1;
    ArcId ground_departure_arc = -1;
    ArcId arrival_ground_arc = -1;
    ArcId transition_out = -1;  // transition from this leg's arrival to the next leg
};

/// Whether an activity starting at `tail_time` and lasting `duration` reaches the week boundary.
bool classify_wrap(Minutes tail_time, Minutes head_time, Minutes duration, Minutes horizon = kWeekMinutes);

/// Number of week boundaries passed by an activity starting at `tail_time`.
int boundary_crossings(Minutes tail_time, Minutes duration, Minutes horizon = kWeekMinutes);

class SpaceTimeNetwork {
public:
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    const std::vector<LegInfo>& legs() const { return legs_; }
    const Node& node(NodeId id) const { return nodes_.at(std::size_t(id)); }
    const Arc& arc(ArcId id) const { return arcs_.at(std::size_t(id)); }
    const std::vector<ArcId>& in_arcs(NodeId n) const { return in_.at(std::size_t(n)); }
    const std::vector<ArcId>& out_arcs(NodeId n) const { return out_.at(std::size_t(n)); }
    /// Ground nodes of a terminal in cycle order, starting at its initial node.
    const std::vector<NodeId>& ground_chain(TerminalIndex k) const { return chains_.at(std::size_t(k)); }
    NodeId initial_node(TerminalIndex k) const { return chains_.at(std::size_t(k)).front(); }

    Minutes horizon() const { return horizon_; }
    int terminal_count() const { return int(chains_.size()); }
    int train_count() const { return train_count_; }

    bool is_pickup(const Arc& a) const;
    bool is_setout(const Arc& a) const;

    /// Appends a light-travel arc; returns its id.
    ArcId add_light_arc(NodeId tail, NodeId head, Minutes travel, double fixed_cost, double unit_cost);

    friend SpaceTimeNetwork build_network(const Instance& inst);

private:
    NodeId add_node(NodeKind kind, TerminalIndex k, Minutes time, int leg);
    ArcId add_arc(Arc arc);

    std::vector<Node> nodes_;
    std::vector<Arc> arcs_;
    std::vector<LegInfo> legs_;
    std::vector<std::vector<ArcId>> in_;
    std::vector<std::vector<ArcId>> out_;
    std::vector<std::vector<NodeId>> chains_;
    Minutes horizon_ = kWeekMinutes;
    int train_count_ = 0;
};

SpaceTimeNetwork build_network(const Instance& inst);

/// Arcs of one kind, optionally filtered, ordered by tail terminal, tail time, then id.
std::vector<ArcId> arcs_of_kind(const SpaceTimeNetwork& net, ArcKind kind,
                                const std::function<bool(const Arc&)>& predicate = {});

std::vector<ArcId> pickup_arcs(const SpaceTimeNetwork& net);
std::vector<ArcId> setout_arcs(const SpaceTimeNetwork& net);

/// Debug dump with nodes and arcs in id order.
nlohmann::json network_to_json(const SpaceTimeNetwork& net, const Instance& inst);

}  // namespace railplan

#endif  // RAILPLAN_SPACETIME_HPP
