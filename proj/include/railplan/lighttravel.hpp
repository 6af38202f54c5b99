#ifndef RAILPLAN_LIGHTTRAVEL_HPP
#define RAILPLAN_LIGHTTRAVEL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "railplan/instance.hpp"
#include "railplan/spacetime.hpp"

namespace railplan {

/// A light-travel candidate between ground nodes of two terminals.
struct LightArcSpec {
    NodeId tail = -1;
    NodeId head = -1;
    Minutes travel = 0;    // transit time between the terminals
    Minutes duration = 0;  // travel plus waiting for the head node
    bool wrap = false;
    int crossings = 0;
    double fixed_cost = 0.0;  // e_l
    double unit_cost = 0.0;   // g_l

    bool operator==(const LightArcSpec&) const = default;
};

enum class LtMethod { exact, mcf, full, none };

LtMethod parse_lt_method(const std::string& name);
const char* to_string(LtMethod method);

class LightTravelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultEnumerationCap = 200;

/// Every ground node to the first ground node reachable at each other terminal.
/// Throws LightTravelError when the network has more than `ground_node_cap` ground nodes.
std::vector<LightArcSpec> enumerate_full_arcs(const SpaceTimeNetwork& net, const Instance& inst,
                                              int ground_node_cap = kDefaultEnumerationCap);

/// Earliest reachability from arrival-ground nodes followed by latest-origin filtering.
std::vector<LightArcSpec> reduce_exact(const SpaceTimeNetwork& net, const Instance& inst);

/// Copy of `net` with the given light arcs appended.
SpaceTimeNetwork merge_light_arcs(const SpaceTimeNetwork& net, const std::vector<LightArcSpec>& arcs);

// ---------------------------------------------------------------------------
// Minimum-cost-flow heuristic

using TerminalPair = std::pair<TerminalIndex, TerminalIndex>;

/// Penalised light-travel cost on the aggregated space network.
/// Throws std::invalid_argument unless delta > 0, trips >= 0 and alpha > 2.
double mcf_cost(double delta, std::int64_t trips, double alpha);

struct McfProblem {
    std::vector<std::int64_t> supplies;          // surplus > 0 (source), deficit < 0 (sink)
    std::map<TerminalPair, Minutes> distance;    // transit minutes as the distance proxy
    std::map<TerminalPair, std::int64_t> trips;  // o_ij, legs in either direction
    std::map<TerminalPair, double> cost;         // e_ij
    double alpha = 3.0;
};

/// The smallest admissible penalty factor when the trip mean does not exceed 2.
inline constexpr double kMinMcfAlpha = 3.0;

McfProblem build_mcf(const Instance& inst, std::optional<double> alpha = std::nullopt);

struct McfFlow {
    std::map<TerminalPair, std::int64_t> flow;
    double cost = 0.0;
};

/// Successive shortest paths; sources are served in terminal order.
McfFlow solve_mcf(const McfProblem& problem);

/// Flow balance plus the absence of negative residual cycles.
bool mcf_optimality_certificate(const McfProblem& problem, const McfFlow& flow);

struct McfInsertOptions {
    Minutes window = 480;
    std::int64_t threshold = 1;  // strict: flow must exceed it
};

std::vector<LightArcSpec> mcf_insert_arcs(const SpaceTimeNetwork& net, const Instance& inst, const McfFlow& flow,
                                          const McfInsertOptions& options = {},
                                          std::vector<std::string>* warnings = nullptr);

/// Window index that supplies origins for window `w`: itself when occupied, otherwise the
/// nearest occupied window in cyclic distance, earlier index on ties. -1 when none is occupied.
int borrow_window(const std::vector<bool>& occupied, int w);

struct LightTravelOptions {
    LtMethod method = LtMethod::exact;
    McfInsertOptions mcf;
    std::optional<double> mcf_alpha;
    int enumeration_cap = kDefaultEnumerationCap;
};

std::vector<LightArcSpec> generate_light_arcs(const SpaceTimeNetwork& net, const Instance& inst,
                                              const LightTravelOptions& options);

}  // namespace railplan

#endif  // RAILPLAN_LIGHTTRAVEL_HPP
