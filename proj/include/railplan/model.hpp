#ifndef RAILPLAN_MODEL_HPP
#define RAILPLAN_MODEL_HPP

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "railplan/instance.hpp"
#include "railplan/milp.hpp"
#include "railplan/spacetime.hpp"

namespace railplan {

struct ModelOptions {
    /// y_so + y_pu <= 1 at every intermediate stop.
    bool mutual_exclusion = true;
    /// Upper bound on non-train arc flows; defaults to f * |A_T|, which no optimal plan exceeds.
    std::optional<std::int64_t> flow_cap;
};

using TerminalDay = std::pair<TerminalIndex, int>;

/// The integer program together with its mapping back onto the network.
struct LapModel {
    MilpModel milp;
    std::vector<VarRef> x_of_arc;   // every arc
    std::vector<VarRef> yso_of_arc;  // -1 unless the arc is a set-out arc
    std::vector<VarRef> ypu_of_arc;  // -1 unless the arc is a pick-up arc
    std::vector<VarRef> u_of_arc;    // -1 unless the arc is a light arc
    std::map<TerminalDay, std::vector<VarRef>> event_groups;  // L_kd as work-event variables
    int terminal_count = 0;
    int day_count = 7;
    std::vector<std::string> applied;  // extension labels, base first
};

/// Work-event cost on one side of an intermediate stop.
struct RcTerm {
    ArcId transition = -1;
    ArcId arc = -1;  // set-out or pick-up arc adjacent to the stop
    bool setout = false;
    double coef = 0.0;
};

/// (set-out coefficient, pick-up coefficient) for a stop with the given railcar activity.
std::pair<double, double> rc_coefficients(const RailcarFlags& flags, const CostParams& costs);

std::vector<RcTerm> rc_penalty_terms(const SpaceTimeNetwork& net, const CostParams& costs);

/// Light arcs must already be merged into `net`.
LapModel build_base_model(const SpaceTimeNetwork& net, const CostParams& costs, const ModelOptions& options = {});

/// Day of a stop: the arrival that begins the transition.
int stop_day(const SpaceTimeNetwork& net, ArcId transition);

std::map<TerminalDay, std::vector<VarRef>> group_events_by_terminal_day(const SpaceTimeNetwork& net,
                                                                      const LapModel& model);

// ---------------------------------------------------------------------------
// Work-event restrictions

enum class ExtensionVersion { V0, V1, V1prime, V2, V3, V4, V5 };

ExtensionVersion parse_extension(const std::string& name);
const char* to_string(ExtensionVersion version);

inline constexpr int kUnboundedTheta = std::numeric_limits<int>::max();
inline constexpr int kDefaultTheta = 6;

struct ExtensionConfig {
    ExtensionVersion version = ExtensionVersion::V0;
    std::optional<int> lambda;
    std::optional<int> theta = kDefaultTheta;  // kUnboundedTheta for no daily cap
    std::optional<int> alpha_c;
    std::optional<int> alpha_d;
    std::optional<int> alpha_e;
    std::optional<int> alpha_f;
    std::optional<BaselinePlan> baseline;
};

class ExtensionConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Returns a copy of `m` with the constraint families of the chosen version added.
LapModel apply_extension(const LapModel& m, const ExtensionConfig& cfg);

class WarmStartError : public std::runtime_error {
public:
    WarmStartError(const std::string& what, std::vector<std::string> tags)
        : std::runtime_error(what), tags_(std::move(tags)) {}
    const std::vector<std::string>& tags() const { return tags_; }

private:
    std::vector<std::string> tags_;
};

/// Copy of `target` carrying `sol` (solved on `source`) as its starting assignment.
/// Values are matched by name; activation variables are set wherever the start has events.
/// Throws WarmStartError naming the violated rows when the start is infeasible.
LapModel warm_start_from(const LapModel& target, const MilpModel& source, const Solution& sol);

}  // namespace railplan

#endif  // RAILPLAN_MODEL_HPP
