#ifndef RAILPLAN_INSTANCE_HPP
#define RAILPLAN_INSTANCE_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace railplan {

using Minutes = std::int64_t;
using TerminalIndex = int;

inline constexpr Minutes kWeekMinutes = 10080;
inline constexpr Minutes kDayMinutes = 1440;
inline constexpr int kSchemaVersion = 1;

/// Non-negative remainder of `t` modulo `horizon`.
inline Minutes wrap_time(Minutes t, Minutes horizon) {
    Minutes r = t % horizon;
    return r < 0 ? r + horizon : r;
}

struct Terminal {
    std::string id;
    std::string name;

    bool operator==(const Terminal&) const = default;
};

/// Directed transit times between terminals. Entries may be asymmetric.
class TransitTable {
public:
    void set(TerminalIndex from, TerminalIndex to, Minutes minutes) { entries_[{from, to}] = minutes; }

    std::optional<Minutes> find(TerminalIndex from, TerminalIndex to) const {
        auto it = entries_.find({from, to});
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    Minutes at(TerminalIndex from, TerminalIndex to) const;

    const std::map<std::pair<TerminalIndex, TerminalIndex>, Minutes>& entries() const { return entries_; }

    bool operator==(const TransitTable&) const = default;

private:
    std::map<std::pair<TerminalIndex, TerminalIndex>, Minutes> entries_;
};

/// Railcar activity at an intermediate stop. Exactly one flag is set in a valid instance.
struct RailcarFlags {
    bool pu = false;
    bool so = false;
    bool no = false;
    bool both = false;

    int count() const { return int(pu) + int(so) + int(no) + int(both); }
    bool operator==(const RailcarFlags&) const = default;
};

struct TrainLeg {
    int seq = 1;  // 1-based position within the train
    TerminalIndex from = 0;
    TerminalIndex to = 0;
    Minutes dep = 0;
    Minutes arr = 0;
    int power = 0;  // active locomotives required on the leg

    bool operator==(const TrainLeg&) const = default;
};

struct Train {
    std::string id;
    std::vector<TrainLeg> legs;
    // keyed by the sequence number of the leg that ends at the stop
    std::map<int, RailcarFlags> stops;

    bool operator==(const Train&) const = default;
};

struct CostParams {
    double q = 10000.0;    // weekly ownership per unit
    double c1 = 50.0;      // aligned work event
    double c2 = 100.0;     // mismatched work event
    double c3 = 200.0;     // stand-alone work event
    double e_rate = 2.0;   // light-train crew cost per transit minute
    double g_rate = 1.0;   // relocation cost per unit per transit minute
    int f = 3;             // max locomotives per train leg
    int rho_u = 2;         // max locomotives per light train
    Minutes prep = 60;     // ground-departure duration
    Minutes inspect = 120; // arrival-ground duration
    Minutes horizon = kWeekMinutes;

    bool operator==(const CostParams&) const = default;
};

/// Work events per (terminal, day) in the current operating plan.
struct BaselinePlan {
    int days = 7;
    std::map<std::pair<TerminalIndex, int>, int> events;

    int h(TerminalIndex k, int day) const {
        auto it = events.find({k, day});
        return it == events.end() ? 0 : it->second;
    }
    /// K^I membership: no events on any day.
    bool terminal_inactive(TerminalIndex k) const;
    /// KD^I membership.
    bool pair_inactive(TerminalIndex k, int day) const { return h(k, day) == 0; }

    bool operator==(const BaselinePlan&) const = default;
};

struct Instance {
    std::vector<Terminal> terminals;
    TransitTable transit;
    std::vector<Train> trains;
    CostParams costs;
    std::optional<BaselinePlan> baseline;

    int terminal_count() const { return int(terminals.size()); }
    std::size_t leg_count() const;
    std::optional<TerminalIndex> find_terminal(std::string_view id) const;
    int day_count() const;

    bool operator==(const Instance&) const = default;
};

enum class Severity { error, warning };

struct Violation {
    std::string code;
    std::string message;
    Severity severity = Severity::error;
};

/// Malformed input: bad JSON, missing or mistyped fields.
class InstanceParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Well-formed input that breaks a data invariant.
class InstanceValidationError : public std::runtime_error {
public:
    explicit InstanceValidationError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

std::vector<Violation> validate_instance(const Instance& inst);
bool has_errors(const std::vector<Violation>& violations);

Instance load_instance(const std::filesystem::path& path);
Instance parse_instance(std::string_view text);
Instance instance_from_json(const nlohmann::json& doc);
nlohmann::json instance_to_json(const Instance& inst);
void save_instance(const Instance& inst, const std::filesystem::path& path);

/// Deterministic random instance for desk-scale experiments.
Instance generate_synthetic(std::uint64_t seed, int n_terminals, int n_trains, int max_legs);

/// Arriving minus departing power per terminal, indexed by terminal.
std::vector<std::int64_t> net_power_balance(const Instance& inst);

}  // namespace railplan

#endif  // RAILPLAN_INSTANCE_HPP
