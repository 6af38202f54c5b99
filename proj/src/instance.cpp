#include "railplan/instance.hpp"

#include <algorithm>
#include <type_traits>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace railplan {

using nlohmann::json;

Minutes TransitTable::at(TerminalIndex from, TerminalIndex to) const {
    auto it = entries_.find({from, to});
    if (it == entries_.end()) {
        throw std::out_of_range("no transit entry for terminal pair (" + std::to_string(from) + ", " +
                                std::to_string(to) + ")");
    }
    return it->second;
}

bool BaselinePlan::terminal_inactive(TerminalIndex k) const {
    for (const auto& [key, count] : events) {
        if (key.first == k && count > 0) return false;
    }
    return true;
}

std::size_t Instance::leg_count() const {
    std::size_t n = 0;
    for (const auto& t : trains) n += t.legs.size();
    return n;
}

std::optional<TerminalIndex> Instance::find_terminal(std::string_view id) const {
    for (std::size_t i = 0; i < terminals.size(); ++i) {
        if (terminals[i].id == id) return TerminalIndex(i);
    }
    return std::nullopt;
}

int Instance::day_count() const {
    if (baseline) return baseline->days;
    return int((costs.horizon + kDayMinutes - 1) / kDayMinutes);
}

InstanceValidationError::InstanceValidationError(std::vector<Violation> violations)
    : std::runtime_error([&] {
          std::string msg = "instance validation failed";
          for (const auto& v : violations) {
              if (v.severity == Severity::error) msg += "\n  " + v.code + ": " + v.message;
          }
          return msg;
      }()),
      violations_(std::move(violations)) {}

bool has_errors(const std::vector<Violation>& violations) {
    return std::any_of(violations.begin(), violations.end(),
                       [](const Violation& v) { return v.severity == Severity::error; });
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class ViolationSink {
public:
    void error(std::string code, std::string message) {
        out.push_back({std::move(code), std::move(message), Severity::error});
    }
    void warning(std::string code, std::string message) {
        out.push_back({std::move(code), std::move(message), Severity::warning});
    }
    std::vector<Violation> out;
};

std::string leg_name(const Train& t, const TrainLeg& l) {
    return "train " + t.id + " leg " + std::to_string(l.seq);
}

}  // namespace

std::vector<Violation> validate_instance(const Instance& inst) {
    ViolationSink sink;
    const auto& c = inst.costs;
    const int nk = inst.terminal_count();

    if (nk < 1) sink.error("NO_TERMINALS", "instance has no terminals");
    std::set<std::string> ids;
    for (const auto& t : inst.terminals) {
        if (!ids.insert(t.id).second) sink.error("DUPLICATE_TERMINAL", "terminal id '" + t.id + "' repeated");
    }

    if (c.horizon <= 0) sink.error("HORIZON_INVALID", "horizon must be positive");
    if (c.q < 0 || c.c1 < 0 || c.c2 < 0 || c.c3 < 0 || c.e_rate < 0 || c.g_rate < 0) {
        sink.error("NEGATIVE_COST", "all cost parameters must be non-negative");
    }
    if (!(c.c1 <= c.c2 && c.c2 <= c.c3)) sink.error("COST_ORDER", "work-event costs must satisfy c1 <= c2 <= c3");
    if (c.rho_u < 1) sink.error("RHO_U_INVALID", "rho_u must be at least 1");
    if (c.f < 0) sink.error("CAP_INVALID", "f must be non-negative");
    if (c.prep < 0 || c.prep >= c.horizon) sink.error("DURATION_INVALID", "prep must lie in [0, horizon)");
    if (c.inspect < 0 || c.inspect >= c.horizon) sink.error("DURATION_INVALID", "inspect must lie in [0, horizon)");

    for (const auto& [key, minutes] : inst.transit.entries()) {
        if (key.first < 0 || key.first >= nk || key.second < 0 || key.second >= nk) {
            sink.error("UNKNOWN_TERMINAL", "transit entry references an unknown terminal");
            continue;
        }
        if (minutes <= 0 || minutes >= c.horizon) {
            sink.error("TRANSIT_INVALID", "transit " + inst.terminals[key.first].id + "->" +
                                              inst.terminals[key.second].id + " must lie in (0, horizon)");
        }
    }

    std::set<std::string> train_ids;
    for (const auto& t : inst.trains) {
        if (!train_ids.insert(t.id).second) sink.error("DUPLICATE_TRAIN", "train id '" + t.id + "' repeated");
        if (t.legs.empty()) sink.error("EMPTY_TRAIN", "train " + t.id + " has no legs");
        for (std::size_t i = 0; i < t.legs.size(); ++i) {
            const auto& l = t.legs[i];
            const std::string name = leg_name(t, l);
            if (l.seq != int(i) + 1) {
                sink.error("LEGS_NOT_CONTIGUOUS", "train " + t.id + ": sequence indices must run 1..s_t");
            }
            if (l.from < 0 || l.from >= nk || l.to < 0 || l.to >= nk) {
                sink.error("UNKNOWN_TERMINAL", name + " references an unknown terminal");
                continue;
            }
            if (l.from == l.to) sink.error("LEG_SELF_LOOP", name + " starts and ends at the same terminal");
            if (l.dep < 0 || l.dep >= c.horizon || l.arr < 0 || l.arr >= c.horizon) {
                sink.error("TIME_OUT_OF_RANGE", name + ": times must lie in [0, horizon)");
            }
            if (l.power < 0) sink.error("NEGATIVE_POWER", name + " has negative power demand");
            if (l.power == 0) sink.warning("ZERO_POWER", name + " requires no locomotives");
            if (l.power > c.f) {
                sink.error("POWER_EXCEEDS_CAP",
                           name + " needs " + std::to_string(l.power) + " > f=" + std::to_string(c.f));
            }
            auto delta = inst.transit.find(l.from, l.to);
            if (!delta) {
                sink.error("MISSING_TRANSIT", name + ": no transit entry " + inst.terminals[l.from].id + "->" +
                                                  inst.terminals[l.to].id);
            } else if (c.horizon > 0 && wrap_time(l.arr - l.dep, c.horizon) != *delta) {
                sink.error("LEG_DURATION_MISMATCH",
                           name + ": arrival - departure is " + std::to_string(wrap_time(l.arr - l.dep, c.horizon)) +
                               " minutes but transit is " + std::to_string(*delta));
            }
            if (i + 1 < t.legs.size()) {
                const auto& next = t.legs[i + 1];
                if (l.to != next.from) {
                    sink.error("LEGS_NOT_CHAINED", name + " ends where the next leg does not start");
                }
                auto it = t.stops.find(l.seq);
                if (it == t.stops.end()) {
                    sink.error("MISSING_STOP_FLAGS", "train " + t.id + ": no railcar flags after leg " +
                                                         std::to_string(l.seq));
                } else if (it->second.count() != 1) {
                    sink.error("FLAGS_NOT_EXCLUSIVE", "train " + t.id + ": stop after leg " +
                                                          std::to_string(l.seq) + " must set exactly one flag");
                }
            }
        }
        for (const auto& [after, flags] : t.stops) {
            if (after < 1 || after >= int(t.legs.size())) {
                sink.error("STOP_OUT_OF_RANGE", "train " + t.id + ": stop after_seq " + std::to_string(after) +
                                                    " is not an intermediate stop");
            }
        }
    }

    if (inst.baseline) {
        const auto& b = *inst.baseline;
        if (b.days < 1) sink.error("BASELINE_DAYS_INVALID", "baseline must cover at least one day");
        for (const auto& [key, count] : b.events) {
            if (key.first < 0 || key.first >= nk) sink.error("UNKNOWN_TERMINAL", "baseline references an unknown terminal");
            if (key.second < 0 || key.second >= b.days) sink.error("BASELINE_DAY_OUT_OF_RANGE", "baseline day out of range");
            if (count < 0) sink.error("NEGATIVE_BASELINE", "baseline event counts must be non-negative");
        }
    }
    return sink.out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
    throw InstanceParseError(path + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) field_error(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) field_error(path + "." + key, "missing field");
    return *it;
}

std::int64_t as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) {
        if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) return std::int64_t(v.get<double>());
        field_error(path, "expected an integer");
    }
    return v.get<std::int64_t>();
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) field_error(path, "expected a number");
    return v.get<double>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) field_error(path, "expected a string");
    return v.get<std::string>();
}

bool as_flag(const json& v, const std::string& path) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number_integer()) {
        auto i = v.get<std::int64_t>();
        if (i == 0 || i == 1) return i == 1;
    }
    field_error(path, "expected 0/1 or a boolean");
}

const json& require_array(const json& obj, const char* key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_array()) field_error(path + "." + key, "expected an array");
    return v;
}

TerminalIndex terminal_ref(const Instance& inst, const json& v, const std::string& path) {
    auto id = as_string(v, path);
    auto k = inst.find_terminal(id);
    if (!k) field_error(path, "unknown terminal '" + id + "'");
    return *k;
}

}  // namespace

Instance instance_from_json(const json& doc) {
    if (!doc.is_object()) field_error("$", "expected an object");
    if (auto it = doc.find("schema_version"); it != doc.end()) {
        auto v = as_int(*it, "$.schema_version");
        if (v != kSchemaVersion) field_error("$.schema_version", "unsupported version " + std::to_string(v));
    }

    Instance inst;
    const auto& terminals = require_array(doc, "terminals", "$");
    for (std::size_t i = 0; i < terminals.size(); ++i) {
        const auto& t = terminals[i];
        const std::string path = "$.terminals[" + std::to_string(i) + "]";
        if (t.is_string()) {
            inst.terminals.push_back({t.get<std::string>(), t.get<std::string>()});
        } else {
            Terminal term;
            term.id = as_string(require(t, "id", path), path + ".id");
            term.name = t.contains("name") ? as_string(t["name"], path + ".name") : term.id;
            inst.terminals.push_back(std::move(term));
        }
    }

    if (auto it = doc.find("costs"); it != doc.end()) {
        const auto& c = *it;
        if (!c.is_object()) field_error("$.costs", "expected an object");
        auto num = [&](const char* key, double& out) {
            if (c.contains(key)) out = as_number(c[key], std::string("$.costs.") + key);
        };
        auto integer = [&](const char* key, auto& out) {
            if (c.contains(key)) out = static_cast<std::remove_reference_t<decltype(out)>>(as_int(c[key], std::string("$.costs.") + key));
        };
        num("q", inst.costs.q);
        num("c1", inst.costs.c1);
        num("c2", inst.costs.c2);
        num("c3", inst.costs.c3);
        num("e_rate", inst.costs.e_rate);
        num("g_rate", inst.costs.g_rate);
        integer("f", inst.costs.f);
        integer("rho_u", inst.costs.rho_u);
        integer("prep", inst.costs.prep);
        integer("inspect", inst.costs.inspect);
        integer("horizon", inst.costs.horizon);
    }

    const auto& transit = require_array(doc, "transit", "$");
    for (std::size_t i = 0; i < transit.size(); ++i) {
        const std::string path = "$.transit[" + std::to_string(i) + "]";
        const auto& e = transit[i];
        auto from = terminal_ref(inst, require(e, "from", path), path + ".from");
        auto to = terminal_ref(inst, require(e, "to", path), path + ".to");
        inst.transit.set(from, to, as_int(require(e, "minutes", path), path + ".minutes"));
    }

    const auto& trains = require_array(doc, "trains", "$");
    for (std::size_t i = 0; i < trains.size(); ++i) {
        const std::string path = "$.trains[" + std::to_string(i) + "]";
        const auto& tj = trains[i];
        Train train;
        const auto& id = require(tj, "id", path);
        train.id = id.is_string() ? id.get<std::string>() : std::to_string(as_int(id, path + ".id"));
        const auto& legs = require_array(tj, "legs", path);
        for (std::size_t j = 0; j < legs.size(); ++j) {
            const std::string lp = path + ".legs[" + std::to_string(j) + "]";
            const auto& lj = legs[j];
            TrainLeg leg;
            leg.seq = int(as_int(require(lj, "seq", lp), lp + ".seq"));
            leg.from = terminal_ref(inst, require(lj, "from", lp), lp + ".from");
            leg.to = terminal_ref(inst, require(lj, "to", lp), lp + ".to");
            leg.dep = as_int(require(lj, "dep", lp), lp + ".dep");
            leg.arr = as_int(require(lj, "arr", lp), lp + ".arr");
            leg.power = int(as_int(require(lj, "b", lp), lp + ".b"));
            train.legs.push_back(leg);
        }
        std::sort(train.legs.begin(), train.legs.end(),
                  [](const TrainLeg& a, const TrainLeg& b) { return a.seq < b.seq; });
        if (tj.contains("stops")) {
            const auto& stops = tj["stops"];
            if (!stops.is_array()) field_error(path + ".stops", "expected an array");
            for (std::size_t j = 0; j < stops.size(); ++j) {
                const std::string sp = path + ".stops[" + std::to_string(j) + "]";
                int after = int(as_int(require(stops[j], "after_seq", sp), sp + ".after_seq"));
                const auto& fj = require(stops[j], "flags", sp);
                if (!fj.is_object()) field_error(sp + ".flags", "expected an object");
                RailcarFlags flags;
                for (const auto& [key, value] : fj.items()) {
                    const std::string fp = sp + ".flags." + key;
                    if (key == "pu") flags.pu = as_flag(value, fp);
                    else if (key == "so") flags.so = as_flag(value, fp);
                    else if (key == "no") flags.no = as_flag(value, fp);
                    else if (key == "both") flags.both = as_flag(value, fp);
                    else field_error(fp, "unknown railcar flag");
                }
                if (!train.stops.emplace(after, flags).second) field_error(sp, "duplicate stop record");
            }
        }
        inst.trains.push_back(std::move(train));
    }

    if (auto it = doc.find("baseline"); it != doc.end() && !it->is_null()) {
        const auto& bj = *it;
        BaselinePlan plan;
        if (bj.contains("days")) plan.days = int(as_int(bj["days"], "$.baseline.days"));
        const auto& events = require_array(bj, "events", "$.baseline");
        for (std::size_t i = 0; i < events.size(); ++i) {
            const std::string ep = "$.baseline.events[" + std::to_string(i) + "]";
            auto k = terminal_ref(inst, require(events[i], "terminal", ep), ep + ".terminal");
            int day = int(as_int(require(events[i], "day", ep), ep + ".day"));
            int count = int(as_int(require(events[i], "count", ep), ep + ".count"));
            plan.events[{k, day}] += count;
        }
        inst.baseline = std::move(plan);
    }
    return inst;
}

json instance_to_json(const Instance& inst) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    json terminals = json::array();
    for (const auto& t : inst.terminals) terminals.push_back({{"id", t.id}, {"name", t.name}});
    doc["terminals"] = terminals;

    json transit = json::array();
    for (const auto& [key, minutes] : inst.transit.entries()) {
        transit.push_back(
            {{"from", inst.terminals[key.first].id}, {"to", inst.terminals[key.second].id}, {"minutes", minutes}});
    }
    doc["transit"] = transit;

    json trains = json::array();
    for (const auto& t : inst.trains) {
        json legs = json::array();
        for (const auto& l : t.legs) {
            legs.push_back({{"seq", l.seq},
                            {"from", inst.terminals[l.from].id},
                            {"to", inst.terminals[l.to].id},
                            {"dep", l.dep},
                            {"arr", l.arr},
                            {"b", l.power}});
        }
        json stops = json::array();
        for (const auto& [after, f] : t.stops) {
            json flags = json::object();
            if (f.pu) flags["pu"] = 1;
            if (f.so) flags["so"] = 1;
            if (f.no) flags["no"] = 1;
            if (f.both) flags["both"] = 1;
            stops.push_back({{"after_seq", after}, {"flags", flags}});
        }
        trains.push_back({{"id", t.id}, {"legs", legs}, {"stops", stops}});
    }
    doc["trains"] = trains;

    const auto& c = inst.costs;
    doc["costs"] = {{"q", c.q},         {"c1", c.c1},       {"c2", c.c2},           {"c3", c.c3},
                    {"e_rate", c.e_rate}, {"g_rate", c.g_rate}, {"f", c.f},           {"rho_u", c.rho_u},
                    {"prep", c.prep},   {"inspect", c.inspect}, {"horizon", c.horizon}};

    if (inst.baseline) {
        json events = json::array();
        for (const auto& [key, count] : inst.baseline->events) {
            events.push_back({{"terminal", inst.terminals[key.first].id}, {"day", key.second}, {"count", count}});
        }
        doc["baseline"] = {{"days", inst.baseline->days}, {"events", events}};
    }
    return doc;
}

Instance parse_instance(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // report a line number, byte offsets are unhelpful for hand-edited files
        std::size_t line = 1 + std::count(text.begin(), text.begin() + std::min(e.byte, text.size()), '\n');
        throw InstanceParseError("line " + std::to_string(line) + ": " + e.what());
    }
    Instance inst = instance_from_json(doc);
    auto violations = validate_instance(inst);
    if (has_errors(violations)) throw InstanceValidationError(std::move(violations));
    return inst;
}

Instance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InstanceParseError("cannot open instance file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_instance(buffer.str());
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << instance_to_json(inst).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Synthetic instances

namespace {

// Portable bounded draw; std::uniform_int_distribution differs across standard libraries.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : gen_(seed) {}
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = std::uint64_t(hi - lo) + 1;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return lo + std::int64_t(v % span);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace

Instance generate_synthetic(std::uint64_t seed, int n_terminals, int n_trains, int max_legs) {
    if (n_terminals < 2) throw std::invalid_argument("generate_synthetic: n_terminals must be >= 2");
    if (n_trains < 1) throw std::invalid_argument("generate_synthetic: n_trains must be >= 1");
    if (max_legs < 1) throw std::invalid_argument("generate_synthetic: max_legs must be >= 1");

    Draw draw(seed);
    Instance inst;
    const Minutes horizon = inst.costs.horizon;

    std::vector<std::pair<std::int64_t, std::int64_t>> xy;
    for (int k = 0; k < n_terminals; ++k) {
        std::string id = "T" + std::to_string(k);
        inst.terminals.push_back({id, "Terminal " + std::to_string(k)});
        xy.emplace_back(draw.between(0, 1000), draw.between(0, 1000));
    }
    // Euclidean layout plus a fixed handling time keeps transit strictly metric.
    for (int i = 0; i < n_terminals; ++i) {
        for (int j = 0; j < n_terminals; ++j) {
            if (i == j) continue;
            double dx = double(xy[i].first - xy[j].first);
            double dy = double(xy[i].second - xy[j].second);
            inst.transit.set(i, j, 60 + Minutes(std::llround(std::hypot(dx, dy))));
        }
    }

    for (int t = 0; t < n_trains; ++t) {
        Train train;
        train.id = "TR" + std::to_string(t);
        int legs = int(draw.between(1, max_legs));
        TerminalIndex at = TerminalIndex(draw.between(0, n_terminals - 1));
        Minutes dep = draw.between(0, horizon - 1);
        for (int s = 1; s <= legs; ++s) {
            TerminalIndex next = TerminalIndex(draw.between(0, n_terminals - 2));
            if (next >= at) ++next;
            TrainLeg leg;
            leg.seq = s;
            leg.from = at;
            leg.to = next;
            leg.dep = dep;
            leg.arr = wrap_time(dep + inst.transit.at(at, next), horizon);
            leg.power = int(draw.between(1, inst.costs.f));
            train.legs.push_back(leg);
            if (s < legs) {
                RailcarFlags flags;
                switch (draw.between(0, 3)) {
                    case 0: flags.pu = true; break;
                    case 1: flags.so = true; break;
                    case 2: flags.no = true; break;
                    default: flags.both = true; break;
                }
                train.stops[s] = flags;
                dep = wrap_time(leg.arr + draw.between(30, 240), horizon);
            }
            at = next;
        }
        inst.trains.push_back(std::move(train));
    }

    // Baseline: events at a random subset of the stops' terminal-days.
    BaselinePlan plan;
    plan.days = int(horizon / kDayMinutes);
    for (const auto& train : inst.trains) {
        for (const auto& [after, flags] : train.stops) {
            const auto& leg = train.legs[std::size_t(after - 1)];
            int day = int(leg.arr / kDayMinutes);
            if (draw.between(0, 1) == 1) plan.events[{leg.to, day}] += 1;
        }
    }
    inst.baseline = std::move(plan);
    return inst;
}

std::vector<std::int64_t> net_power_balance(const Instance& inst) {
    std::vector<std::int64_t> balance(inst.terminals.size(), 0);
    for (const auto& t : inst.trains) {
        for (const auto& l : t.legs) {
            balance[std::size_t(l.to)] += l.power;
            balance[std::size_t(l.from)] -= l.power;
        }
    }
    return balance;
}

}  // namespace railplan
