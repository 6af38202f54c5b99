#ifndef RAILPLAN_REPORT_HPP
#define RAILPLAN_REPORT_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "railplan/pipeline.hpp"

namespace railplan {

/// Unit-minutes by activity, each divided by fleet_size * H.
struct ActivityShares {
    double active = 0.0;
    double deadhead = 0.0;
    double pre_departure = 0.0;
    double post_arrival = 0.0;
    double connection = 0.0;
    double light_travel = 0.0;
    double idle = 0.0;

    double sum() const {
        return active + deadhead + pre_departure + post_arrival + connection + light_travel + idle;
    }
};

struct KpiReport {
    std::int64_t fleet_size = 0;
    std::int64_t pickup_events = 0;
    std::int64_t setout_events = 0;
    std::int64_t pickup_units = 0;
    std::int64_t setout_units = 0;
    int active_terminals = 0;
    int active_terminal_days = 0;
    double coverage_ratio = 0.0;
    int light_arcs_used = 0;
    std::int64_t light_trains = 0;
    int unique_od_pairs = 0;

    // unit-minute ledger; sums to fleet_size * H
    std::int64_t active_minutes = 0;
    std::int64_t dh_minutes = 0;
    std::int64_t pre_departure_minutes = 0;
    std::int64_t post_arrival_minutes = 0;
    std::int64_t connection_minutes = 0;
    std::int64_t lt_minutes = 0;
    std::int64_t idle_minutes = 0;
    ActivityShares shares;
    int train_count = 0;

    double objective = 0.0;
    CostDecomposition costs;
    std::map<TerminalDay, int> events_by_terminal_day;
};

class ReportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws ReportError when `sol` has no values or fails check_feasibility.
KpiReport compute_kpis(const SpaceTimeNetwork& net, const LapModel& model, const Solution& sol);

// ---------------------------------------------------------------------------
// Sensitivity sweeps

enum class SweepParam { q, e, c, g };
SweepParam parse_sweep_param(const std::string& name);
const char* to_string(SweepParam p);

/// 0.1..1.0 step 0.1, then 2..10 step 1.
std::vector<double> default_sweep_factors();

/// q scales ownership, e the light-train rate, c all three work-event costs, g the relocation rate.
CostParams scale_costs(const CostParams& base, SweepParam p, double factor);

struct SweepConfig {
    SweepParam parameter = SweepParam::q;
    std::vector<double> factors = default_sweep_factors();
    SolveBudget budget;
    LightTravelOptions light;
    ModelOptions model;
    ExtensionConfig extension;
    int parallel = 1;
};

struct SweepRow {
    double factor = 1.0;
    Solution solution;
    std::optional<KpiReport> kpis;  // absent without an incumbent
};

/// Rows come back in factor order regardless of `parallel`.
std::vector<SweepRow> run_sweep(const Instance& inst, const SweepConfig& cfg);

struct ShapeCheck {
    bool monotone = true;  // non-decreasing
    bool concave = true;
    std::string detail;
};

/// Checks objectives against factors with relative tolerance `tol`.
ShapeCheck check_sweep_shape(const std::vector<double>& factors, const std::vector<double>& objectives,
                             double tol = 1e-6);

// ---------------------------------------------------------------------------
// Extension ladder

struct LadderConfig {
    std::vector<ExtensionVersion> versions;
    /// Per-version budget grid; versions without an entry use the default grid.
    std::map<ExtensionVersion, std::vector<int>> budgets;
    bool warm_chain = true;
    int theta = kDefaultTheta;
    SolveBudget budget;
    LightTravelOptions light;
    ModelOptions model;
};

struct LadderRow {
    ExtensionVersion version = ExtensionVersion::V1prime;
    int budget = 0;  // lambda for V1, alpha otherwise; 0 for V0 and V1p
    Solution solution;
    bool warm_started = false;
    std::optional<double> start_objective;
    double improvement = 0.0;  // (V1p - this) / V1p
};

/// Default grid: V1 lambda 0..theta, V2 0..|K^I| by 1, V3 0..|KD^I| by 5, V4 |K\K^I|..|K| by 1,
/// V5 |KD\KD^I|..|KD| by 5. Grids always end at their maximum.
std::vector<int> default_ladder_grid(const Instance& inst, ExtensionVersion v, int theta);

/// Solves V1p first, then every requested version across its grid.
std::vector<LadderRow> run_extension_ladder(const Instance& inst, const LadderConfig& cfg);

// ---------------------------------------------------------------------------
// Tabular output

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows;
};

Table kpi_table(const KpiReport& k);
Table heatmap_table(const KpiReport& k);
Table sweep_table(SweepParam p, const std::vector<SweepRow>& rows);
Table ladder_table(const std::vector<LadderRow>& rows);

enum class ReportFormat { csv, json };
ReportFormat parse_report_format(const std::string& name);

std::string to_csv(const Table& t);
nlohmann::ordered_json to_json(const Table& t);
Table table_from_json(const nlohmann::ordered_json& doc);

/// Writes to `path`, or to stdout when the path is empty or "-".
void emit_report(const Table& t, ReportFormat format, const std::filesystem::path& path);

nlohmann::json kpis_to_json(const KpiReport& k);

}  // namespace railplan

#endif  // RAILPLAN_REPORT_HPP
