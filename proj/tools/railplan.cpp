// railplan: locomotive assignment planning from the command line.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "railplan/mps.hpp"
#include "railplan/report.hpp"

using namespace railplan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitBudget = 4;

struct Options {
    std::string instance;
    std::string lt_method = "exact";
    std::optional<double> mcf_alpha;
    Minutes mcf_window = McfInsertOptions{}.window;
    std::int64_t mcf_threshold = McfInsertOptions{}.threshold;
    std::string extension = "V0";
    std::optional<int> lambda;
    std::string theta = "6";
    std::optional<int> alpha;
    double budget_seconds = 60.0;
    long budget_nodes = 2'000'000;
    std::string format;
    std::string out;
    std::uint64_t seed = 1;
    int parallel = 1;
    bool no_mutex = false;

    // subcommand specifics
    int terminals = 3;
    int trains = 5;
    int legs = 2;
    std::string param = "q";
    std::vector<double> factors;
    std::vector<std::string> versions = {"V1", "V2", "V3", "V4", "V5"};
    bool no_warm_chain = false;
    std::string solution;
    bool heatmap = false;
};

class ExitCode : public std::runtime_error {
public:
    ExitCode(int code, const std::string& msg) : std::runtime_error(msg), code(code) {}
    int code;
};

int parse_theta(const std::string& s) {
    if (s == "inf" || s == "unbounded") return kUnboundedTheta;
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used == s.size() && v >= 0) return v;
    } catch (const std::exception&) {
    }
    throw ExitCode(kExitUsage, "--theta expects a non-negative integer or 'inf'");
}

Instance load_checked(const Options& o) {
    if (o.instance.empty()) throw ExitCode(kExitUsage, "--instance is required");
    Instance inst;
    try {
        inst = load_instance(o.instance);
    } catch (const InstanceParseError& e) {
        throw ExitCode(kExitValidation, e.what());
    } catch (const InstanceValidationError& e) {
        for (const auto& v : e.violations()) {
            if (v.severity == Severity::error) std::cerr << "error " << v.code << ": " << v.message << "\n";
        }
        throw ExitCode(kExitValidation, "instance failed validation");
    }
    const auto violations = validate_instance(inst);
    for (const auto& v : violations) {
        if (v.severity == Severity::warning) std::cerr << "warning " << v.code << ": " << v.message << "\n";
    }
    if (has_errors(violations)) {
        for (const auto& v : violations) {
            if (v.severity == Severity::error) std::cerr << "error " << v.code << ": " << v.message << "\n";
        }
        throw ExitCode(kExitValidation, "instance failed validation");
    }
    return inst;
}

LightTravelOptions light_options(const Options& o) {
    LightTravelOptions lt;
    lt.method = parse_lt_method(o.lt_method);
    lt.mcf_alpha = o.mcf_alpha;
    lt.mcf.window = o.mcf_window;
    lt.mcf.threshold = o.mcf_threshold;
    return lt;
}

ModelOptions model_options(const Options& o) {
    ModelOptions m;
    m.mutual_exclusion = !o.no_mutex;
    return m;
}

ExtensionConfig extension_config(const Options& o, const Instance& inst) {
    ExtensionConfig c;
    c.version = parse_extension(o.extension);
    c.theta = parse_theta(o.theta);
    c.lambda = o.lambda;
    c.baseline = inst.baseline;
    switch (c.version) {
        case ExtensionVersion::V2: c.alpha_c = o.alpha; break;
        case ExtensionVersion::V3: c.alpha_d = o.alpha; break;
        case ExtensionVersion::V4: c.alpha_e = o.alpha; break;
        case ExtensionVersion::V5: c.alpha_f = o.alpha; break;
        default: break;
    }
    return c;
}

SolveBudget budget(const Options& o) {
    SolveBudget b;
    b.max_seconds = o.budget_seconds;
    b.max_nodes = o.budget_nodes;
    return b;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ExitCode(kExitUsage, "cannot write " + path);
    out << text;
}

int status_exit(const Solution& s) {
    if (s.status == SolveStatus::infeasible) return kExitInfeasible;
    if (!s.has_incumbent()) return kExitBudget;
    return kExitOk;
}

int cmd_generate(const Options& o) {
    const Instance inst = generate_synthetic(o.seed, o.terminals, o.trains, o.legs);
    write_text(o.out, instance_to_json(inst).dump(2) + "\n");
    return kExitOk;
}

int cmd_validate(const Options& o) {
    load_checked(o);
    std::cerr << "instance ok\n";
    return kExitOk;
}

int cmd_build(const Options& o) {
    const Instance inst = load_checked(o);
    const Pipeline p = build_pipeline(inst, light_options(o), model_options(o), extension_config(o, inst));
    for (const auto& w : p.warnings) std::cerr << "warning: " << w << "\n";
    const std::string format = o.format.empty() ? "mps" : o.format;
    if (format == "mps") {
        std::ostringstream ss;
        write_mps(p.model.milp, ss);
        write_text(o.out, ss.str());
    } else if (format == "json") {
        nlohmann::json doc = network_to_json(p.net, inst);
        doc["model"] = {{"variables", p.model.milp.size()},
                        {"constraints", p.model.milp.constraints().size()},
                        {"light_arcs", p.light_arcs.size()},
                        {"extensions", p.model.applied}};
        write_text(o.out, doc.dump(2) + "\n");
    } else {
        throw ExitCode(kExitUsage, "build supports --format mps or json");
    }
    return kExitOk;
}

int cmd_solve(const Options& o) {
    const Instance inst = load_checked(o);
    const Pipeline p = build_pipeline(inst, light_options(o), model_options(o), extension_config(o, inst));
    for (const auto& w : p.warnings) std::cerr << "warning: " << w << "\n";
    const Solution s = solve_bb(p.model.milp, budget(o));
    std::cerr << "status " << to_string(s.status) << ", objective " << s.objective << ", nodes " << s.node_count
              << "\n";
    const std::string format = o.format.empty() ? "json" : o.format;
    std::optional<KpiReport> kpis;
    if (s.has_incumbent()) kpis = compute_kpis(p.net, p.model, s);
    if (format == "json") {
        nlohmann::json doc = {{"solution", solution_to_json(p.model.milp, s)}};
        if (kpis) doc["kpis"] = kpis_to_json(*kpis);
        write_text(o.out, doc.dump(2) + "\n");
    } else if (format == "csv") {
        if (kpis) emit_report(kpi_table(*kpis), ReportFormat::csv, o.out);
    } else {
        throw ExitCode(kExitUsage, "solve supports --format json or csv");
    }
    return status_exit(s);
}

int cmd_sweep(const Options& o) {
    const Instance inst = load_checked(o);
    SweepConfig cfg;
    cfg.parameter = parse_sweep_param(o.param);
    if (!o.factors.empty()) cfg.factors = o.factors;
    cfg.budget = budget(o);
    cfg.light = light_options(o);
    cfg.model = model_options(o);
    cfg.extension = extension_config(o, inst);
    cfg.parallel = o.parallel;
    const auto rows = run_sweep(inst, cfg);
    emit_report(sweep_table(cfg.parameter, rows), parse_report_format(o.format.empty() ? "csv" : o.format), o.out);
    return kExitOk;
}

int cmd_ladder(const Options& o) {
    const Instance inst = load_checked(o);
    LadderConfig cfg;
    for (const auto& v : o.versions) cfg.versions.push_back(parse_extension(v));
    cfg.warm_chain = !o.no_warm_chain;
    cfg.theta = parse_theta(o.theta);
    cfg.budget = budget(o);
    cfg.light = light_options(o);
    cfg.model = model_options(o);
    const auto rows = run_extension_ladder(inst, cfg);
    emit_report(ladder_table(rows), parse_report_format(o.format.empty() ? "csv" : o.format), o.out);
    return kExitOk;
}

int cmd_report(const Options& o) {
    const Instance inst = load_checked(o);
    if (o.solution.empty()) throw ExitCode(kExitUsage, "--solution is required");
    const Pipeline p = build_pipeline(inst, light_options(o), model_options(o), extension_config(o, inst));
    std::ifstream in(o.solution);
    if (!in) throw ExitCode(kExitUsage, "cannot read " + o.solution);
    KpiReport k;
    try {
        const nlohmann::json doc = nlohmann::json::parse(in);
        const Solution s = solution_from_json(p.model.milp, doc.contains("solution") ? doc["solution"] : doc);
        k = compute_kpis(p.net, p.model, s);
    } catch (const std::exception& e) {
        throw ExitCode(kExitValidation, std::string("solution rejected: ") + e.what());
    }
    const auto format = parse_report_format(o.format.empty() ? "csv" : o.format);
    emit_report(o.heatmap ? heatmap_table(k) : kpi_table(k), format, o.out);
    return kExitOk;
}

void add_instance(CLI::App* cmd, Options& o) {
    cmd->add_option("--instance", o.instance, "Instance JSON file")->required();
}

void add_model(CLI::App* cmd, Options& o) {
    cmd->add_option("--lt-method", o.lt_method, "Light-travel arcs: exact, mcf, full or none");
    cmd->add_option("--mcf-alpha", o.mcf_alpha, "Penalty factor for the mcf method (> 2)");
    cmd->add_option("--mcf-window", o.mcf_window, "Insertion window in minutes for the mcf method")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--mcf-threshold", o.mcf_threshold, "Insert arcs only where the mcf flow exceeds this")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--extension", o.extension, "V0, V1, V1p, V2, V3, V4 or V5");
    cmd->add_option("--lambda", o.lambda, "Extra events per baseline terminal-day (V1)");
    cmd->add_option("--theta", o.theta, "Daily event cap per terminal, or 'inf'");
    cmd->add_option("--alpha", o.alpha, "Activation budget of the chosen extension");
    cmd->add_flag("--no-mutex", o.no_mutex, "Allow set-out and pick-up at the same stop");
}

void add_budget(CLI::App* cmd, Options& o) {
    cmd->add_option("--budget-seconds", o.budget_seconds, "Wall-clock limit per solve");
    cmd->add_option("--budget-nodes", o.budget_nodes, "Branch-and-bound node limit per solve");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Strategic locomotive assignment planning"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("generate", "Write a seeded synthetic instance");
    gen->add_option("--seed", o.seed, "Random seed");
    gen->add_option("--terminals", o.terminals, "Number of terminals");
    gen->add_option("--trains", o.trains, "Number of trains");
    gen->add_option("--legs", o.legs, "Maximum legs per train");
    gen->add_option("--out", o.out, "Output file (default stdout)");

    auto* val = app.add_subcommand("validate", "Check an instance; exit 2 on errors");
    add_instance(val, o);

    auto* build = app.add_subcommand("build", "Build the model and export it");
    add_instance(build, o);
    add_model(build, o);
    build->add_option("--format", o.format, "mps (default) or json network dump");
    build->add_option("--out", o.out, "Output file (default stdout)");

    auto* solve = app.add_subcommand("solve", "Build and solve; exit 3 infeasible, 4 no incumbent");
    add_instance(solve, o);
    add_model(solve, o);
    add_budget(solve, o);
    solve->add_option("--format", o.format, "json (solution and KPIs, default) or csv (KPI row)");
    solve->add_option("--out", o.out, "Output file (default stdout)");

    auto* sweep = app.add_subcommand("sweep", "Scale one cost family and re-solve per factor");
    add_instance(sweep, o);
    add_model(sweep, o);
    add_budget(sweep, o);
    sweep->add_option("--param", o.param, "q, e, c or g");
    sweep->add_option("--factors", o.factors, "Factors (default 0.1..1.0 by 0.1 then 2..10)");
    sweep->add_option("--parallel", o.parallel, "Concurrent solves");
    sweep->add_option("--format", o.format,
                      "csv (default) or json; columns: parameter,factor,status,objective,lower_bound,nodes,"
                      "wall_time,fleet_size,work_events,coverage_ratio,dh_minutes,lt_minutes,light_trains");
    sweep->add_option("--out", o.out, "Output file (default stdout)");

    auto* ladder = app.add_subcommand("ladder", "Solve V1p then each version across its budget grid");
    add_instance(ladder, o);
    ladder->add_option("--lt-method", o.lt_method, "Light-travel arcs: exact, mcf, full or none");
    ladder->add_option("--theta", o.theta, "Daily event cap per terminal, or 'inf'");
    ladder->add_option("--versions", o.versions, "Versions to ladder (default V1 V2 V3 V4 V5)");
    ladder->add_flag("--no-warm-chain", o.no_warm_chain, "Solve every rung cold");
    ladder->add_option("--parallel", o.parallel, "Accepted for symmetry; rungs run in sequence");
    add_budget(ladder, o);
    ladder->add_option("--format", o.format,
                       "csv (default) or json; columns: version,budget,status,objective,lower_bound,"
                       "improvement,warm_started,start_objective,nodes,wall_time");
    ladder->add_option("--out", o.out, "Output file (default stdout)");

    auto* report = app.add_subcommand("report", "KPIs for a saved solution");
    add_instance(report, o);
    add_model(report, o);
    report->add_option("--solution", o.solution, "Solution JSON written by solve")->required();
    report->add_flag("--heatmap", o.heatmap, "Emit terminal,day,events rows instead of the KPI row");
    report->add_option("--format", o.format, "csv (default) or json");
    report->add_option("--out", o.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gen) return cmd_generate(o);
        if (*val) return cmd_validate(o);
        if (*build) return cmd_build(o);
        if (*solve) return cmd_solve(o);
        if (*sweep) return cmd_sweep(o);
        if (*ladder) return cmd_ladder(o);
        if (*report) return cmd_report(o);
    } catch (const ExitCode& e) {
        std::cerr << e.what() << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
