#include "railplan/pipeline.hpp"

namespace railplan {

Pipeline build_pipeline(const Instance& inst, const LightTravelOptions& lt, const ModelOptions& model,
                        const ExtensionConfig& extension) {
    Pipeline p;
    SpaceTimeNetwork base = build_network(inst);
    if (lt.method == LtMethod::mcf) {
        const McfProblem problem = build_mcf(inst, lt.mcf_alpha);
        p.light_arcs = mcf_insert_arcs(base, inst, solve_mcf(problem), lt.mcf, &p.warnings);
    } else {
        p.light_arcs = generate_light_arcs(base, inst, lt);
    }
    p.net = merge_light_arcs(base, p.light_arcs);
    p.model = apply_extension(build_base_model(p.net, inst.costs, model), extension);
    return p;
}

ReductionComparison verify_reduction_optimality(const Instance& inst, const SolveBudget& budget) {
    ReductionComparison out;
    LightTravelOptions lt;
    lt.method = LtMethod::full;
    const Pipeline full = build_pipeline(inst, lt);
    lt.method = LtMethod::exact;
    const Pipeline exact = build_pipeline(inst, lt);
    out.full_arcs = full.light_arcs.size();
    out.exact_arcs = exact.light_arcs.size();
    out.full = solve_bb(full.model.milp, budget);
    out.exact = solve_bb(exact.model.milp, budget);
    out.proven = out.full.status == SolveStatus::optimal && out.exact.status == SolveStatus::optimal;
    out.equal = out.proven && out.full.objective == out.exact.objective;
    return out;
}

}  // namespace railplan
