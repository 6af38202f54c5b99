#ifndef RAILPLAN_PIPELINE_HPP
#define RAILPLAN_PIPELINE_HPP

#include <string>
#include <vector>

#include "railplan/instance.hpp"
#include "railplan/lighttravel.hpp"
#include "railplan/model.hpp"
#include "railplan/solver.hpp"
#include "railplan/spacetime.hpp"

namespace railplan {

/// Network with light arcs merged, and the model built over it.
struct Pipeline {
    SpaceTimeNetwork net;
    std::vector<LightArcSpec> light_arcs;
    LapModel model;
    std::vector<std::string> warnings;
};

Pipeline build_pipeline(const Instance& inst, const LightTravelOptions& lt, const ModelOptions& model = {},
                        const ExtensionConfig& extension = {});

struct ReductionComparison {
    Solution full;
    Solution exact;
    std::size_t full_arcs = 0;
    std::size_t exact_arcs = 0;
    bool proven = false;  // both solves optimal
    bool equal = false;   // objectives identical
};

/// Solves once over every light arc and once over the reduced set.
ReductionComparison verify_reduction_optimality(const Instance& inst, const SolveBudget& budget = {});

}  // namespace railplan

#endif  // RAILPLAN_PIPELINE_HPP
