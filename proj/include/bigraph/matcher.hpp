#pragma once

#include "bigraph/bigraph.hpp"

#include <vector>

namespace bigraph {

// One decomposition target = context o (pattern x id) o parameter.
// The context and parameter are kept implicit as partitions of the target's
// nodes; parameter_of/merged_parameter materialise parameters on demand.
struct Occurrence {
    std::vector<int> node_map;                   // pattern node -> target node
    std::vector<int> link_map;                   // pattern link -> target link
    std::vector<std::vector<Place>> region_loc;  // pattern region -> context places it sits under
    std::vector<std::vector<int>> site_roots;    // pattern site -> top target nodes of its parameter
    std::vector<int> param_nodes;                // sorted
    std::vector<int> context_nodes;              // sorted

    bool operator==(const Occurrence&) const = default;
};

struct MatchConstraint {
    enum class Kind { PresentInParam, AbsentInParam, PresentInCtx, AbsentInCtx };

    Kind kind = Kind::AbsentInParam;
    Bigraph pattern;
};

// Every occurrence, deduplicated by image (image node set, parameter
// roots per site, targets of the pattern's outer names) and sorted by that
// key. Throws TargetNotGround / PatternNotSolid.
std::vector<Occurrence> find_occurrences(const Bigraph& target, const Bigraph& pattern);

std::size_t count_occurrences(const Bigraph& target, const Bigraph& pattern);

// Early-exit existence check. Throws PatternNotSolid.
bool matches_predicate(const Bigraph& state, const Bigraph& pattern);

// Occurrences whose node images all satisfy allowed[target node].
std::vector<Occurrence> find_occurrences_within(const Bigraph& target, const Bigraph& pattern,
                                                const std::vector<bool>& allowed, bool first_only);

// Parameter conditions see the merge of all parameter parts; context
// conditions match against nodes outside the occurrence and its parameter.
bool check_constraints(const Bigraph& target, const Occurrence& occ, const std::vector<MatchConstraint>& constraints);

// Ground bigraph of the parameter placed in pattern site i (width 1).
Bigraph parameter_of(const Bigraph& target, const Occurrence& occ, int site);

// All parameter parts merged into one region.
Bigraph merged_parameter(const Bigraph& target, const Occurrence& occ);

} // namespace bigraph
