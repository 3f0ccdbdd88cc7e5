#pragma once

// Independent bounded reachability checker: breadth-first enumeration of all
// (command, binding) successors with bindings drawn from the current extents
// plus a bounded fresh-value pool, deduplicated by structural state equality
// modulo fresh-identifier renaming. Finds a shortest witness when one exists
// within the bounds; used to validate heuristic results and to generate
// ground truth on small instances.

#include "depsearch/witness.hpp"

namespace depsearch {

struct OracleBounds {
    std::size_t max_depth = 6;
    std::size_t max_fresh_per_sort = 2;
    std::size_t max_states = 100000;
};

void validate_bounds(const OracleBounds& bounds); // every field positive

enum class OracleVerdict { Witness, SafeWithinBounds, BoundsExceeded };
const char* to_string(OracleVerdict verdict);

struct OracleResult {
    OracleVerdict verdict = OracleVerdict::SafeWithinBounds;
    std::optional<Witness> witness;
    std::size_t states_explored = 0;
    std::size_t depth_reached = 0;
};

// canonical_dedupe = false disables the fresh-identifier renaming in the
// visited set (kept for differential testing of the symmetry reduction).
OracleResult bfs_unsafe(const Model& m, const SafetySpec& spec, const OracleBounds& bounds,
                        bool canonical_dedupe = true);

} // namespace depsearch
