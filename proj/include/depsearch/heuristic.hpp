#pragma once

// Dynamic analysis phase: the main search loop. Paths are generated over the
// CDG (iterative deepening with bounded vertex revisits, seeded tie-breaking),
// parameterized by a forward-simulating backtracking assignment, executed
// through step() from the analyzed state, and checked for a leak after every
// transition. An exhausted budget is not a safety proof.

#include "depsearch/cdg.hpp"
#include "depsearch/witness.hpp"

namespace depsearch {

struct SearchBudget {
    std::size_t max_paths = 200;
    std::size_t max_path_length = 8; // real commands per path
    std::size_t max_revisits = 2;    // occurrences of one vertex within a path
    std::uint64_t seed = 1;
    double wall_clock_seconds = 3600.0;
};

void validate_budget(const SearchBudget& budget); // every field positive

struct SearchStats {
    std::size_t paths_tried = 0;
    std::size_t states_visited = 0;
    bool wall_clock_hit = false;
};

struct SearchOutcome {
    std::optional<Witness> witness;
    SearchStats stats;

    bool leak_found() const { return witness.has_value(); }
};

// Streams source-to-sink paths in order of increasing length; within one
// length, enumeration follows adjacency lists shuffled once from the seed.
// Every path is yielded at most once; at most `max_paths` paths are produced.
class PathGenerator {
public:
    PathGenerator(const Cdg& g, std::size_t max_length, std::size_t max_revisits,
                  std::size_t max_paths, Rng& rng);

    std::optional<Path> next();

private:
    void fill_level();

    const Cdg* graph_;
    std::size_t max_length_;
    std::size_t max_revisits_;
    std::size_t remaining_;
    std::vector<std::vector<int>> adjacency_;
    std::size_t level_ = 0;
    bool levels_done_ = false;
    std::vector<Path> buffer_;
    std::size_t buffer_pos_ = 0;
};

// Baseline assignParams: walks the path forward, enumerating parameter
// candidates from the simulated state's extents and the static extensions
// (plus fresh identifiers for entity-sorted parameters), seeds bindings with
// constants propagated across CDG-edge justifications, rejects no-op
// transitions, and backtracks across positions within a bounded number of
// attempts.
std::optional<PathAssignment> baseline_assign_params(const Model& m, const Cdg& g, const Path& path,
                                                     const ModelState& q0, Rng& rng);

// Hook selection for a model/spec pair: type-dependency predecessors for t
// and t-simple, rights matching for r-simple, label matching for c, syntactic
// fallback for e; entity-block source for entity/label shaped schemes.
HookSet make_hooks(const Model& m, const SafetySpec& spec);

// The full heuristic: assemble the CDG, then repeat path generation,
// parameter assignment and simulated execution until a leak is found or the
// budget runs out. With jobs > 1 paths are explored concurrently and the
// first leak wins (determinism is only guaranteed for jobs = 1).
SearchOutcome fds_search(const Model& m, const SafetySpec& spec, const HookSet& hooks,
                         const SearchBudget& budget, unsigned jobs = 1);

} // namespace depsearch
