#pragma once

// Static analysis phase: command dependency graph assembly. An edge c1 -> c2
// records that a post-condition of c1 can establish a pre-condition of c2;
// paths from the virtual source (which re-asserts the analyzed state) to the
// virtual sink (which checks the leak condition) are candidate input
// sequences. Predecessor computation, source and sink construction and the
// leak predicate are pluggable hooks.

#include <functional>
#include <random>

#include "depsearch/safety.hpp"

namespace depsearch {

using Rng = std::mt19937_64;

inline constexpr const char* kSourceCommandId = "virtualSourceCmd";
inline constexpr const char* kSinkCommandId = "virtualSinkCmd";

struct CdgEdge {
    int from = -1;
    int to = -1;
    bool seeded = false; // connectivity seed from the source, not hook-derived

    auto operator<=>(const CdgEdge&) const = default;
};

struct Cdg {
    std::vector<Command> vertices; // discovery order; includes the virtual commands
    int source = -1;
    int sink = -1;
    std::vector<CdgEdge> edges;     // sorted, unique
    std::vector<bool> in_closure;   // reached by the assembly recursion

    const Command& vertex(int i) const { return vertices[static_cast<std::size_t>(i)]; }
    int find_vertex(std::string_view id) const;
    std::vector<int> successors(int v) const;
    std::size_t in_degree(int v) const;
    std::size_t out_degree(int v) const;
};

// A source-to-sink walk over CDG edges (vertex indices; source first, sink
// last).
struct Path {
    std::vector<int> vertices;

    std::size_t real_length() const { return vertices.size() >= 2 ? vertices.size() - 2 : 0; }
};

// One binding per real command occurrence on a path.
struct PathAssignment {
    std::vector<Binding> bindings;
};

struct HookSet {
    // Predecessor command ids of `succ` within the scheme (which includes the
    // virtual source during assembly).
    std::function<std::vector<std::string>(const Model&, const TransitionScheme&, const Command&)>
        build_pred_set;
    std::function<Command(const Model&, const ModelState&)> create_cdg_source;
    std::function<Command(const Model&, const SafetySpec&)> create_cdg_sink;
    std::function<bool(const ModelState& q0, const ModelState& q)> is_leaked;
    std::function<std::optional<PathAssignment>(const Model&, const Cdg&, const Path&,
                                                const ModelState& q0, Rng&)>
        assign_params;

    bool complete() const {
        return build_pred_set && create_cdg_source && create_cdg_sink && is_leaked && assign_params;
    }
};

// Assembles the CDG for the given state and target: seeds the vertex set with
// the sink, recursively adds predecessors and edges, then connects
// closure vertices without incoming edges to the source (seeded edges) so
// state-independent commands stay reachable.
Cdg cdg_assembly(const Model& m, const ModelState& q, const SafetySpec& target, const HookSet& hooks);

// --- hook implementations ----------------------------------------------------

// Syntactic dependency over any dynamic component: an insert can establish a
// membership, a delete a freshness condition, a map update a pattern match, a
// cell insert a containment; terms must unify (variables match anything,
// constants must be equal).
std::vector<std::string> generic_build_pred_set(const Model& m, const TransitionScheme& delta,
                                                const Command& succ);

// Rights-based dependency for access-matrix schemes: commands entering a
// right (cell insert) that PRE(succ) requires (cell containment).
std::vector<std::string> hru_build_pred_set(const Model& m, const TransitionScheme& delta,
                                            const Command& succ);

// Type-based dependency for security-context schemes: collects the type terms
// of context pattern matches in PRE(succ) and returns commands whose POST
// updates the context mapping to a matchable type.
std::vector<std::string> selx_t_build_pred_set(const Model& m, const TransitionScheme& delta,
                                               const Command& succ);

// Same dependency, parameterized by the label mapping and value position.
std::vector<std::string> label_build_pred_set(const Model& m, const TransitionScheme& delta,
                                              const Command& succ, const std::string& label_map,
                                              std::size_t value_index);

// PRE = truth, POST = the dynamic extents of q encoded as updates.
Command generic_create_cdg_source(const Model& m, const ModelState& q);

// Entity-block form for entity/label-assignment schemes: one insert plus the
// label updates per entity, in entity order.
Command selx_create_cdg_source(const Model& m, const ModelState& q);

// PRE = "some entity carries the target type", POST = truth.
Command selx_t_create_cdg_sink(const Model& m, const std::string& target_type);

// Sink for any resolvable safety spec (entity presence, label match, or
// right-in-some-cell).
Command make_cdg_sink(const Model& m, const SafetySpec& spec);

// --- edge justification -------------------------------------------------------

// Independent clause matcher: an edge is justified when some POST clause of
// `from` and some PRE clause of `to` range over the same component with
// unifiable terms.
bool edge_justified(const Command& from, const Command& to);

// Descriptions of hook-produced edges that fail justification (seeded edges
// are exempt). Empty result = graph passes.
std::vector<std::string> check_cdg_justification(const Cdg& g);

// Deterministic DOT rendering: virtual vertices marked, commands outside the
// dependency closure shown detached and dashed.
std::string to_dot(const Model& m, const Cdg& g);

} // namespace depsearch
