#pragma once

// Safety targets and leak predicates. A state q is unsafe w.r.t. a target
// when some reachable q' grants something q did not: a right in a new matrix
// cell (r-simple), a new entity (e), an existing entity reclassified (c), an
// existing entity relabeled to a target type (t), or either of the latter
// via a fresh entity (t-simple). This module also extracts the access
// control function (the PREs of commands whose decision depends on
// access-rule components) and derives candidate leakage targets from it.

#include <optional>

#include "depsearch/model.hpp"

namespace depsearch {

enum class SafetyKind { RSimple, E, C, T, TSimple };

const char* to_string(SafetyKind kind);
std::optional<SafetyKind> safety_kind_from_string(std::string_view text);

struct SafetySpec {
    SafetyKind kind = SafetyKind::T;
    std::string target;

    bool operator==(const SafetySpec&) const = default;
};

// Component bindings a leak predicate needs, derived from EL categories and
// the target's sort. Resolution fails with ModelError when the spec kind is
// incompatible with the model schema or the target value is unknown.
struct ResolvedSafety {
    SafetySpec spec;
    std::string target_sort;
    // e / c / t / t-simple
    const ComponentSchema* entity_set = nullptr; // dynamic ES set
    const ComponentSchema* label_map = nullptr;  // dynamic LA scalar map (c/t kinds)
    std::size_t value_index = 0;                 // target-sorted position of label_map's value
    // r-simple
    const ComponentSchema* cell_map = nullptr;          // dynamic AR set-valued map
    std::vector<const ComponentSchema*> key_entity_set; // per key position, may be null
};

ResolvedSafety resolve_safety(const Model& m, const SafetySpec& spec);

bool is_leaked(const ResolvedSafety& rs, const ModelState& q0, const ModelState& q);
bool is_leaked(const Model& m, const SafetySpec& spec, const ModelState& q0, const ModelState& q);

// --- access control function ------------------------------------------------

struct AcfAlternative {
    std::string command;
    ConditionExpr pre;

    bool operator==(const AcfAlternative&) const = default;
};

// Disjunction of the PREs of all commands that depend on an AR component
// (dependency = syntactic occurrence of the component in a clause).
struct AcfSpec {
    std::vector<AcfAlternative> alternatives;
};

AcfSpec extract_acf(const Model& m);

// One group per dynamic component referenced by ACF clauses; clauses over
// static components are dropped. The candidate kind maps the component shape
// to a safety definition (set -> e, set-valued map -> r-simple, scalar map ->
// c when 1-ary else t).
struct LeakGroup {
    std::string component;
    std::optional<SafetyKind> kind;
    std::vector<std::pair<std::string, std::size_t>> clauses; // (command, PRE clause index)
    std::vector<std::string> rr_covering;                     // RR components over the label sort
    std::string hint;
};

struct LeakTargetReport {
    std::vector<LeakGroup> groups;
};

LeakTargetReport derive_leak_targets(const AcfSpec& acf, const Model& m);

} // namespace depsearch
