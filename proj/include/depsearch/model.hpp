#pragma once

// Core-based automaton: component schemas, the state transition scheme and
// the functions step (delta), run (delta*), decide (lambda). A model couples
// a schema with a static extension, a command set and an initial state; all
// of it is immutable after construction.

#include <optional>
#include <string>
#include <vector>

#include "depsearch/ast.hpp"
#include "depsearch/state.hpp"

namespace depsearch {

// Entity labeling categories: label sets, relabeling rules, entity sets,
// label assignments, access rules, model constraints.
enum class ElCategory { LS, RR, ES, LA, AR, MC };

const char* to_string(ElCategory cat);
std::optional<ElCategory> el_category_from_string(std::string_view text);

enum class ComponentKind { Set, Relation, Map };

struct ComponentSchema {
    std::string name;
    ComponentKind kind = ComponentKind::Set;
    std::vector<std::string> key_sorts;   // element sort(s); map: key sorts
    std::vector<std::string> value_sorts; // map only; set-valued: one sort
    bool set_valued = false;              // map only
    bool dynamic = false;
    ElCategory category = ElCategory::MC;

    bool is_map() const { return kind == ComponentKind::Map; }
    bool is_scalar_map() const { return is_map() && !set_valued; }
    bool is_set_map() const { return is_map() && set_valued; }

    bool operator==(const ComponentSchema&) const = default;
};

struct Param {
    std::string name;
    std::string sort;

    bool operator==(const Param&) const = default;
};

struct Command {
    std::string id;
    std::vector<Param> params;
    ConditionExpr pre;
    std::vector<PostClause> post;

    bool operator==(const Command&) const = default;
};

struct TransitionScheme {
    std::vector<Command> commands; // declaration order, ids unique

    const Command* find(std::string_view id) const;
    bool operator==(const TransitionScheme&) const = default;
};

struct Model {
    std::string name;
    std::vector<std::string> sorts;
    std::vector<ComponentSchema> schema; // declaration order, names unique
    StaticExt ext;
    TransitionScheme delta_scheme;
    ModelState q0;

    const ComponentSchema* find_component(std::string_view name) const;
    const ComponentSchema& component(std::string_view name) const; // throws ModelError
};

// delta: evaluates PRE under b; on success returns the POST image of q (the
// extended binding from pattern matches feeds the update), otherwise returns
// q unchanged. Throws ModelError for an unknown command id or a binding that
// misses a formal parameter.
ModelState step(const Model& m, const ModelState& q, std::string_view cmd, const Binding& b);

// delta*: folds step over the inputs and returns every intermediate state
// (one per input, the last being the final state). Empty input -> empty trace.
std::vector<ModelState> run(const Model& m, const ModelState& q,
                            const std::vector<std::pair<std::string, Binding>>& inputs);

// lambda: the binary access decision, PRE satisfaction without state change.
bool decide(const Model& m, const ModelState& q, std::string_view cmd, const Binding& b);

// M|_cat: names of all components tagged with the category.
std::vector<std::string> el_components(const Model& m, ElCategory cat);

// Structural checks performed at model load: q0 covers exactly the dynamic
// components with well-shaped extents, command conditions respect the binding
// discipline, and no POST clause targets a static component.
void validate_model(const Model& m);

// Checks one state against the schema's dynamic components (shape only).
void validate_state(const Model& m, const ModelState& q);

// Well-formedness of a command against a schema: component references
// resolve, arities and sorts line up, every variable outside a pattern
// position is a parameter or bound by a prior mapping match, wildcards occur
// only in PRE patterns, POST terms are groundable and target dynamic
// components. Throws ModelError with a message naming the command.
void validate_command(const Model& m, const Command& cmd);

// Sort of every variable occurring in the command, inferred from component
// signatures and parameter declarations.
std::map<std::string, std::string> variable_sorts(const Model& m, const Command& cmd);

// Constants mentioned anywhere in the model (extents of q0 and ext plus
// literals in commands), grouped by sort.
std::map<std::string, std::set<std::string>> constants_by_sort(const Model& m);

// Components whose extent differs between the two states.
std::vector<std::string> changed_components(const ModelState& a, const ModelState& b);

// Canonical structured-text export of the whole model (stable ordering),
// also the input to the model digest.
std::string serialize_model(const Model& m);
inline std::string model_digest(const Model& m) { return hex64(fnv1a64(serialize_model(m))); }

} // namespace depsearch
