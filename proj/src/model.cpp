#include "depsearch/model.hpp"

#include <algorithm>

#include "depsearch/eval.hpp"

namespace depsearch {

const char* to_string(ElCategory cat) {
    switch (cat) {
    case ElCategory::LS: return "LS";
    case ElCategory::RR: return "RR";
    case ElCategory::ES: return "ES";
    case ElCategory::LA: return "LA";
    case ElCategory::AR: return "AR";
    case ElCategory::MC: return "MC";
    }
    return "?";
}

std::optional<ElCategory> el_category_from_string(std::string_view text) {
    if (text == "LS") return ElCategory::LS;
    if (text == "RR") return ElCategory::RR;
    if (text == "ES") return ElCategory::ES;
    if (text == "LA") return ElCategory::LA;
    if (text == "AR") return ElCategory::AR;
    if (text == "MC") return ElCategory::MC;
    return std::nullopt;
}

const Command* TransitionScheme::find(std::string_view id) const {
    for (const auto& c : commands)
        if (c.id == id) return &c;
    return nullptr;
}

const ComponentSchema* Model::find_component(std::string_view name) const {
    for (const auto& c : schema)
        if (c.name == name) return &c;
    return nullptr;
}

const ComponentSchema& Model::component(std::string_view name) const {
    const ComponentSchema* c = find_component(name);
    if (!c) throw ModelError("unknown component '" + std::string(name) + "'");
    return *c;
}

namespace {

const Command& lookup_command(const Model& m, std::string_view cmd) {
    const Command* c = m.delta_scheme.find(cmd);
    if (!c) throw ModelError("unknown command '" + std::string(cmd) + "'");
    return *c;
}

void require_params_bound(const Command& cmd, const Binding& b) {
    for (const auto& p : cmd.params)
        if (!b.count(p.name))
            throw ModelError("binding for '" + cmd.id + "' misses parameter '" + p.name + "'");
}

} // namespace

ModelState step(const Model& m, const ModelState& q, std::string_view cmd, const Binding& b) {
    const Command& c = lookup_command(m, cmd);
    require_params_bound(c, b);
    EvalResult pre = eval_pre(c.pre, q, m.ext, b);
    if (!pre) return q;
    return apply_post(c.post, q, pre.binding);
}

std::vector<ModelState> run(const Model& m, const ModelState& q,
                            const std::vector<std::pair<std::string, Binding>>& inputs) {
    std::vector<ModelState> trace;
    trace.reserve(inputs.size());
    const ModelState* current = &q;
    for (const auto& [cmd, b] : inputs) {
        trace.push_back(step(m, *current, cmd, b));
        current = &trace.back();
    }
    return trace;
}

bool decide(const Model& m, const ModelState& q, std::string_view cmd, const Binding& b) {
    const Command& c = lookup_command(m, cmd);
    require_params_bound(c, b);
    return eval_pre(c.pre, q, m.ext, b).satisfied;
}

std::vector<std::string> el_components(const Model& m, ElCategory cat) {
    std::vector<std::string> names;
    for (const auto& c : m.schema)
        if (c.category == cat) names.push_back(c.name);
    return names;
}

// --- structural validation -------------------------------------------------

namespace {

// Position of a term inside a clause; patterns are the only positions where
// wildcards and fresh (binding) variables may appear.
enum class TermCtx {
    SetElement,
    RelationPos,
    MatchKey,
    MatchPattern,
    ContainElement,
    ContainKey,
    PostTuple,
    PostKey,
    PostValue,
    PostElement,
};

bool is_pattern_ctx(TermCtx ctx) { return ctx == TermCtx::MatchPattern; }

using TermFn = std::function<void(const Term&, const std::string& sort, TermCtx)>;

void check_arity(const std::string& component, std::size_t have, std::size_t want,
                 const char* what) {
    if (have != want)
        throw ModelError("arity mismatch for '" + component + "' (" + what + ": got " +
                         std::to_string(have) + ", expected " + std::to_string(want) + ")");
}

// Resolves the component of one clause, checks kind and arities and reports
// every term with its schema sort.
void walk_clause(const Model& m, const AtomicClause& clause, const TermFn& fn) {
    std::visit(
        Overloaded{
            [&](const TruthClause&) {},
            [&](const MembershipClause& c) {
                const auto& schema = m.component(c.component);
                if (schema.kind != ComponentKind::Set)
                    throw ModelError("membership needs a set component ('" + c.component + "')");
                for (const auto& t : c.elements) fn(t, schema.key_sorts[0], TermCtx::SetElement);
            },
            [&](const RelationClause& c) {
                const auto& schema = m.component(c.component);
                if (schema.kind != ComponentKind::Relation)
                    throw ModelError("tuple membership needs a relation component ('" + c.component +
                                     "')");
                check_arity(c.component, c.tuple.size(), schema.key_sorts.size(), "tuple");
                for (std::size_t i = 0; i < c.tuple.size(); ++i)
                    fn(c.tuple[i], schema.key_sorts[i], TermCtx::RelationPos);
            },
            [&](const MappingMatchClause& c) {
                const auto& schema = m.component(c.component);
                if (!schema.is_scalar_map())
                    throw ModelError("pattern match needs a scalar mapping ('" + c.component + "')");
                check_arity(c.component, c.key.size(), schema.key_sorts.size(), "key");
                check_arity(c.component, c.pattern.size(), schema.value_sorts.size(), "value");
                for (std::size_t i = 0; i < c.key.size(); ++i)
                    fn(c.key[i], schema.key_sorts[i], TermCtx::MatchKey);
                for (std::size_t i = 0; i < c.pattern.size(); ++i)
                    fn(c.pattern[i], schema.value_sorts[i], TermCtx::MatchPattern);
            },
            [&](const ContainmentClause& c) {
                const auto& schema = m.component(c.component);
                if (!schema.is_set_map())
                    throw ModelError("containment needs a set-valued mapping ('" + c.component + "')");
                check_arity(c.component, c.key.size(), schema.key_sorts.size(), "key");
                fn(c.element, schema.value_sorts[0], TermCtx::ContainElement);
                for (std::size_t i = 0; i < c.key.size(); ++i)
                    fn(c.key[i], schema.key_sorts[i], TermCtx::ContainKey);
            },
        },
        clause);
}

void walk_post(const Model& m, const PostClause& clause, const TermFn& fn) {
    std::visit(
        Overloaded{
            [&](const PostTruth&) {},
            [&](const SetInsert& c) {
                const auto& schema = m.component(c.component);
                if (schema.kind == ComponentKind::Map)
                    throw ModelError("insert into mapping component '" + c.component + "'");
                check_arity(c.component, c.tuple.size(), schema.key_sorts.size(), "tuple");
                for (std::size_t i = 0; i < c.tuple.size(); ++i)
                    fn(c.tuple[i], schema.key_sorts[i], TermCtx::PostTuple);
            },
            [&](const SetDelete& c) {
                const auto& schema = m.component(c.component);
                if (schema.kind == ComponentKind::Map)
                    throw ModelError("delete from mapping component '" + c.component + "'");
                check_arity(c.component, c.tuple.size(), schema.key_sorts.size(), "tuple");
                for (std::size_t i = 0; i < c.tuple.size(); ++i)
                    fn(c.tuple[i], schema.key_sorts[i], TermCtx::PostTuple);
            },
            [&](const MapUpdate& c) {
                const auto& schema = m.component(c.component);
                if (!schema.is_scalar_map())
                    throw ModelError("map update needs a scalar mapping ('" + c.component + "')");
                check_arity(c.component, c.key.size(), schema.key_sorts.size(), "key");
                check_arity(c.component, c.value.size(), schema.value_sorts.size(), "value");
                for (std::size_t i = 0; i < c.key.size(); ++i)
                    fn(c.key[i], schema.key_sorts[i], TermCtx::PostKey);
                for (std::size_t i = 0; i < c.value.size(); ++i)
                    fn(c.value[i], schema.value_sorts[i], TermCtx::PostValue);
            },
            [&](const MapRestrict& c) {
                const auto& schema = m.component(c.component);
                if (!schema.is_map())
                    throw ModelError("restrict needs a mapping component ('" + c.component + "')");
                const auto& to = m.component(c.to_set);
                if (to.kind == ComponentKind::Map)
                    throw ModelError("restrict target '" + c.to_set + "' is not a set component");
                if (to.key_sorts != schema.key_sorts)
                    throw ModelError("restrict of '" + c.component + "' to '" + c.to_set +
                                     "' with different key signature");
            },
            [&](const CellInsert& c) {
                const auto& schema = m.component(c.component);
                if (!schema.is_set_map())
                    throw ModelError("cell insert needs a set-valued mapping ('" + c.component + "')");
                check_arity(c.component, c.key.size(), schema.key_sorts.size(), "key");
                fn(c.element, schema.value_sorts[0], TermCtx::PostElement);
                for (std::size_t i = 0; i < c.key.size(); ++i)
                    fn(c.key[i], schema.key_sorts[i], TermCtx::PostKey);
            },
        },
        clause);
}

// Full command analysis: checks the binding discipline and infers variable sorts.
std::map<std::string, std::string> analyze_command(const Model& m, const Command& cmd) {
    std::map<std::string, std::string> sorts;
    std::set<std::string> bound;
    auto note_sort = [&](const std::string& name, const std::string& sort) {
        auto [it, inserted] = sorts.emplace(name, sort);
        if (!inserted && it->second != sort)
            throw ModelError("variable '" + name + "' in '" + cmd.id + "' used with sorts '" +
                             it->second + "' and '" + sort + "'");
    };
    for (const auto& p : cmd.params) {
        if (std::find(m.sorts.begin(), m.sorts.end(), p.sort) == m.sorts.end())
            throw ModelError("parameter '" + p.name + "' of '" + cmd.id + "' has unknown sort '" +
                             p.sort + "'");
        if (bound.count(p.name))
            throw ModelError("duplicate parameter '" + p.name + "' in '" + cmd.id + "'");
        bound.insert(p.name);
        note_sort(p.name, p.sort);
    }

    for (const auto& clause : cmd.pre.clauses) {
        std::vector<std::string> pattern_binds;
        try {
            walk_clause(m, clause, [&](const Term& t, const std::string& sort, TermCtx ctx) {
                if (t.is_wildcard()) {
                    if (!is_pattern_ctx(ctx))
                        throw ModelError("wildcard outside a match pattern in '" + cmd.id + "'");
                    return;
                }
                if (!t.is_variable()) return;
                note_sort(t.text, sort);
                if (bound.count(t.text)) return;
                if (is_pattern_ctx(ctx)) {
                    pattern_binds.push_back(t.text);
                    return;
                }
                throw ModelError("unbound variable '" + t.text + "' in PRE of '" + cmd.id + "'");
            });
        } catch (const ModelError& e) {
            throw ModelError(std::string(e.what()) + " (command '" + cmd.id + "')");
        }
        bound.insert(pattern_binds.begin(), pattern_binds.end());
        if (const auto* member = std::get_if<MembershipClause>(&clause)) {
            if (member->negated && member->elements.size() != 1)
                throw ModelError("negated membership lists one element ('" + cmd.id + "')");
        }
    }

    for (const auto& clause : cmd.post) {
        const std::string& target = post_component(clause);
        if (!target.empty() && !m.component(target).dynamic)
            throw ModelError("POST of '" + cmd.id + "' updates static component '" + target + "'");
        walk_post(m, clause, [&](const Term& t, const std::string& sort, TermCtx) {
            if (t.is_wildcard())
                throw ModelError("wildcard in POST of '" + cmd.id + "'");
            if (!t.is_variable()) return;
            note_sort(t.text, sort);
            if (!bound.count(t.text))
                throw ModelError("unbound variable '" + t.text + "' in POST of '" + cmd.id + "'");
        });
    }
    return sorts;
}

void check_extent_shape(const ComponentSchema& schema, const Extent& extent) {
    if (schema.kind == ComponentKind::Map) {
        if (schema.set_valued) {
            const auto* cells = std::get_if<SetMapExtent>(&extent);
            if (!cells) throw ModelError("extent of '" + schema.name + "' must be a set-valued map");
            for (const auto& [key, _] : cells->cells)
                check_arity(schema.name, key.size(), schema.key_sorts.size(), "key");
        } else {
            const auto* map = std::get_if<MapExtent>(&extent);
            if (!map) throw ModelError("extent of '" + schema.name + "' must be a scalar map");
            for (const auto& [key, value] : map->entries) {
                check_arity(schema.name, key.size(), schema.key_sorts.size(), "key");
                check_arity(schema.name, value.size(), schema.value_sorts.size(), "value");
            }
        }
        return;
    }
    const auto* set = std::get_if<SetExtent>(&extent);
    if (!set) throw ModelError("extent of '" + schema.name + "' must be a set");
    for (const auto& row : set->rows)
        check_arity(schema.name, row.size(), schema.key_sorts.size(), "row");
}

void check_extent_cover(const Model& m, const std::map<std::string, Extent>& extents, bool dynamic,
                        const char* label) {
    for (const auto& schema : m.schema) {
        if (schema.dynamic != dynamic) continue;
        auto it = extents.find(schema.name);
        if (it == extents.end())
            throw ModelError(std::string(label) + " misses extent for '" + schema.name + "'");
        check_extent_shape(schema, it->second);
    }
    for (const auto& [name, _] : extents) {
        const ComponentSchema* schema = m.find_component(name);
        if (!schema || schema->dynamic != dynamic)
            throw ModelError(std::string(label) + " lists unexpected component '" + name + "'");
    }
}

} // namespace

void validate_command(const Model& m, const Command& cmd) { analyze_command(m, cmd); }

std::map<std::string, std::string> variable_sorts(const Model& m, const Command& cmd) {
    return analyze_command(m, cmd);
}

void validate_state(const Model& m, const ModelState& q) {
    check_extent_cover(m, q.extents, true, "state");
}

void validate_model(const Model& m) {
    std::set<std::string> seen_sorts(m.sorts.begin(), m.sorts.end());
    if (seen_sorts.size() != m.sorts.size()) throw ModelError("duplicate sort declaration");
    std::set<std::string> names;
    for (const auto& c : m.schema) {
        if (!names.insert(c.name).second)
            throw ModelError("duplicate component '" + c.name + "'");
        for (const auto& s : c.key_sorts)
            if (!seen_sorts.count(s))
                throw ModelError("component '" + c.name + "' uses unknown sort '" + s + "'");
        for (const auto& s : c.value_sorts)
            if (!seen_sorts.count(s))
                throw ModelError("component '" + c.name + "' uses unknown sort '" + s + "'");
        if (c.kind == ComponentKind::Set && c.key_sorts.size() != 1)
            throw ModelError("set component '" + c.name + "' needs exactly one sort");
        if (c.kind == ComponentKind::Relation && c.key_sorts.size() < 2)
            throw ModelError("relation component '" + c.name + "' needs at least two sorts");
        if (c.kind == ComponentKind::Map && (c.key_sorts.empty() || c.value_sorts.empty()))
            throw ModelError("mapping component '" + c.name + "' needs key and value sorts");
        if (c.kind == ComponentKind::Map && c.set_valued && c.value_sorts.size() != 1)
            throw ModelError("set-valued mapping '" + c.name + "' needs exactly one value sort");
    }
    check_extent_cover(m, m.ext.extents, false, "ext");
    check_extent_cover(m, m.q0.extents, true, "initial state");
    std::set<std::string> ids;
    for (const auto& cmd : m.delta_scheme.commands) {
        if (!ids.insert(cmd.id).second) throw ModelError("duplicate command '" + cmd.id + "'");
        validate_command(m, cmd);
    }
}

std::map<std::string, std::set<std::string>> constants_by_sort(const Model& m) {
    std::map<std::string, std::set<std::string>> out;
    auto record_extents = [&](const std::map<std::string, Extent>& extents) {
        collect_constants(extents, [&](const std::string& component, std::size_t pos, bool in_key,
                                       const std::string& value) {
            const ComponentSchema* schema = m.find_component(component);
            if (!schema) return;
            const auto& sorts = in_key ? schema->key_sorts : schema->value_sorts;
            if (pos < sorts.size()) out[sorts[pos]].insert(value);
        });
    };
    record_extents(m.ext.extents);
    record_extents(m.q0.extents);
    for (const auto& cmd : m.delta_scheme.commands) {
        auto record_term = [&](const Term& t, const std::string& sort, TermCtx) {
            if (t.is_constant()) out[sort].insert(t.text);
        };
        for (const auto& clause : cmd.pre.clauses) walk_clause(m, clause, record_term);
        for (const auto& clause : cmd.post) walk_post(m, clause, record_term);
    }
    return out;
}

std::vector<std::string> changed_components(const ModelState& a, const ModelState& b) {
    std::vector<std::string> changed;
    for (const auto& [name, extent] : b.extents) {
        auto it = a.extents.find(name);
        if (it == a.extents.end() || !(it->second == extent)) changed.push_back(name);
    }
    for (const auto& [name, _] : a.extents)
        if (!b.extents.count(name)) changed.push_back(name);
    std::sort(changed.begin(), changed.end());
    return changed;
}

} // namespace depsearch
