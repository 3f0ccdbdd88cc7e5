#include "depsearch/safety.hpp"

#include <algorithm>

namespace depsearch {

const char* to_string(SafetyKind kind) {
    switch (kind) {
    case SafetyKind::RSimple: return "r-simple";
    case SafetyKind::E: return "e";
    case SafetyKind::C: return "c";
    case SafetyKind::T: return "t";
    case SafetyKind::TSimple: return "t-simple";
    }
    return "?";
}

std::optional<SafetyKind> safety_kind_from_string(std::string_view text) {
    if (text == "r-simple") return SafetyKind::RSimple;
    if (text == "e") return SafetyKind::E;
    if (text == "c") return SafetyKind::C;
    if (text == "t") return SafetyKind::T;
    if (text == "t-simple") return SafetyKind::TSimple;
    return std::nullopt;
}

namespace {

// Sort of the target constant, inferred from where the value is declared in
// the model. Unknown values are an error for every kind but e (a targeted
// entity may not exist yet anywhere).
std::optional<std::string> target_sort(const Model& m, const std::string& target) {
    auto constants = constants_by_sort(m);
    std::optional<std::string> found;
    for (const auto& [sort, values] : constants) {
        if (!values.count(target)) continue;
        if (found && *found != sort)
            throw ModelError("target '" + target + "' is declared in sorts '" + *found + "' and '" +
                             sort + "'");
        found = sort;
    }
    return found;
}

const ComponentSchema* unique_dynamic_es(const Model& m, const std::string& element_sort) {
    const ComponentSchema* found = nullptr;
    for (const auto& c : m.schema) {
        if (!c.dynamic || c.category != ElCategory::ES || c.kind != ComponentKind::Set) continue;
        if (!element_sort.empty() && c.key_sorts[0] != element_sort) continue;
        if (found)
            throw ModelError("ambiguous entity set: both '" + found->name + "' and '" + c.name + "'");
        found = &c;
    }
    return found;
}

const std::set<Tuple>& rows_of(const ModelState& q, const std::string& component) {
    return std::get<SetExtent>(q.extents.at(component)).rows;
}

const std::map<Tuple, Tuple>& entries_of(const ModelState& q, const std::string& component) {
    return std::get<MapExtent>(q.extents.at(component)).entries;
}

} // namespace

ResolvedSafety resolve_safety(const Model& m, const SafetySpec& spec) {
    ResolvedSafety rs;
    rs.spec = spec;
    auto declared_sort = target_sort(m, spec.target);

    switch (spec.kind) {
    case SafetyKind::RSimple: {
        for (const auto& c : m.schema) {
            if (!c.dynamic || c.category != ElCategory::AR || !c.is_set_map()) continue;
            if (rs.cell_map)
                throw ModelError("ambiguous access-rule matrix: both '" + rs.cell_map->name +
                                 "' and '" + c.name + "'");
            rs.cell_map = &c;
        }
        if (!rs.cell_map)
            throw ModelError("r-simple safety needs a dynamic AR set-valued mapping");
        rs.target_sort = rs.cell_map->value_sorts[0];
        if (!declared_sort)
            throw ModelError("unknown target value '" + spec.target + "'");
        if (*declared_sort != rs.target_sort)
            throw ModelError("target '" + spec.target + "' has sort '" + *declared_sort +
                             "', expected '" + rs.target_sort + "'");
        for (const auto& sort : rs.cell_map->key_sorts)
            rs.key_entity_set.push_back(unique_dynamic_es(m, sort));
        return rs;
    }
    case SafetyKind::E: {
        rs.entity_set = declared_sort ? unique_dynamic_es(m, *declared_sort) : unique_dynamic_es(m, "");
        if (!rs.entity_set) throw ModelError("e-safety needs a dynamic ES set component");
        rs.target_sort = rs.entity_set->key_sorts[0];
        return rs;
    }
    case SafetyKind::C:
    case SafetyKind::T:
    case SafetyKind::TSimple: {
        if (!declared_sort) throw ModelError("unknown target value '" + spec.target + "'");
        rs.target_sort = *declared_sort;
        for (const auto& c : m.schema) {
            if (!c.dynamic || c.category != ElCategory::LA || !c.is_scalar_map()) continue;
            for (std::size_t i = 0; i < c.value_sorts.size(); ++i) {
                if (c.value_sorts[i] != rs.target_sort) continue;
                if (rs.label_map)
                    throw ModelError("ambiguous label assignment for sort '" + rs.target_sort + "'");
                rs.label_map = &c;
                rs.value_index = i;
            }
        }
        if (!rs.label_map)
            throw ModelError("no dynamic LA mapping carries sort '" + rs.target_sort +
                             "' (incompatible safety kind)");
        if (spec.kind == SafetyKind::C && rs.label_map->value_sorts.size() != 1)
            throw ModelError("c-safety targets a classification (1-ary label assignment); '" +
                             rs.label_map->name + "' is " +
                             std::to_string(rs.label_map->value_sorts.size()) + "-ary");
        rs.entity_set = unique_dynamic_es(m, rs.label_map->key_sorts.size() == 1
                                                 ? rs.label_map->key_sorts[0]
                                                 : std::string{});
        if (!rs.entity_set)
            throw ModelError("no dynamic ES set matches the domain of '" + rs.label_map->name + "'");
        return rs;
    }
    }
    throw ModelError("unhandled safety kind");
}

bool is_leaked(const ResolvedSafety& rs, const ModelState& q0, const ModelState& q) {
    switch (rs.spec.kind) {
    case SafetyKind::RSimple: {
        const auto& cells = std::get<SetMapExtent>(q.extents.at(rs.cell_map->name)).cells;
        const auto& cells0 = std::get<SetMapExtent>(q0.extents.at(rs.cell_map->name)).cells;
        for (const auto& [key, cell] : cells) {
            if (!cell.count(rs.spec.target)) continue;
            bool in_current = true;
            bool fresh_key = false;
            for (std::size_t i = 0; i < key.size(); ++i) {
                const ComponentSchema* es = rs.key_entity_set[i];
                if (!es) continue;
                if (!rows_of(q, es->name).count(Tuple{key[i]})) {
                    in_current = false;
                    break;
                }
                if (!rows_of(q0, es->name).count(Tuple{key[i]})) fresh_key = true;
            }
            if (!in_current) continue;
            if (fresh_key) return true;
            auto it = cells0.find(key);
            if (it == cells0.end() || !it->second.count(rs.spec.target)) return true;
        }
        return false;
    }
    case SafetyKind::E: {
        const Tuple target{rs.spec.target};
        return rows_of(q, rs.entity_set->name).count(target) &&
               !rows_of(q0, rs.entity_set->name).count(target);
    }
    case SafetyKind::C:
    case SafetyKind::T:
    case SafetyKind::TSimple: {
        const auto& now = rows_of(q, rs.entity_set->name);
        const auto& before = rows_of(q0, rs.entity_set->name);
        const auto& labels = entries_of(q, rs.label_map->name);
        const auto& labels0 = entries_of(q0, rs.label_map->name);
        for (const auto& e : now) {
            auto it = labels.find(e);
            if (it == labels.end() || it->second[rs.value_index] != rs.spec.target) continue;
            if (!before.count(e)) {
                // entity leak carrying the target label
                if (rs.spec.kind == SafetyKind::TSimple) return true;
                continue;
            }
            auto it0 = labels0.find(e);
            if (it0 == labels0.end()) continue;
            if (it0->second[rs.value_index] != rs.spec.target) return true;
        }
        return false;
    }
    }
    return false;
}

bool is_leaked(const Model& m, const SafetySpec& spec, const ModelState& q0, const ModelState& q) {
    return is_leaked(resolve_safety(m, spec), q0, q);
}

AcfSpec extract_acf(const Model& m) {
    AcfSpec acf;
    for (const auto& cmd : m.delta_scheme.commands) {
        bool depends_on_ar = false;
        for (const auto& clause : cmd.pre.clauses) {
            const std::string& comp = clause_component(clause);
            if (comp.empty()) continue;
            if (m.component(comp).category == ElCategory::AR) {
                depends_on_ar = true;
                break;
            }
        }
        if (depends_on_ar) acf.alternatives.push_back({cmd.id, cmd.pre});
    }
    return acf;
}

LeakTargetReport derive_leak_targets(const AcfSpec& acf, const Model& m) {
    LeakTargetReport report;
    auto group_for = [&](const std::string& component) -> LeakGroup& {
        for (auto& g : report.groups)
            if (g.component == component) return g;
        report.groups.push_back(LeakGroup{component, std::nullopt, {}, {}, {}});
        return report.groups.back();
    };

    // Label-sort positions actually inspected by the clauses of a group,
    // needed for the relabeling-rule hint.
    std::map<std::string, std::set<std::string>> inspected_sorts;

    for (const auto& alt : acf.alternatives) {
        for (std::size_t idx = 0; idx < alt.pre.clauses.size(); ++idx) {
            const auto& clause = alt.pre.clauses[idx];
            const std::string& comp = clause_component(clause);
            if (comp.empty()) continue;
            const ComponentSchema& schema = m.component(comp);
            if (!schema.dynamic) continue; // no state change can influence static components
            LeakGroup& group = group_for(comp);
            group.clauses.emplace_back(alt.command, idx);
            if (const auto* match = std::get_if<MappingMatchClause>(&clause)) {
                for (std::size_t i = 0; i < match->pattern.size(); ++i)
                    if (!match->pattern[i].is_wildcard())
                        inspected_sorts[comp].insert(schema.value_sorts[i]);
            } else if (schema.kind == ComponentKind::Set) {
                inspected_sorts[comp].insert(schema.key_sorts[0]);
            } else if (schema.is_set_map()) {
                inspected_sorts[comp].insert(schema.value_sorts[0]);
            }
        }
    }

    for (auto& group : report.groups) {
        const ComponentSchema& schema = m.component(group.component);
        if (schema.kind == ComponentKind::Set) {
            group.kind = SafetyKind::E;
        } else if (schema.is_set_map()) {
            group.kind = SafetyKind::RSimple;
        } else if (schema.is_scalar_map()) {
            group.kind = schema.value_sorts.size() == 1 ? SafetyKind::C : SafetyKind::T;
        }
        std::set<std::string> sorts = inspected_sorts[group.component];
        for (const auto& c : m.schema) {
            if (c.category != ElCategory::RR) continue;
            bool covers = std::any_of(c.key_sorts.begin(), c.key_sorts.end(),
                                      [&](const std::string& s) { return sorts.count(s); });
            if (covers) group.rr_covering.push_back(c.name);
        }
        if (schema.is_scalar_map() && group.rr_covering.empty()) {
            std::string sort_list;
            for (const auto& s : sorts) sort_list += (sort_list.empty() ? "" : ", ") + s;
            group.hint = "no relabeling-rule component involves " +
                         (sort_list.empty() ? "this label" : "sort " + sort_list) +
                         "; assignments can only change at creation";
        } else if (!group.rr_covering.empty()) {
            std::string names;
            for (const auto& n : group.rr_covering) names += (names.empty() ? "" : ", ") + n;
            group.hint = "relabeling rules " + names + " can drive this leak dynamically";
        }
    }
    return report;
}

} // namespace depsearch
