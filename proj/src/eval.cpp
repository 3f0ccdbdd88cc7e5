#include "depsearch/eval.hpp"

#include <functional>

namespace depsearch {

namespace {

const Extent* find_extent(const ModelState& q, const StaticExt& ext, const std::string& name) {
    if (auto it = q.extents.find(name); it != q.extents.end()) return &it->second;
    if (auto it = ext.extents.find(name); it != ext.extents.end()) return &it->second;
    return nullptr;
}

// Match a term against a concrete value, possibly extending the binding.
bool match_term(const Term& t, const std::string& value, Binding& b) {
    switch (t.kind) {
    case Term::Kind::Wildcard: return true;
    case Term::Kind::Constant: return t.text == value;
    case Term::Kind::Variable: {
        auto [it, inserted] = b.emplace(t.text, value);
        return inserted || it->second == value;
    }
    }
    return false;
}

bool match_tuple(const TermVec& terms, const Tuple& row, Binding& b) {
    if (terms.size() != row.size()) return false;
    for (std::size_t i = 0; i < terms.size(); ++i)
        if (!match_term(terms[i], row[i], b)) return false;
    return true;
}

using Yield = std::function<bool(Binding&&)>;

struct Evaluator {
    const ModelState& q;
    const StaticExt& ext;

    const Extent& extent(const std::string& name) const {
        const Extent* e = find_extent(q, ext, name);
        if (!e) throw ModelError("condition references undeclared component '" + name + "'");
        return *e;
    }

    bool satisfy(const AtomicClause& clause, Binding b, const Yield& yield) const {
        return std::visit(
            Overloaded{
                [&](const TruthClause&) { return yield(std::move(b)); },
                [&](const MembershipClause& c) { return membership(c, std::move(b), yield); },
                [&](const RelationClause& c) { return relation(c, std::move(b), yield); },
                [&](const MappingMatchClause& c) { return mapping_match(c, std::move(b), yield); },
                [&](const ContainmentClause& c) { return containment(c, std::move(b), yield); },
            },
            clause);
    }

    bool membership(const MembershipClause& c, Binding b, const Yield& yield) const {
        const auto* set = std::get_if<SetExtent>(&extent(c.component));
        if (!set) throw ModelError("'" + c.component + "' is not a set component");
        return membership_from(c, *set, 0, std::move(b), yield);
    }

    bool membership_from(const MembershipClause& c, const SetExtent& set, std::size_t idx, Binding b,
                         const Yield& yield) const {
        if (idx == c.elements.size()) return yield(std::move(b));
        const Term& t = c.elements[idx];
        auto value = ground_term(t, b);
        if (c.negated) {
            if (!value)
                throw ModelError("negated membership needs a ground term ('" + c.component + "')");
            if (set.rows.count(Tuple{*value})) return false;
            return membership_from(c, set, idx + 1, std::move(b), yield);
        }
        if (value) {
            if (!set.rows.count(Tuple{*value})) return false;
            return membership_from(c, set, idx + 1, std::move(b), yield);
        }
        for (const auto& row : set.rows) {
            if (row.size() != 1) continue;
            Binding b2 = b;
            if (!match_term(t, row[0], b2)) continue;
            if (membership_from(c, set, idx + 1, std::move(b2), yield)) return true;
        }
        return false;
    }

    bool relation(const RelationClause& c, Binding b, const Yield& yield) const {
        const auto* set = std::get_if<SetExtent>(&extent(c.component));
        if (!set) throw ModelError("'" + c.component + "' is not a relation component");
        bool all_ground = true;
        Tuple row;
        row.reserve(c.tuple.size());
        for (const auto& t : c.tuple) {
            if (auto v = ground_term(t, b)) {
                row.push_back(*v);
            } else {
                all_ground = false;
                break;
            }
        }
        if (all_ground) return set->rows.count(row) ? yield(std::move(b)) : false;
        for (const auto& candidate : set->rows) {
            Binding b2 = b;
            if (!match_tuple(c.tuple, candidate, b2)) continue;
            if (yield(std::move(b2))) return true;
        }
        return false;
    }

    bool mapping_match(const MappingMatchClause& c, Binding b, const Yield& yield) const {
        const auto* map = std::get_if<MapExtent>(&extent(c.component));
        if (!map) throw ModelError("'" + c.component + "' is not a scalar mapping component");
        bool key_ground = true;
        Tuple key;
        key.reserve(c.key.size());
        for (const auto& t : c.key) {
            if (auto v = ground_term(t, b)) {
                key.push_back(*v);
            } else {
                key_ground = false;
                break;
            }
        }
        if (key_ground) {
            auto it = map->entries.find(key);
            if (it == map->entries.end()) return false; // undefined key: clause is false
            Binding b2 = std::move(b);
            if (!match_tuple(c.pattern, it->second, b2)) return false;
            return yield(std::move(b2));
        }
        for (const auto& [k, v] : map->entries) {
            Binding b2 = b;
            if (!match_tuple(c.key, k, b2)) continue;
            if (!match_tuple(c.pattern, v, b2)) continue;
            if (yield(std::move(b2))) return true;
        }
        return false;
    }

    bool containment(const ContainmentClause& c, Binding b, const Yield& yield) const {
        const auto* map = std::get_if<SetMapExtent>(&extent(c.component));
        if (!map) throw ModelError("'" + c.component + "' is not a set-valued mapping component");
        bool key_ground = true;
        Tuple key;
        key.reserve(c.key.size());
        for (const auto& t : c.key) {
            if (auto v = ground_term(t, b)) {
                key.push_back(*v);
            } else {
                key_ground = false;
                break;
            }
        }
        if (key_ground) {
            auto it = map->cells.find(key);
            if (it == map->cells.end()) return false; // absent key: empty cell
            return containment_in_cell(c.element, it->second, std::move(b), yield);
        }
        for (const auto& [k, cell] : map->cells) {
            Binding b2 = b;
            if (!match_tuple(c.key, k, b2)) continue;
            if (containment_in_cell(c.element, cell, std::move(b2), yield)) return true;
        }
        return false;
    }

    bool containment_in_cell(const Term& element, const std::set<std::string>& cell, Binding b,
                             const Yield& yield) const {
        if (auto v = ground_term(element, b))
            return cell.count(*v) ? yield(std::move(b)) : false;
        for (const auto& el : cell) {
            Binding b2 = b;
            if (!match_term(element, el, b2)) continue;
            if (yield(std::move(b2))) return true;
        }
        return false;
    }
};

} // namespace

std::optional<std::string> ground_term(const Term& t, const Binding& b) {
    switch (t.kind) {
    case Term::Kind::Constant: return t.text;
    case Term::Kind::Variable: {
        auto it = b.find(t.text);
        if (it == b.end()) return std::nullopt;
        return it->second;
    }
    case Term::Kind::Wildcard: return std::nullopt;
    }
    return std::nullopt;
}

EvalResult eval_pre(const ConditionExpr& expr, const ModelState& q, const StaticExt& ext,
                    const Binding& b) {
    Evaluator ev{q, ext};
    EvalResult result;
    std::function<bool(std::size_t, Binding)> chain = [&](std::size_t idx, Binding current) -> bool {
        if (idx == expr.clauses.size()) {
            result.satisfied = true;
            result.binding = std::move(current);
            return true;
        }
        return ev.satisfy(expr.clauses[idx], std::move(current),
                          [&](Binding&& next) { return chain(idx + 1, std::move(next)); });
    };
    if (!chain(0, b)) result.binding = b;
    return result;
}

namespace {

Tuple ground_tuple(const TermVec& terms, const Binding& b, const std::string& component) {
    Tuple out;
    out.reserve(terms.size());
    for (const auto& t : terms) {
        auto v = ground_term(t, b);
        if (!v) throw ModelError("unground term in update of '" + component + "'");
        out.push_back(std::move(*v));
    }
    return out;
}

Extent& dynamic_extent(ModelState& q, const std::string& name) {
    auto it = q.extents.find(name);
    if (it == q.extents.end())
        throw ModelError("update targets unknown or static component '" + name + "'");
    return it->second;
}

} // namespace

ModelState apply_post(const std::vector<PostClause>& clauses, const ModelState& q, const Binding& b) {
    ModelState out = q;
    for (const auto& clause : clauses) {
        std::visit(
            Overloaded{
                [&](const PostTruth&) {},
                [&](const SetInsert& c) {
                    auto* set = std::get_if<SetExtent>(&dynamic_extent(out, c.component));
                    if (!set) throw ModelError("insert into non-set component '" + c.component + "'");
                    set->rows.insert(ground_tuple(c.tuple, b, c.component));
                },
                [&](const SetDelete& c) {
                    auto* set = std::get_if<SetExtent>(&dynamic_extent(out, c.component));
                    if (!set) throw ModelError("delete from non-set component '" + c.component + "'");
                    set->rows.erase(ground_tuple(c.tuple, b, c.component));
                },
                [&](const MapUpdate& c) {
                    auto* map = std::get_if<MapExtent>(&dynamic_extent(out, c.component));
                    if (!map)
                        throw ModelError("map update on non-scalar-map component '" + c.component + "'");
                    map->entries[ground_tuple(c.key, b, c.component)] =
                        ground_tuple(c.value, b, c.component);
                },
                [&](const MapRestrict& c) {
                    Extent& target = dynamic_extent(out, c.component);
                    auto to_it = out.extents.find(c.to_set);
                    if (to_it == out.extents.end())
                        throw ModelError("restrict of '" + c.component + "' to undeclared set '" +
                                         c.to_set + "'");
                    const auto* keep = std::get_if<SetExtent>(&to_it->second);
                    if (!keep)
                        throw ModelError("restrict target '" + c.to_set + "' is not a set component");
                    if (auto* map = std::get_if<MapExtent>(&target)) {
                        std::erase_if(map->entries,
                                      [&](const auto& e) { return !keep->rows.count(e.first); });
                    } else if (auto* cells = std::get_if<SetMapExtent>(&target)) {
                        std::erase_if(cells->cells,
                                      [&](const auto& e) { return !keep->rows.count(e.first); });
                    } else {
                        throw ModelError("restrict applies to mapping components only ('" +
                                         c.component + "')");
                    }
                },
                [&](const CellInsert& c) {
                    auto* map = std::get_if<SetMapExtent>(&dynamic_extent(out, c.component));
                    if (!map)
                        throw ModelError("cell insert on non-set-valued component '" + c.component +
                                         "'");
                    auto v = ground_term(c.element, b);
                    if (!v) throw ModelError("unground term in update of '" + c.component + "'");
                    map->cells[ground_tuple(c.key, b, c.component)].insert(std::move(*v));
                },
            },
            clause);
    }
    return out;
}

} // namespace depsearch
