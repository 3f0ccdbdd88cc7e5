#include "depsearch/cdg.hpp"

#include <algorithm>
#include <sstream>

namespace depsearch {

int Cdg::find_vertex(std::string_view id) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i].id == id) return static_cast<int>(i);
    return -1;
}

std::vector<int> Cdg::successors(int v) const {
    std::vector<int> out;
    for (const auto& e : edges)
        if (e.from == v) out.push_back(e.to);
    return out;
}

std::size_t Cdg::in_degree(int v) const {
    return static_cast<std::size_t>(
        std::count_if(edges.begin(), edges.end(), [&](const CdgEdge& e) { return e.to == v; }));
}

std::size_t Cdg::out_degree(int v) const {
    return static_cast<std::size_t>(
        std::count_if(edges.begin(), edges.end(), [&](const CdgEdge& e) { return e.from == v; }));
}

namespace {

// Scheme-level term compatibility: parameters are disregarded, so variables
// and wildcards unify with anything; constants must agree.
bool terms_unify(const Term& a, const Term& b) {
    if (a.is_constant() && b.is_constant()) return a.text == b.text;
    return true;
}

bool tuples_unify(const TermVec& a, const TermVec& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!terms_unify(a[i], b[i])) return false;
    return true;
}

// Can `post` of one command establish `pre` of another?
bool post_establishes(const PostClause& post, const AtomicClause& pre) {
    const std::string& comp = post_component(post);
    if (comp.empty() || comp != clause_component(pre)) return false;
    return std::visit(
        Overloaded{
            [&](const MembershipClause& c) {
                if (c.negated) {
                    const auto* del = std::get_if<SetDelete>(&post);
                    return del && del->tuple.size() == 1 &&
                           std::any_of(c.elements.begin(), c.elements.end(), [&](const Term& el) {
                               return terms_unify(el, del->tuple[0]);
                           });
                }
                const auto* ins = std::get_if<SetInsert>(&post);
                return ins && ins->tuple.size() == 1 &&
                       std::any_of(c.elements.begin(), c.elements.end(),
                                   [&](const Term& el) { return terms_unify(el, ins->tuple[0]); });
            },
            [&](const RelationClause& c) {
                const auto* ins = std::get_if<SetInsert>(&post);
                return ins && tuples_unify(c.tuple, ins->tuple);
            },
            [&](const MappingMatchClause& c) {
                const auto* upd = std::get_if<MapUpdate>(&post);
                return upd && tuples_unify(c.key, upd->key) && tuples_unify(c.pattern, upd->value);
            },
            [&](const ContainmentClause& c) {
                const auto* ins = std::get_if<CellInsert>(&post);
                return ins && tuples_unify(c.key, ins->key) && terms_unify(c.element, ins->element);
            },
            [&](const TruthClause&) { return false; },
        },
        pre);
}

std::vector<std::string> sorted_ids(std::set<std::string>&& ids) {
    return {ids.begin(), ids.end()};
}

} // namespace

Cdg cdg_assembly(const Model& m, const ModelState& q, const SafetySpec& target,
                 const HookSet& hooks) {
    if (!hooks.build_pred_set || !hooks.create_cdg_source || !hooks.create_cdg_sink)
        throw ModelError("incomplete hook set for CDG assembly");
    Command source_cmd = hooks.create_cdg_source(m, q);
    Command sink_cmd = hooks.create_cdg_sink(m, target);
    if (m.delta_scheme.find(source_cmd.id) || m.delta_scheme.find(sink_cmd.id))
        throw ModelError("transition scheme uses a reserved virtual command id");

    TransitionScheme delta = m.delta_scheme;
    delta.commands.push_back(source_cmd);

    Cdg g;
    std::map<std::string, int> index;
    auto add_vertex = [&](const Command& c, bool closure) {
        g.vertices.push_back(c);
        g.in_closure.push_back(closure);
        int idx = static_cast<int>(g.vertices.size()) - 1;
        index.emplace(c.id, idx);
        return idx;
    };

    g.sink = add_vertex(sink_cmd, true);
    std::set<std::pair<int, int>> edge_set;

    std::function<void(int)> predecessors = [&](int v) {
        const Command succ = g.vertex(v); // copy: vertices may grow during recursion
        for (const auto& id : hooks.build_pred_set(m, delta, succ)) {
            const Command* pred = delta.find(id);
            if (!pred) throw ModelError("build_pred_set returned unknown command '" + id + "'");
            int pi;
            auto it = index.find(id);
            if (it == index.end()) {
                pi = add_vertex(*pred, true);
                predecessors(pi);
            } else {
                pi = it->second;
            }
            edge_set.insert({pi, v});
        }
    };
    predecessors(g.sink);

    auto it = index.find(source_cmd.id);
    g.source = it != index.end() ? it->second : add_vertex(source_cmd, false);

    for (const auto& [from, to] : edge_set) g.edges.push_back({from, to, false});

    // Connectivity seeds: closure vertices with no incoming edges cannot be
    // reached from the source even though they may be executable from q.
    for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) {
        if (v == g.source || v == g.sink || !g.in_closure[static_cast<std::size_t>(v)]) continue;
        bool has_in = std::any_of(edge_set.begin(), edge_set.end(),
                                  [&](const auto& e) { return e.second == v; });
        if (!has_in) g.edges.push_back({g.source, v, true});
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

// --- build_pred_set hooks -----------------------------------------------------

std::vector<std::string> generic_build_pred_set(const Model& m, const TransitionScheme& delta,
                                                const Command& succ) {
    std::set<std::string> preds;
    for (const auto& clause : succ.pre.clauses) {
        const std::string& comp = clause_component(clause);
        if (comp.empty() || !m.component(comp).dynamic) continue;
        for (const auto& cand : delta.commands) {
            if (preds.count(cand.id)) continue;
            for (const auto& post : cand.post) {
                if (post_establishes(post, clause)) {
                    preds.insert(cand.id);
                    break;
                }
            }
        }
    }
    return sorted_ids(std::move(preds));
}

namespace {

const ComponentSchema* dynamic_ar_cell_map(const Model& m) {
    const ComponentSchema* found = nullptr;
    for (const auto& c : m.schema) {
        if (!c.dynamic || c.category != ElCategory::AR || !c.is_set_map()) continue;
        if (found) return nullptr;
        found = &c;
    }
    return found;
}

} // namespace

std::vector<std::string> hru_build_pred_set(const Model& m, const TransitionScheme& delta,
                                            const Command& succ) {
    const ComponentSchema* acm = dynamic_ar_cell_map(m);
    if (!acm) throw ModelError("no dynamic access-rule matrix in this scheme");
    // Rights PRE(succ) requires somewhere in the matrix.
    std::vector<Term> required;
    for (const auto& clause : succ.pre.clauses)
        if (const auto* cont = std::get_if<ContainmentClause>(&clause))
            if (cont->component == acm->name) required.push_back(cont->element);
    std::set<std::string> preds;
    if (required.empty()) return {};
    for (const auto& cand : delta.commands) {
        for (const auto& post : cand.post) {
            const auto* ins = std::get_if<CellInsert>(&post);
            if (!ins || ins->component != acm->name) continue;
            if (std::any_of(required.begin(), required.end(),
                            [&](const Term& r) { return terms_unify(r, ins->element); })) {
                preds.insert(cand.id);
                break;
            }
        }
    }
    return sorted_ids(std::move(preds));
}

std::vector<std::string> label_build_pred_set(const Model& m, const TransitionScheme& delta,
                                              const Command& succ, const std::string& label_map,
                                              std::size_t value_index) {
    (void)m;
    // Label terms PRE(succ) depends on.
    std::vector<Term> dep;
    for (const auto& clause : succ.pre.clauses)
        if (const auto* match = std::get_if<MappingMatchClause>(&clause))
            if (match->component == label_map && value_index < match->pattern.size())
                dep.push_back(match->pattern[value_index]);
    if (dep.empty()) return {};
    std::set<std::string> preds;
    for (const auto& cand : delta.commands) {
        for (const auto& post : cand.post) {
            const auto* upd = std::get_if<MapUpdate>(&post);
            if (!upd || upd->component != label_map || value_index >= upd->value.size()) continue;
            if (std::any_of(dep.begin(), dep.end(),
                            [&](const Term& t) { return terms_unify(t, upd->value[value_index]); })) {
                preds.insert(cand.id);
                break;
            }
        }
    }
    return sorted_ids(std::move(preds));
}

namespace {

// The security-context mapping of an entity/label scheme: the one dynamic LA
// scalar map with a composite value.
const ComponentSchema& context_map(const Model& m) {
    const ComponentSchema* found = nullptr;
    for (const auto& c : m.schema) {
        if (!c.dynamic || c.category != ElCategory::LA || !c.is_scalar_map()) continue;
        if (c.value_sorts.size() < 2) continue;
        if (found) throw ModelError("ambiguous security-context mapping");
        found = &c;
    }
    if (!found) throw ModelError("no security-context mapping in this scheme");
    return *found;
}

const ComponentSchema& entity_set_of(const Model& m) {
    const ComponentSchema* found = nullptr;
    for (const auto& c : m.schema) {
        if (!c.dynamic || c.category != ElCategory::ES || c.kind != ComponentKind::Set) continue;
        if (found) throw ModelError("ambiguous entity set");
        found = &c;
    }
    if (!found) throw ModelError("no dynamic entity set in this scheme");
    return *found;
}

} // namespace

std::vector<std::string> selx_t_build_pred_set(const Model& m, const TransitionScheme& delta,
                                               const Command& succ) {
    const ComponentSchema& con = context_map(m);
    return label_build_pred_set(m, delta, succ, con.name, con.value_sorts.size() - 1);
}

// --- virtual commands ---------------------------------------------------------

Command generic_create_cdg_source(const Model& m, const ModelState& q) {
    Command cmd;
    cmd.id = kSourceCommandId;
    cmd.pre = ConditionExpr::truth();
    for (const auto& schema : m.schema) {
        if (!schema.dynamic) continue;
        const Extent& extent = q.extents.at(schema.name);
        if (const auto* set = std::get_if<SetExtent>(&extent)) {
            for (const auto& row : set->rows) {
                TermVec tuple;
                for (const auto& v : row) tuple.push_back(Term::constant(v));
                cmd.post.push_back(SetInsert{schema.name, std::move(tuple)});
            }
        } else if (const auto* map = std::get_if<MapExtent>(&extent)) {
            for (const auto& [key, value] : map->entries) {
                TermVec k, v;
                for (const auto& x : key) k.push_back(Term::constant(x));
                for (const auto& x : value) v.push_back(Term::constant(x));
                cmd.post.push_back(MapUpdate{schema.name, std::move(k), std::move(v)});
            }
        } else {
            for (const auto& [key, cell] : std::get<SetMapExtent>(extent).cells) {
                for (const auto& el : cell) {
                    TermVec k;
                    for (const auto& x : key) k.push_back(Term::constant(x));
                    cmd.post.push_back(CellInsert{schema.name, std::move(k), Term::constant(el)});
                }
            }
        }
    }
    if (cmd.post.empty()) cmd.post.push_back(PostTruth{});
    return cmd;
}

Command selx_create_cdg_source(const Model& m, const ModelState& q) {
    const ComponentSchema& es = entity_set_of(m);
    std::vector<const ComponentSchema*> label_maps;
    for (const auto& schema : m.schema) {
        if (!schema.dynamic || schema.name == es.name) continue;
        bool label_of_entity = schema.category == ElCategory::LA && schema.is_scalar_map() &&
                               schema.key_sorts == es.key_sorts;
        if (!label_of_entity)
            throw ModelError("scheme is not entity/label shaped; use the generic source");
        label_maps.push_back(&schema);
    }
    Command cmd;
    cmd.id = kSourceCommandId;
    cmd.pre = ConditionExpr::truth();
    for (const auto& row : std::get<SetExtent>(q.extents.at(es.name)).rows) {
        cmd.post.push_back(SetInsert{es.name, {Term::constant(row[0])}});
        for (const auto* map : label_maps) {
            const auto& entries = std::get<MapExtent>(q.extents.at(map->name)).entries;
            auto it = entries.find(row);
            if (it == entries.end()) continue;
            TermVec value;
            for (const auto& x : it->second) value.push_back(Term::constant(x));
            cmd.post.push_back(MapUpdate{map->name, {Term::constant(row[0])}, std::move(value)});
        }
    }
    if (cmd.post.empty()) cmd.post.push_back(PostTruth{});
    return cmd;
}

Command make_cdg_sink(const Model& m, const SafetySpec& spec) {
    ResolvedSafety rs = resolve_safety(m, spec);
    Command cmd;
    cmd.id = kSinkCommandId;
    cmd.post.push_back(PostTruth{});
    switch (spec.kind) {
    case SafetyKind::E:
        cmd.pre.clauses.push_back(
            MembershipClause{rs.entity_set->name, {Term::constant(spec.target)}, false});
        return cmd;
    case SafetyKind::RSimple: {
        TermVec key;
        for (std::size_t i = 0; i < rs.cell_map->key_sorts.size(); ++i)
            key.push_back(Term::variable("k" + std::to_string(i)));
        cmd.pre.clauses.push_back(
            ContainmentClause{Term::constant(spec.target), rs.cell_map->name, std::move(key)});
        return cmd;
    }
    case SafetyKind::C:
    case SafetyKind::T:
    case SafetyKind::TSimple: {
        cmd.pre.clauses.push_back(
            MembershipClause{rs.entity_set->name, {Term::variable("e")}, false});
        TermVec pattern(rs.label_map->value_sorts.size(), Term::wildcard());
        pattern[rs.value_index] = Term::constant(spec.target);
        cmd.pre.clauses.push_back(
            MappingMatchClause{rs.label_map->name, {Term::variable("e")}, std::move(pattern)});
        return cmd;
    }
    }
    throw ModelError("unhandled safety kind");
}

Command selx_t_create_cdg_sink(const Model& m, const std::string& target_type) {
    return make_cdg_sink(m, SafetySpec{SafetyKind::T, target_type});
}

// --- justification -------------------------------------------------------------

bool edge_justified(const Command& from, const Command& to) {
    for (const auto& post : from.post)
        for (const auto& pre : to.pre.clauses)
            if (post_establishes(post, pre)) return true;
    return false;
}

std::vector<std::string> check_cdg_justification(const Cdg& g) {
    std::vector<std::string> offending;
    for (const auto& e : g.edges) {
        if (e.seeded) continue;
        if (!edge_justified(g.vertex(e.from), g.vertex(e.to)))
            offending.push_back(g.vertex(e.from).id + " -> " + g.vertex(e.to).id);
    }
    return offending;
}

// --- DOT export ----------------------------------------------------------------

std::string to_dot(const Model& m, const Cdg& g) {
    std::ostringstream os;
    os << "digraph cdg {\n  rankdir=LR;\n  node [shape=box];\n";
    os << "  \"" << g.vertex(g.source).id << "\" [shape=diamond, label=\"c_q\\n("
       << g.vertex(g.source).id << ")\"];\n";
    for (const auto& cmd : m.delta_scheme.commands) {
        int v = g.find_vertex(cmd.id);
        if (v >= 0 && g.in_closure[static_cast<std::size_t>(v)]) {
            os << "  \"" << cmd.id << "\";\n";
        } else {
            os << "  \"" << cmd.id << "\" [style=dashed, color=gray];\n";
        }
    }
    os << "  \"" << g.vertex(g.sink).id << "\" [shape=doubleoctagon, label=\"c_target\\n("
       << g.vertex(g.sink).id << ")\"];\n";
    std::vector<std::tuple<std::string, std::string, bool>> lines;
    for (const auto& e : g.edges)
        lines.emplace_back(g.vertex(e.from).id, g.vertex(e.to).id, e.seeded);
    std::sort(lines.begin(), lines.end());
    for (const auto& [from, to, seeded] : lines) {
        os << "  \"" << from << "\" -> \"" << to << "\"";
        if (seeded) os << " [style=dashed]";
        os << ";\n";
    }
    os << "}\n";
    return std::move(os).str();
}

} // namespace depsearch
