#include "depsearch/oracle.hpp"

#include <deque>
#include <sstream>

#include "depsearch/eval.hpp"

namespace depsearch {

void validate_bounds(const OracleBounds& bounds) {
    if (!bounds.max_depth || !bounds.max_fresh_per_sort || !bounds.max_states)
        throw ModelError("oracle bounds must be positive");
}

const char* to_string(OracleVerdict verdict) {
    switch (verdict) {
    case OracleVerdict::Witness: return "witness";
    case OracleVerdict::SafeWithinBounds: return "safe-within-bounds";
    case OracleVerdict::BoundsExceeded: return "bounds-exceeded";
    }
    return "?";
}

namespace {

std::string fresh_value(const std::string& sort, std::size_t index) {
    return "fresh-" + sort + "-" + std::to_string(index);
}

// Dedupe key: the serialized state with every constant outside the model's
// declared universe replaced by a placeholder in first-occurrence order.
// Equal keys imply isomorphic states; the reverse need not hold, which only
// costs extra exploration, never soundness.
std::string canonical_key(const ModelState& q, const std::set<std::string>& universe) {
    std::map<std::string, std::string> rename;
    std::ostringstream os;
    auto emit = [&](const std::string& value) {
        if (universe.count(value)) {
            os << value;
            return;
        }
        auto [it, inserted] = rename.emplace(value, "~" + std::to_string(rename.size()));
        os << it->second;
        (void)inserted;
    };
    auto emit_tuple = [&](const Tuple& t) {
        os << '(';
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i) os << ',';
            emit(t[i]);
        }
        os << ')';
    };
    for (const auto& [name, extent] : q.extents) {
        os << name << '=';
        if (const auto* set = std::get_if<SetExtent>(&extent)) {
            for (const auto& row : set->rows) emit_tuple(row);
        } else if (const auto* map = std::get_if<MapExtent>(&extent)) {
            for (const auto& [key, value] : map->entries) {
                emit_tuple(key);
                os << ':';
                emit_tuple(value);
            }
        } else {
            for (const auto& [key, cell] : std::get<SetMapExtent>(extent).cells) {
                emit_tuple(key);
                os << ":{";
                bool first = true;
                for (const auto& el : cell) {
                    if (!first) os << ',';
                    first = false;
                    emit(el);
                }
                os << '}';
            }
        }
        os << ';';
    }
    return std::move(os).str();
}

struct Node {
    ModelState state;
    int parent = -1;
    std::string command;
    Binding binding;
    std::size_t depth = 0;
};

} // namespace

OracleResult bfs_unsafe(const Model& m, const SafetySpec& spec, const OracleBounds& bounds,
                        bool canonical_dedupe) {
    validate_bounds(bounds);
    ResolvedSafety rs = resolve_safety(m, spec);
    OracleResult result;

    // Value universe: everything mentioned by the model plus the target.
    std::set<std::string> universe;
    auto declared = constants_by_sort(m);
    for (const auto& [_, values] : declared) universe.insert(values.begin(), values.end());
    universe.insert(spec.target);

    // Fresh pools per entity sort; an e-kind target that exists nowhere yet
    // must itself be producible.
    std::map<std::string, std::vector<std::string>> fresh_pool;
    for (const auto& c : m.schema) {
        if (!c.dynamic || c.category != ElCategory::ES || c.kind != ComponentKind::Set) continue;
        auto& pool = fresh_pool[c.key_sorts[0]];
        if (pool.empty()) {
            if (spec.kind == SafetyKind::E && c.key_sorts[0] == rs.target_sort &&
                !declared[rs.target_sort].count(spec.target))
                pool.push_back(spec.target);
            for (std::size_t i = 0; pool.size() < bounds.max_fresh_per_sort; ++i)
                pool.push_back(fresh_value(c.key_sorts[0], i));
        }
    }

    std::map<std::string, std::set<std::string>> ext_values;
    collect_constants(m.ext.extents, [&](const std::string& component, std::size_t pos, bool in_key,
                                         const std::string& value) {
        const ComponentSchema* schema = m.find_component(component);
        if (!schema) return;
        const auto& sorts = in_key ? schema->key_sorts : schema->value_sorts;
        if (pos < sorts.size()) ext_values[sorts[pos]].insert(value);
    });

    auto candidate_pool = [&](const ModelState& q) {
        std::map<std::string, std::set<std::string>> pools = ext_values;
        collect_constants(q.extents, [&](const std::string& component, std::size_t pos, bool in_key,
                                         const std::string& value) {
            const ComponentSchema* schema = m.find_component(component);
            if (!schema) return;
            const auto& sorts = in_key ? schema->key_sorts : schema->value_sorts;
            if (pos < sorts.size()) pools[sorts[pos]].insert(value);
        });
        std::map<std::string, std::vector<std::string>> out;
        for (auto& [sort, values] : pools) out[sort].assign(values.begin(), values.end());
        for (const auto& [sort, pool] : fresh_pool) {
            auto& values = out[sort];
            for (const auto& fresh : pool)
                if (std::find(values.begin(), values.end(), fresh) == values.end())
                    values.push_back(fresh);
        }
        return out;
    };

    std::vector<Node> nodes;
    nodes.push_back({m.q0, -1, {}, {}, 0});
    std::set<std::string> visited;
    visited.insert(canonical_dedupe ? canonical_key(m.q0, universe) : serialize_state(m.q0));

    auto build_witness = [&](int leaf) {
        Witness w;
        w.initial = m.q0;
        std::vector<int> chain;
        for (int i = leaf; i > 0; i = nodes[static_cast<std::size_t>(i)].parent) chain.push_back(i);
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            const Node& n = nodes[static_cast<std::size_t>(*it)];
            w.steps.push_back({n.command, n.binding, n.state});
        }
        return w;
    };

    std::deque<int> frontier{0};
    bool truncated = false;
    while (!frontier.empty()) {
        int index = frontier.front();
        frontier.pop_front();
        const std::size_t depth = nodes[static_cast<std::size_t>(index)].depth;
        result.depth_reached = std::max(result.depth_reached, depth);
        if (depth >= bounds.max_depth) continue;
        auto pools = candidate_pool(nodes[static_cast<std::size_t>(index)].state);
        for (const auto& cmd : m.delta_scheme.commands) {
            // Enumerate parameter bindings lexicographically.
            std::vector<const std::vector<std::string>*> domains;
            bool empty_domain = false;
            for (const auto& p : cmd.params) {
                auto it = pools.find(p.sort);
                if (it == pools.end() || it->second.empty()) {
                    empty_domain = true;
                    break;
                }
                domains.push_back(&it->second);
            }
            if (empty_domain) continue;
            std::vector<std::size_t> pick(cmd.params.size(), 0);
            for (;;) {
                Binding b;
                for (std::size_t i = 0; i < cmd.params.size(); ++i)
                    b[cmd.params[i].name] = (*domains[i])[pick[i]];
                const ModelState& state = nodes[static_cast<std::size_t>(index)].state;
                ModelState next = step(m, state, cmd.id, b);
                if (!(next == state)) {
                    std::string key =
                        canonical_dedupe ? canonical_key(next, universe) : serialize_state(next);
                    if (visited.insert(std::move(key)).second) {
                        if (nodes.size() >= bounds.max_states) {
                            truncated = true;
                        } else {
                            nodes.push_back({std::move(next), index, cmd.id, b, depth + 1});
                            int ni = static_cast<int>(nodes.size()) - 1;
                            if (is_leaked(rs, m.q0, nodes.back().state)) {
                                result.verdict = OracleVerdict::Witness;
                                result.witness = build_witness(ni);
                                result.states_explored = nodes.size();
                                result.depth_reached = depth + 1;
                                return result;
                            }
                            frontier.push_back(ni);
                        }
                    }
                }
                // advance the odometer
                std::size_t i = 0;
                for (; i < pick.size(); ++i) {
                    if (++pick[i] < domains[i]->size()) break;
                    pick[i] = 0;
                }
                if (i == pick.size()) break;
                if (truncated) break;
            }
            if (truncated) break;
        }
        if (truncated) break;
    }
    result.states_explored = nodes.size();
    result.verdict = truncated ? OracleVerdict::BoundsExceeded : OracleVerdict::SafeWithinBounds;
    return result;
}

} // namespace depsearch
