#include "depsearch/heuristic.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include "depsearch/eval.hpp"

namespace depsearch {

void validate_budget(const SearchBudget& budget) {
    if (!budget.max_paths || !budget.max_path_length || !budget.max_revisits ||
        budget.wall_clock_seconds <= 0)
        throw ModelError("search budget fields must be positive");
}

// --- path generation ---------------------------------------------------------

PathGenerator::PathGenerator(const Cdg& g, std::size_t max_length, std::size_t max_revisits,
                             std::size_t max_paths, Rng& rng)
    : graph_(&g), max_length_(max_length), max_revisits_(max_revisits), remaining_(max_paths) {
    adjacency_.resize(g.vertices.size());
    for (const auto& e : g.edges) adjacency_[static_cast<std::size_t>(e.from)].push_back(e.to);
    for (auto& successors : adjacency_) std::shuffle(successors.begin(), successors.end(), rng);
}

void PathGenerator::fill_level() {
    buffer_.clear();
    buffer_pos_ = 0;
    if (remaining_ == 0) {
        levels_done_ = true;
        return;
    }
    while (buffer_.empty() && !levels_done_) {
        if (level_ > max_length_) {
            levels_done_ = true;
            break;
        }
        const std::size_t want = level_ + 2; // vertices incl. both virtuals
        std::vector<int> trail{graph_->source};
        std::vector<std::size_t> occurrences(graph_->vertices.size(), 0);
        occurrences[static_cast<std::size_t>(graph_->source)] = 1;
        std::function<void(int)> extend = [&](int v) {
            if (buffer_.size() >= remaining_) return;
            if (trail.size() == want) {
                if (v == graph_->sink) buffer_.push_back(Path{trail});
                return;
            }
            for (int next : adjacency_[static_cast<std::size_t>(v)]) {
                auto& count = occurrences[static_cast<std::size_t>(next)];
                if (count >= max_revisits_) continue;
                if (next == graph_->sink && trail.size() + 1 != want) continue;
                ++count;
                trail.push_back(next);
                extend(next);
                trail.pop_back();
                --count;
            }
        };
        extend(graph_->source);
        ++level_;
    }
}

std::optional<Path> PathGenerator::next() {
    while (buffer_pos_ >= buffer_.size()) {
        if (levels_done_ || remaining_ == 0) return std::nullopt;
        fill_level();
    }
    if (remaining_) --remaining_;
    return buffer_[buffer_pos_++];
}

// --- parameter assignment ------------------------------------------------------

namespace {

constexpr std::size_t kAttemptsPerCommand = 512;

std::string fresh_value(const std::string& sort, std::size_t index) {
    return "fresh-" + sort + "-" + std::to_string(index);
}

// Element sorts of dynamic ES sets: parameters of these sorts may take fresh
// identifiers.
std::set<std::string> entity_sorts(const Model& m) {
    std::set<std::string> sorts;
    for (const auto& c : m.schema)
        if (c.dynamic && c.category == ElCategory::ES && c.kind == ComponentKind::Set)
            sorts.insert(c.key_sorts[0]);
    return sorts;
}

// Constants of each sort occurring in the given extents.
void pool_from_extents(const Model& m, const std::map<std::string, Extent>& extents,
                       std::map<std::string, std::set<std::string>>& pools) {
    collect_constants(extents, [&](const std::string& component, std::size_t pos, bool in_key,
                                   const std::string& value) {
        const ComponentSchema* schema = m.find_component(component);
        if (!schema) return;
        const auto& sorts = in_key ? schema->key_sorts : schema->value_sorts;
        if (pos < sorts.size()) pools[sorts[pos]].insert(value);
    });
}

// Pinned values flowing across one CDG edge: where a POST clause of the
// producer can establish a PRE clause of the consumer and the consumer term
// is a constant while the producer term is a variable, that variable is
// pinned to the constant. Pins on formal parameters fix the enumeration; pins
// on pattern-bound variables act as filters during PRE evaluation (a bound
// variable only matches its value).
using PinSet = std::map<std::string, std::string>;

void collect_pins(const PostClause& post, const AtomicClause& pre, std::vector<PinSet>& out) {
    const std::string& comp = post_component(post);
    if (comp.empty() || comp != clause_component(pre)) return;
    auto aligned = [&](const TermVec& produced, const TermVec& required,
                       PinSet& pins) -> bool {
        if (produced.size() != required.size()) return false;
        for (std::size_t i = 0; i < produced.size(); ++i) {
            const Term& p = produced[i];
            const Term& r = required[i];
            if (p.is_constant() && r.is_constant() && p.text != r.text) return false;
            if (p.is_variable() && r.is_constant()) {
                auto [it, inserted] = pins.emplace(p.text, r.text);
                if (!inserted && it->second != r.text) return false;
            }
        }
        return true;
    };
    PinSet pins;
    bool ok = std::visit(
        Overloaded{
            [&](const MembershipClause& c) {
                const auto* ins = std::get_if<SetInsert>(&post);
                if (!ins || c.negated || ins->tuple.size() != 1) return false;
                for (const auto& el : c.elements) {
                    PinSet candidate;
                    if (aligned(ins->tuple, {el}, candidate)) {
                        pins = std::move(candidate);
                        return true;
                    }
                }
                return false;
            },
            [&](const RelationClause& c) {
                const auto* ins = std::get_if<SetInsert>(&post);
                return ins && aligned(ins->tuple, c.tuple, pins);
            },
            [&](const MappingMatchClause& c) {
                const auto* upd = std::get_if<MapUpdate>(&post);
                return upd && aligned(upd->key, c.key, pins) && aligned(upd->value, c.pattern, pins);
            },
            [&](const ContainmentClause& c) {
                const auto* ins = std::get_if<CellInsert>(&post);
                return ins && aligned(ins->key, c.key, pins) &&
                       aligned(TermVec{ins->element}, TermVec{c.element}, pins);
            },
            [&](const TruthClause&) { return false; },
        },
        pre);
    if (ok && !pins.empty()) out.push_back(std::move(pins));
}

struct AssignContext {
    const Model& m;
    const std::vector<const Command*>& commands; // real path positions
    const std::vector<std::vector<PinSet>>& pin_sets;
    std::set<std::string> fresh_sorts;
    std::map<std::string, std::set<std::string>> ext_pool{};
    std::size_t attempts = 0;

    std::vector<Binding> bindings{};
    std::map<std::string, std::size_t> fresh_next{};

    bool exhausted() const { return attempts > kAttemptsPerCommand * commands.size(); }

    // Candidate values for a parameter sort in the current state: known
    // constants in sorted order, then the fresh window.
    std::vector<std::string> pool(const ModelState& q, const std::string& sort,
                                  std::size_t fresh_window) {
        std::map<std::string, std::set<std::string>> pools;
        pool_from_extents(m, q.extents, pools);
        std::set<std::string> values = std::move(pools[sort]);
        auto ext_it = ext_pool.find(sort);
        if (ext_it != ext_pool.end()) values.insert(ext_it->second.begin(), ext_it->second.end());
        std::vector<std::string> out(values.begin(), values.end());
        if (fresh_sorts.count(sort)) {
            std::size_t base = fresh_next[sort];
            for (std::size_t i = 0; i < fresh_window; ++i) {
                std::string fresh = fresh_value(sort, base + i);
                if (!values.count(fresh)) out.push_back(fresh);
            }
        }
        return out;
    }

    bool search(std::size_t pos, const ModelState& q) {
        if (pos == commands.size()) return true;
        const Command& cmd = *commands[pos];
        std::map<std::string, std::size_t> sort_param_count;
        for (const auto& p : cmd.params) ++sort_param_count[p.sort];

        std::map<std::string, std::size_t> fresh_checkpoint = fresh_next;
        for (const auto& pins : pin_sets[pos]) {
            Binding seed(pins.begin(), pins.end());
            if (enumerate(pos, q, cmd, std::move(seed), 0, sort_param_count)) return true;
            fresh_next = fresh_checkpoint;
            if (exhausted()) return false;
        }
        return false;
    }

    // Backtracking over the command's parameters in declaration order.
    bool enumerate(std::size_t pos, const ModelState& q, const Command& cmd, Binding binding,
                   std::size_t param_idx, const std::map<std::string, std::size_t>& windows) {
        if (exhausted()) return false;
        if (param_idx == cmd.params.size()) {
            ++attempts;
            EvalResult pre = eval_pre(cmd.pre, q, m.ext, binding);
            if (!pre) return false;
            ModelState next = apply_post(cmd.post, q, pre.binding);
            if (next == q) return false; // idle transition: cannot contribute
            std::map<std::string, std::size_t> checkpoint = fresh_next;
            consume_fresh(binding);
            // record the formal parameters only; pattern pins are implied by
            // them and replay must not depend on the pin seeding
            Binding record;
            for (const auto& p : cmd.params) record.emplace(p.name, binding.at(p.name));
            bindings.push_back(std::move(record));
            if (search(pos + 1, next)) return true;
            bindings.pop_back();
            fresh_next = std::move(checkpoint);
            return false;
        }
        const Param& param = cmd.params[param_idx];
        if (binding.count(param.name))
            return enumerate(pos, q, cmd, std::move(binding), param_idx + 1, windows);
        for (const auto& value : pool(q, param.sort, windows.at(param.sort))) {
            Binding next = binding;
            next[param.name] = value;
            if (enumerate(pos, q, cmd, std::move(next), param_idx + 1, windows)) return true;
            if (exhausted()) return false;
        }
        return false;
    }

    void consume_fresh(const Binding& binding) {
        for (const auto& [_, value] : binding) {
            for (const auto& sort : fresh_sorts) {
                std::string prefix = "fresh-" + sort + "-";
                if (value.rfind(prefix, 0) != 0) continue;
                std::string suffix = value.substr(prefix.size());
                if (suffix.empty() ||
                    suffix.find_first_not_of("0123456789") != std::string::npos)
                    continue;
                auto& next = fresh_next[sort];
                next = std::max(next, std::stoul(suffix) + 1);
            }
        }
    }
};

} // namespace

std::optional<PathAssignment> baseline_assign_params(const Model& m, const Cdg& g, const Path& path,
                                                     const ModelState& q0, Rng& rng) {
    if (path.vertices.size() < 2) return std::nullopt;
    std::vector<const Command*> commands;
    for (std::size_t i = 1; i + 1 < path.vertices.size(); ++i)
        commands.push_back(&g.vertex(path.vertices[i]));

    // Pin-sets per position, from the justification against the next path
    // element (the sink included: its PRE carries the target constant).
    std::vector<std::vector<PinSet>> pin_sets(commands.size());
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const Command& producer = *commands[i];
        const Command& consumer = g.vertex(path.vertices[i + 2]);
        std::vector<PinSet> pins;
        for (const auto& post : producer.post)
            for (const auto& pre : consumer.pre.clauses) collect_pins(post, pre, pins);
        std::sort(pins.begin(), pins.end(), [](const PinSet& a, const PinSet& b) {
            return a.size() != b.size() ? a.size() > b.size() : a < b;
        });
        pins.erase(std::unique(pins.begin(), pins.end()), pins.end());
        pins.push_back(PinSet{}); // unpinned fallback
        pin_sets[i] = std::move(pins);
    }
    (void)rng; // candidate order is deterministic; the rng seat is kept for CSP variants

    AssignContext ctx{m, commands, pin_sets, entity_sorts(m)};
    pool_from_extents(m, m.ext.extents, ctx.ext_pool);
    if (!ctx.search(0, q0)) return std::nullopt;
    return PathAssignment{std::move(ctx.bindings)};
}

// --- hook selection ------------------------------------------------------------

namespace {

bool entity_label_shaped(const Model& m) {
    const ComponentSchema* es = nullptr;
    for (const auto& c : m.schema) {
        if (!c.dynamic) continue;
        if (c.category == ElCategory::ES && c.kind == ComponentKind::Set) {
            if (es) return false;
            es = &c;
        }
    }
    if (!es) return false;
    for (const auto& c : m.schema) {
        if (!c.dynamic || c.name == es->name) continue;
        if (c.category != ElCategory::LA || !c.is_scalar_map() || c.key_sorts != es->key_sorts)
            return false;
    }
    return true;
}

} // namespace

HookSet make_hooks(const Model& m, const SafetySpec& spec) {
    ResolvedSafety rs = resolve_safety(m, spec);
    HookSet hooks;
    hooks.is_leaked = [rs](const ModelState& q0, const ModelState& q) {
        return is_leaked(rs, q0, q);
    };
    hooks.create_cdg_sink = [](const Model& model, const SafetySpec& target) {
        return make_cdg_sink(model, target);
    };
    if (entity_label_shaped(m)) {
        hooks.create_cdg_source = [](const Model& model, const ModelState& q) {
            return selx_create_cdg_source(model, q);
        };
    } else {
        hooks.create_cdg_source = [](const Model& model, const ModelState& q) {
            return generic_create_cdg_source(model, q);
        };
    }
    switch (spec.kind) {
    case SafetyKind::RSimple:
        hooks.build_pred_set = [](const Model& model, const TransitionScheme& delta,
                                  const Command& succ) {
            return hru_build_pred_set(model, delta, succ);
        };
        break;
    case SafetyKind::C:
    case SafetyKind::T:
    case SafetyKind::TSimple: {
        std::string label = rs.label_map->name;
        std::size_t index = rs.value_index;
        hooks.build_pred_set = [label, index](const Model& model, const TransitionScheme& delta,
                                              const Command& succ) {
            return label_build_pred_set(model, delta, succ, label, index);
        };
        break;
    }
    case SafetyKind::E:
        hooks.build_pred_set = [](const Model& model, const TransitionScheme& delta,
                                  const Command& succ) {
            return generic_build_pred_set(model, delta, succ);
        };
        break;
    }
    hooks.assign_params = [](const Model& model, const Cdg& g, const Path& path,
                             const ModelState& q0, Rng& rng) {
        return baseline_assign_params(model, g, path, q0, rng);
    };
    return hooks;
}

// --- the main loop --------------------------------------------------------------

namespace {

struct SharedSearch {
    std::mutex mutex;
    PathGenerator generator;
    SearchStats stats;
    std::optional<Witness> witness;
    std::atomic<bool> done{false};
    std::chrono::steady_clock::time_point deadline;

    SharedSearch(const Cdg& g, const SearchBudget& budget, Rng& rng)
        : generator(g, budget.max_path_length, budget.max_revisits, budget.max_paths, rng) {}
};

// Runs one path end to end; returns the witness when a transition leaks.
std::optional<Witness> try_path(const Model& m, const Cdg& g, const HookSet& hooks,
                                const Path& path, const ModelState& q0, Rng& rng,
                                std::size_t& transitions) {
    auto assignment = hooks.assign_params(m, g, path, q0, rng);
    if (!assignment) return std::nullopt;
    Witness w;
    w.initial = q0;
    ModelState q = q0;
    for (std::size_t i = 0; i + 2 < path.vertices.size(); ++i) {
        const Command& cmd = g.vertex(path.vertices[i + 1]);
        ModelState next = step(m, q, cmd.id, assignment->bindings[i]);
        ++transitions;
        if (!(next == q)) w.steps.push_back({cmd.id, assignment->bindings[i], next});
        q = std::move(next);
        if (hooks.is_leaked(q0, q)) return w; // leak mid-path is still a leak
    }
    return std::nullopt;
}

} // namespace

SearchOutcome fds_search(const Model& m, const SafetySpec& spec, const HookSet& hooks,
                         const SearchBudget& budget, unsigned jobs) {
    validate_budget(budget);
    if (!hooks.complete()) throw ModelError("incomplete hook set for the search");
    const ModelState& q0 = m.q0;
    Cdg g = cdg_assembly(m, q0, spec, hooks);

    Rng path_rng(budget.seed);
    SharedSearch shared(g, budget, path_rng);
    shared.deadline = std::chrono::steady_clock::now() +
                      std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                          std::chrono::duration<double>(budget.wall_clock_seconds));

    auto worker = [&](unsigned index) {
        Rng rng(budget.seed + index);
        while (!shared.done.load()) {
            std::optional<Path> path;
            {
                std::lock_guard<std::mutex> lock(shared.mutex);
                if (std::chrono::steady_clock::now() > shared.deadline) {
                    shared.stats.wall_clock_hit = true;
                    break;
                }
                path = shared.generator.next();
                if (!path) break;
                ++shared.stats.paths_tried;
            }
            std::size_t transitions = 0;
            auto witness = try_path(m, g, hooks, *path, q0, rng, transitions);
            {
                std::lock_guard<std::mutex> lock(shared.mutex);
                shared.stats.states_visited += transitions;
                if (witness && !shared.witness) {
                    shared.witness = std::move(witness);
                    shared.done.store(true);
                }
            }
        }
    };

    if (jobs <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> threads;
        for (unsigned i = 0; i < jobs; ++i) threads.emplace_back(worker, i);
        for (auto& t : threads) t.join();
    }
    return SearchOutcome{std::move(shared.witness), shared.stats};
}

} // namespace depsearch
