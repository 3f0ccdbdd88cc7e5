// Acceptance suite: one criterion per entry, one PASS/FAIL line each.
// Run all with ./acceptance, a single one with ./acceptance --only N.

#include <chrono>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "depsearch/cli.hpp"
#include "depsearch/eval.hpp"
#include "support/fixtures.hpp"
#include "support/model_gen.hpp"

using namespace depsearch;
using namespace depsearch::testing;

namespace {

struct Check {
    std::vector<std::string> failures;
    std::string info;

    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;
    std::function<void(Check&)> run;
};

// --- shared helpers ----------------------------------------------------------

ModelState random_selx_state(std::mt19937_64& rng) {
    std::vector<std::string> pool{"p1", "f1", "x1", "x2"};
    std::vector<std::string> types{"t0", "tf", "t1"};
    std::vector<std::string> classes{"process", "file"};
    ModelState q;
    SetExtent entities;
    MapExtent cl, con;
    for (const auto& e : pool) {
        if (rng() % 2) continue;
        entities.rows.insert(Tuple{e});
        cl.entries[Tuple{e}] = Tuple{classes[rng() % classes.size()]};
        con.entries[Tuple{e}] = Tuple{"u0", "r0", types[rng() % types.size()]};
    }
    q.extents["E"] = entities;
    q.extents["cl"] = cl;
    q.extents["con"] = con;
    return q;
}

std::string run_analyze(const RunConfig& cfg, int& status) {
    std::ostringstream out, err;
    status = cmd_analyze(cfg, out, err);
    return out.str();
}

// --- criteria ------------------------------------------------------------------

void criterion_1_golden_selx(Check& c) {
    Model selx = build_selx(selx_onestep().ext);
    auto expected = expected_selx_commands();
    c.require(selx.delta_scheme.commands.size() == 4, "four basic commands");
    for (std::size_t i = 0; i < expected.size() && i < selx.delta_scheme.commands.size(); ++i) {
        const Command& got = selx.delta_scheme.commands[i];
        c.require(got.id == expected[i].id, "command order: " + expected[i].id);
        c.require(got.params == expected[i].params, expected[i].id + " parameter list");
        c.require(got.pre == expected[i].pre, expected[i].id + " PRE clause list");
        c.require(got.post == expected[i].post, expected[i].id + " POST clause list");
    }
    const Command* access = selx.delta_scheme.find("access");
    c.require(access && access->pre.clauses.size() == 6, "access has 6 PRE clauses");
}

void criterion_2_acf(Check& c) {
    Model selx = build_selx(selx_onestep().ext);
    AcfSpec acf = extract_acf(selx);
    c.require(acf.alternatives.size() == 1, "exactly one ACF disjunct");
    c.require(!acf.alternatives.empty() && acf.alternatives[0].command == "access",
              "the disjunct is PRE(access)");

    LeakTargetReport report = derive_leak_targets(acf, selx);
    c.require(report.groups.size() == 3, "exactly three leak target groups");
    std::map<std::string, const LeakGroup*> groups;
    for (const auto& g : report.groups) groups[g.component] = &g;
    auto expect = [&](const char* comp, SafetyKind kind,
                      std::vector<std::pair<std::string, std::size_t>> clauses) {
        auto it = groups.find(comp);
        if (it == groups.end()) {
            c.require(false, std::string("group over ") + comp);
            return;
        }
        c.require(it->second->kind == kind, std::string(comp) + " maps to " + to_string(kind));
        c.require(it->second->clauses == clauses, std::string(comp) + " clause subset");
    };
    expect("E", SafetyKind::E, {{"access", 0}});
    expect("cl", SafetyKind::C, {{"access", 1}, {"access", 2}});
    expect("con", SafetyKind::T, {{"access", 3}, {"access", 4}});
    for (const auto& g : report.groups)
        for (const auto& [cmd, idx] : g.clauses)
            c.require(idx != 5, "the allow clause (index 5) is excluded");
}

void criterion_3_one_step(Check& c) {
    SafetySpec spec{SafetyKind::T, "t1"};
    Binding expected{{"e", "p1"}, {"f", "f1"}, {"r2", "r0"}, {"t2", "t1"}};

    Model selx = selx_onestep();
    OracleResult oracle = bfs_unsafe(selx, spec, OracleBounds{});
    c.require(oracle.verdict == OracleVerdict::Witness, "oracle finds a witness");
    if (oracle.witness) {
        c.require(oracle.witness->steps.size() == 1, "oracle witness has length 1");
        c.require(oracle.witness->steps[0].command == "relabel" &&
                      oracle.witness->steps[0].binding == expected,
                  "oracle witness is relabel(p1, f1, r0, t1)");
    }

    SearchBudget budget;
    budget.seed = 1;
    SearchOutcome heuristic = fds_search(selx, spec, make_hooks(selx, spec), budget);
    c.require(heuristic.leak_found(), "heuristic finds a witness");
    if (heuristic.witness) {
        c.require(heuristic.witness->steps.size() == 1, "heuristic witness has length 1");
        c.require(heuristic.witness->steps[0].command == "relabel" &&
                      heuristic.witness->steps[0].binding == expected,
                  "heuristic witness is relabel(p1, f1, r0, t1)");
    }

    // cmd_replay validates the emitted witness file
    std::string witness_path = "/tmp/depsearch_acceptance_onestep.dsw";
    RunConfig cfg;
    cfg.model_path = repo_path("models/selx_onestep.acm");
    cfg.safety_kind = "t";
    cfg.target = "t1";
    cfg.budget.seed = 1;
    cfg.witness_out = witness_path;
    int status = 0;
    run_analyze(cfg, status);
    c.require(status == 0, "cmd_analyze exits 0");
    RunConfig rp;
    rp.mode = "replay";
    rp.model_path = cfg.model_path;
    rp.witness_in = witness_path;
    std::ostringstream out, err;
    int replay_status = cmd_replay(rp, out, err);
    c.require(replay_status == 0 && out.str().find("valid-leak") != std::string::npos,
              "cmd_replay confirms valid-leak");
}

void criterion_4_chain(Check& c) {
    Model chain = selx_chain();
    SafetySpec spec{SafetyKind::T, "t1"};

    OracleResult oracle = bfs_unsafe(chain, spec, OracleBounds{});
    c.require(oracle.verdict == OracleVerdict::Witness, "oracle finds a witness");
    c.require(oracle.witness && oracle.witness->steps.size() == 2,
              "oracle shortest witness has length 2");
    OracleResult depth1 = bfs_unsafe(chain, spec, OracleBounds{1, 2, 100000});
    c.require(depth1.verdict == OracleVerdict::SafeWithinBounds,
              "no length-1 witness exists");

    SearchBudget budget;
    budget.max_paths = 500;
    budget.seed = 1;
    SearchOutcome heuristic = fds_search(chain, spec, make_hooks(chain, spec), budget);
    c.require(heuristic.leak_found(), "heuristic finds a witness within 500 paths");
    if (heuristic.witness) {
        c.require(heuristic.witness->steps.size() >= 2, "witness needs at least two steps");
        c.require(verify_witness(chain, spec, *heuristic.witness), "heuristic witness replays");
    }
}

void criterion_5_differential(Check& c) {
    const std::size_t n_models = 200;
    std::size_t oracle_leaks = 0;
    std::size_t heuristic_hits = 0;
    std::size_t misses = 0;
    std::size_t unsound = 0;
    std::size_t oracle_bounded = 0;

    for (std::uint64_t seed = 1; seed <= n_models; ++seed) {
        GeneratedCase gen = generate_case(seed);
        HookSet hooks;
        try {
            hooks = make_hooks(gen.model, gen.spec);
        } catch (const ModelError&) {
            continue;
        }
        OracleResult oracle = bfs_unsafe(gen.model, gen.spec, OracleBounds{6, 2, 20000});
        if (oracle.verdict == OracleVerdict::BoundsExceeded) ++oracle_bounded;
        SearchBudget budget;
        budget.max_paths = 2000;
        budget.max_path_length = 8;
        budget.max_revisits = 8;
        budget.seed = seed;
        SearchOutcome heuristic = fds_search(gen.model, gen.spec, hooks, budget);
        if (heuristic.leak_found() && !verify_witness(gen.model, gen.spec, *heuristic.witness)) {
            ++unsound;
            c.require(false, "unsound witness on seed " + std::to_string(seed));
        }
        if (oracle.verdict != OracleVerdict::Witness) continue;
        ++oracle_leaks;
        if (heuristic.leak_found()) {
            ++heuristic_hits;
        } else {
            ++misses;
        }
    }

    double miss_rate = oracle_leaks ? double(misses) / double(oracle_leaks) : 0.0;
    std::ostringstream info;
    info << "oracle leaks " << oracle_leaks << "/" << n_models << " (bounded " << oracle_bounded
         << "), heuristic hits " << heuristic_hits << ", misses " << misses << " (rate "
         << miss_rate * 100.0 << "%), unsound " << unsound;
    c.info = info.str();
    c.require(oracle_leaks >= 10, "enough leaking cases to be meaningful");
    c.require(unsound == 0, "zero unsound witnesses");
    c.require(miss_rate < 0.10, "heuristic miss rate below 10%");
}

void criterion_6_decomposition(Check& c) {
    Model selx = selx_onestep();
    ResolvedSafety t_spec = resolve_safety(selx, {SafetyKind::T, "t1"});
    ResolvedSafety ts_spec = resolve_safety(selx, {SafetyKind::TSimple, "t1"});
    std::mt19937_64 rng(12345);
    for (int i = 0; i < 1000; ++i) {
        ModelState q0 = random_selx_state(rng);
        ModelState q1 = random_selx_state(rng);
        bool fresh_with_target = false;
        const auto& e0 = std::get<SetExtent>(q0.extents.at("E")).rows;
        const auto& e1 = std::get<SetExtent>(q1.extents.at("E")).rows;
        const auto& con1 = std::get<MapExtent>(q1.extents.at("con")).entries;
        for (const auto& e : e1) {
            if (e0.count(e)) continue;
            auto it = con1.find(e);
            if (it != con1.end() && it->second[2] == "t1") fresh_with_target = true;
        }
        bool lhs = is_leaked(ts_spec, q0, q1);
        bool rhs = is_leaked(t_spec, q0, q1) || fresh_with_target;
        if (lhs != rhs) {
            c.require(false, "decomposition mismatch at iteration " + std::to_string(i));
            return;
        }
    }
}

void criterion_7_frame_rule(Check& c) {
    std::mt19937_64 rng(777);
    Model selx = selx_onestep();
    Model hru = hru_demo();
    auto constants_selx = constants_by_sort(selx);
    auto constants_hru = constants_by_sort(hru);

    auto run_one = [&](const Model& m, const std::map<std::string, std::set<std::string>>& consts,
                       const ModelState& q) {
        const Command& cmd = m.delta_scheme.commands[rng() % m.delta_scheme.commands.size()];
        Binding b;
        for (const auto& p : cmd.params) {
            auto it = consts.find(p.sort);
            if (it == consts.end() || it->second.empty()) return;
            auto pos = rng() % it->second.size();
            b[p.name] = *std::next(it->second.begin(), static_cast<long>(pos));
        }
        ModelState next = step(m, q, cmd.id, b);
        std::set<std::string> touched;
        for (const auto& post : cmd.post)
            if (!post_component(post).empty()) touched.insert(post_component(post));
        for (const auto& [name, extent] : q.extents) {
            if (touched.count(name)) continue;
            if (!(next.extents.at(name) == extent)) {
                c.require(false, "frame violation: " + cmd.id + " changed " + name);
                return;
            }
        }
    };

    for (int i = 0; i < 500; ++i) run_one(selx, constants_selx, random_selx_state(rng));
    for (int i = 0; i < 500; ++i) run_one(hru, constants_hru, hru.q0);
}

void criterion_8_determinism(Check& c) {
    for (const char* format : {"text", "records"}) {
        RunConfig cfg;
        cfg.model_path = repo_path("models/selx_chain.acm");
        cfg.safety_kind = "t";
        cfg.target = "t1";
        cfg.budget.seed = 33;
        cfg.format = format;
        cfg.witness_out = std::string("/tmp/depsearch_acceptance_det_a_") + format + ".dsw";
        int status_a = 0;
        std::string out_a = run_analyze(cfg, status_a);
        cfg.witness_out = std::string("/tmp/depsearch_acceptance_det_b_") + format + ".dsw";
        int status_b = 0;
        std::string out_b = run_analyze(cfg, status_b);
        c.require(status_a == status_b, std::string("equal exit codes (") + format + ")");
        c.require(out_a == out_b, std::string("byte-identical reports (") + format + ")");
        std::ifstream fa(std::string("/tmp/depsearch_acceptance_det_a_") + format + ".dsw");
        std::ifstream fb(std::string("/tmp/depsearch_acceptance_det_b_") + format + ".dsw");
        std::ostringstream ba, bb;
        ba << fa.rdbuf();
        bb << fb.rdbuf();
        c.require(ba.str() == bb.str(), std::string("byte-identical witness files (") + format + ")");
        c.require(!ba.str().empty(), "witness file written");
    }
}

void criterion_9_cdg_structure(Check& c) {
    Model selx = selx_onestep();
    SafetySpec spec{SafetyKind::T, "t1"};
    Cdg g = cdg_assembly(selx, selx.q0, spec, make_hooks(selx, spec));
    c.require(g.in_degree(g.source) == 0, "in-degree of the source is 0");
    c.require(g.out_degree(g.sink) == 0, "out-degree of the sink is 0");
    auto offending = check_cdg_justification(g);
    for (const auto& edge : offending) c.require(false, "unjustified edge " + edge);
    c.require(!g.edges.empty(), "the graph has edges");
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    }

    std::vector<Criterion> criteria{
        {1, "golden selx command set", 1.0, criterion_1_golden_selx},
        {2, "acf extraction and leak target derivation", 1.0, criterion_2_acf},
        {3, "one-step leak (oracle, heuristic, replay)", 1.0, criterion_3_one_step},
        {4, "chained leak with shortest length 2", 10.0, criterion_4_chain},
        {5, "differential fuzzing against the oracle", 300.0, criterion_5_differential},
        {6, "t-simple decomposition property", 10.0, criterion_6_decomposition},
        {7, "frame rule under step", 10.0, criterion_7_frame_rule},
        {8, "seed determinism of cmd_analyze", 30.0, criterion_8_determinism},
        {9, "cdg structural invariants and edge justification", 1.0, criterion_9_cdg_structure},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        if (only && criterion.id != only) continue;
        Check check;
        auto start = std::chrono::steady_clock::now();
        try {
            criterion.run(check);
        } catch (const std::exception& e) {
            check.require(false, std::string("exception: ") + e.what());
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        check.require(elapsed < criterion.time_limit_s,
                      "runtime " + std::to_string(elapsed) + "s exceeds " +
                          std::to_string(criterion.time_limit_s) + "s");
        bool ok = check.failures.empty();
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << criterion.id << ": "
                  << criterion.name << " (" << elapsed << "s)";
        if (!check.info.empty()) std::cout << " [" << check.info << "]";
        std::cout << '\n';
        for (const auto& f : check.failures) std::cout << "     - " << f << '\n';
        if (!ok) ++failures;
    }
    return failures;
}
