#include "depsearch/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "depsearch/dsl.hpp"

namespace depsearch {

namespace {

constexpr const char* kModelPathEnv = "DEPSEARCH_MODEL_PATH";
constexpr const char* kRecordsHeader = "depsearch-records 1";

std::string resolve_model_path(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path)) return path;
    if (path.find('/') == std::string::npos) {
        if (const char* env = std::getenv(kModelPathEnv)) {
            std::string dirs(env);
            std::size_t start = 0;
            while (start <= dirs.size()) {
                std::size_t colon = dirs.find(':', start);
                std::string dir = dirs.substr(start, colon == std::string::npos ? std::string::npos
                                                                                : colon - start);
                if (!dir.empty()) {
                    fs::path candidate = fs::path(dir) / path;
                    if (fs::exists(candidate)) return candidate.string();
                }
                if (colon == std::string::npos) break;
                start = colon + 1;
            }
        }
    }
    throw ModelError("model file '" + path + "' not found");
}

SafetySpec parse_spec(const RunConfig& cfg) {
    auto kind = safety_kind_from_string(cfg.safety_kind);
    if (!kind) throw ModelError("unknown safety kind '" + cfg.safety_kind + "'");
    if (cfg.target.empty()) throw ModelError("missing --target value");
    return SafetySpec{*kind, cfg.target};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ModelError("cannot write '" + path + "'");
    out << content;
}

Binding parse_binding_tokens(std::istringstream& in) {
    Binding b;
    std::string pair;
    while (in >> pair) {
        auto eq = pair.find('=');
        if (eq == std::string::npos) throw ModelError("malformed binding '" + pair + "'");
        b[pair.substr(0, eq)] = pair.substr(eq + 1);
    }
    return b;
}

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace

Model load_model(const RunConfig& cfg) {
    if (cfg.model_path.empty()) throw ModelError("missing --model path");
    Model m = parse_model_file(resolve_model_path(cfg.model_path));
    if (!cfg.state_path.empty()) m.q0 = parse_state_file(cfg.state_path, m);
    return m;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        Model m = load_model(cfg);
        SafetySpec spec = parse_spec(cfg);
        HookSet hooks = make_hooks(m, spec);
        SearchOutcome outcome = fds_search(m, spec, hooks, cfg.budget, cfg.jobs);
        if (outcome.witness) {
            if (!verify_witness(m, spec, *outcome.witness))
                throw ModelError("internal error: witness failed replay verification");
            if (cfg.format == "records") {
                out << witness_records(m, spec, cfg.budget.seed, *outcome.witness);
            } else {
                out << "leak found: state is " << to_string(spec.kind) << "-unsafe for target '"
                    << spec.target << "'\n";
                out << "witness (" << outcome.witness->steps.size() << " step"
                    << (outcome.witness->steps.size() == 1 ? "" : "s") << "):\n";
                out << witness_trace(*outcome.witness);
            }
            if (!cfg.witness_out.empty())
                write_file(cfg.witness_out,
                           witness_records(m, spec, cfg.budget.seed, *outcome.witness));
            return 0;
        }
        if (cfg.format == "records") {
            out << kRecordsHeader << '\n';
            out << "result\texhausted\n";
            out << "paths\t" << outcome.stats.paths_tried << '\n';
            out << "states\t" << outcome.stats.states_visited << '\n';
        } else {
            out << "budget exhausted: no leak found for target '" << spec.target << "' ("
                << outcome.stats.paths_tried << " paths, " << outcome.stats.states_visited
                << " transitions";
            if (outcome.stats.wall_clock_hit) out << ", wall clock hit";
            out << ")\n";
            out << "note: an exhausted budget is not a safety proof\n";
        }
        return 2;
    });
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        Model m = load_model(cfg);
        SafetySpec spec = parse_spec(cfg);
        OracleResult result = bfs_unsafe(m, spec, cfg.bounds, cfg.canonical_dedupe);
        if (result.verdict == OracleVerdict::Witness) {
            if (cfg.format == "records") {
                out << witness_records(m, spec, 0, *result.witness);
            } else {
                out << "leak found: shortest witness has " << result.witness->steps.size()
                    << " step" << (result.witness->steps.size() == 1 ? "" : "s") << " ("
                    << result.states_explored << " states explored)\n";
                out << witness_trace(*result.witness);
            }
            if (!cfg.witness_out.empty())
                write_file(cfg.witness_out, witness_records(m, spec, 0, *result.witness));
            return 0;
        }
        if (cfg.format == "records") {
            out << kRecordsHeader << '\n';
            out << "result\t" << to_string(result.verdict) << '\n';
            out << "states\t" << result.states_explored << '\n';
            out << "depth\t" << result.depth_reached << '\n';
        } else {
            out << to_string(result.verdict) << ": " << result.states_explored
                << " states explored up to depth " << result.depth_reached << '\n';
            if (result.verdict == OracleVerdict::SafeWithinBounds)
                out << "note: safety holds within the bounds only\n";
        }
        return 2;
    });
}

int cmd_acf(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        Model m = load_model(cfg);
        AcfSpec acf = extract_acf(m);
        LeakTargetReport report = derive_leak_targets(acf, m);
        if (cfg.format == "records") {
            out << kRecordsHeader << '\n';
            for (const auto& alt : acf.alternatives) {
                out << "acf-disjunct\t" << alt.command << '\t' << alt.pre.clauses.size() << '\n';
                for (std::size_t i = 0; i < alt.pre.clauses.size(); ++i)
                    out << "acf-clause\t" << alt.command << '\t' << i << '\t'
                        << print_clause(alt.pre.clauses[i]) << '\n';
            }
            for (const auto& group : report.groups) {
                out << "leak-group\t" << group.component << '\t'
                    << (group.kind ? to_string(*group.kind) : "-");
                for (const auto& [cmd, idx] : group.clauses) out << '\t' << cmd << ':' << idx;
                out << '\n';
            }
            return 0;
        }
        if (acf.alternatives.empty()) {
            out << "warning: no command depends on an access-rule (AR) component; "
                   "the access control function is empty\n";
            return 0;
        }
        out << "access control function (" << acf.alternatives.size() << " disjunct"
            << (acf.alternatives.size() == 1 ? "" : "s") << "):\n";
        for (const auto& alt : acf.alternatives) {
            out << "  " << alt.command << " (" << alt.pre.clauses.size() << " clauses):\n";
            for (std::size_t i = 0; i < alt.pre.clauses.size(); ++i)
                out << "    [" << i << "] " << print_clause(alt.pre.clauses[i]) << '\n';
        }
        out << "leak target candidates (" << report.groups.size() << " group"
            << (report.groups.size() == 1 ? "" : "s") << "):\n";
        for (const auto& group : report.groups) {
            out << "  " << group.component << " -> "
                << (group.kind ? std::string(to_string(*group.kind)) + "-unsafety" : "unclassified")
                << " via clauses";
            for (const auto& [cmd, idx] : group.clauses) out << ' ' << cmd << '[' << idx << ']';
            out << '\n';
            if (!group.hint.empty()) out << "    hint: " << group.hint << '\n';
        }
        return 0;
    });
}

int cmd_cdg(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        Model m = load_model(cfg);
        SafetySpec spec = parse_spec(cfg);
        HookSet hooks = make_hooks(m, spec);
        Cdg g = cdg_assembly(m, m.q0, spec, hooks);
        out << to_dot(m, g);
        return 0;
    });
}

int cmd_replay(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        Model m = load_model(cfg);
        if (cfg.witness_in.empty()) throw ModelError("missing --witness file");
        WitnessFile file = parse_witness_records(read_file(cfg.witness_in));
        if (file.model_digest != model_digest(m))
            throw ModelError("witness was recorded for a different model (digest mismatch)");
        ReplayResult result = replay_witness(m, m.q0, file);
        if (cfg.format == "records") {
            out << kRecordsHeader << '\n';
            out << "verdict\t" << to_string(result.verdict) << '\n';
            if (!result.detail.empty()) out << "detail\t" << result.detail << '\n';
        } else {
            out << to_string(result.verdict) << '\n';
            if (!result.detail.empty()) out << result.detail << '\n';
            if (result.verdict == ReplayVerdict::ValidLeak) out << witness_trace(result.witness);
        }
        return result.verdict == ReplayVerdict::ValidLeak ? 0 : 2;
    });
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        Model m = load_model(cfg);
        if (cfg.script_path.empty()) throw ModelError("missing --script file");
        std::istringstream script(read_file(cfg.script_path));
        std::vector<std::pair<std::string, Binding>> inputs;
        std::string line;
        while (std::getline(script, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            std::string cmd;
            ls >> cmd;
            inputs.emplace_back(cmd, parse_binding_tokens(ls));
        }
        std::vector<ModelState> trace = run(m, m.q0, inputs);
        const ModelState* prev = &m.q0;
        for (std::size_t i = 0; i < trace.size(); ++i) {
            out << (i + 1) << ". " << inputs[i].first << '(';
            bool first = true;
            for (const auto& [k, v] : inputs[i].second) {
                if (!first) out << ", ";
                first = false;
                out << k << '=' << v;
            }
            out << ')';
            auto changed = changed_components(*prev, trace[i]);
            if (changed.empty()) {
                out << " -> no-op";
            } else {
                out << " -> changed:";
                for (const auto& c : changed) out << ' ' << c;
            }
            out << '\n';
            prev = &trace[i];
        }
        const ModelState& final_state = trace.empty() ? m.q0 : trace.back();
        out << "final state " << state_digest(final_state) << '\n';
        for (const auto& schema : m.schema) {
            if (!schema.dynamic) continue;
            out << "  " << print_extent_entry(schema, final_state.extents.at(schema.name)) << '\n';
        }
        return 0;
    });
}

int run_cli(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.mode == "analyze") return cmd_analyze(cfg, out, err);
    if (cfg.mode == "oracle") return cmd_oracle(cfg, out, err);
    if (cfg.mode == "acf") return cmd_acf(cfg, out, err);
    if (cfg.mode == "cdg") return cmd_cdg(cfg, out, err);
    if (cfg.mode == "replay") return cmd_replay(cfg, out, err);
    if (cfg.mode == "simulate") return cmd_simulate(cfg, out, err);
    err << "error: unknown mode '" << cfg.mode << "'\n";
    return 1;
}

} // namespace depsearch
