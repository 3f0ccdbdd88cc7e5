#include "depsearch/witness.hpp"

#include <sstream>

namespace depsearch {

bool verify_witness(const Model& m, const SafetySpec& spec, const Witness& w) {
    ResolvedSafety rs = resolve_safety(m, spec);
    ModelState q = w.initial;
    for (const auto& s : w.steps) {
        ModelState next = step(m, q, s.command, s.binding);
        if (!(next == s.result)) return false;
        q = std::move(next);
    }
    if (w.steps.empty()) return false;
    return is_leaked(rs, w.initial, q);
}

namespace {

std::string binding_text(const Binding& b) {
    std::string out;
    for (const auto& [k, v] : b) {
        if (!out.empty()) out += ", ";
        out += k + "=" + v;
    }
    return out;
}

} // namespace

std::string witness_trace(const Witness& w) {
    std::ostringstream os;
    os << "initial state " << state_digest(w.initial) << '\n';
    const ModelState* prev = &w.initial;
    for (std::size_t i = 0; i < w.steps.size(); ++i) {
        const auto& s = w.steps[i];
        os << (i + 1) << ". " << s.command << '(' << binding_text(s.binding) << ") -> changed:";
        for (const auto& c : changed_components(*prev, s.result)) os << ' ' << c;
        os << '\n';
        prev = &s.result;
    }
    return std::move(os).str();
}

std::string witness_records(const Model& m, const SafetySpec& spec, std::uint64_t seed,
                            const Witness& w) {
    std::ostringstream os;
    os << "witness 1\n";
    os << "model " << model_digest(m) << '\n';
    os << "safety " << to_string(spec.kind) << ' ' << spec.target << '\n';
    os << "seed " << seed << '\n';
    for (const auto& s : w.steps) {
        os << "step " << s.command << ' ' << state_digest(s.result);
        for (const auto& [k, v] : s.binding) os << ' ' << k << '=' << v;
        os << '\n';
    }
    return std::move(os).str();
}

WitnessFile parse_witness_records(std::string_view text) {
    WitnessFile file;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    bool versioned = false;
    auto fail = [&](const std::string& msg) {
        throw ModelError("witness file line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        if (head == "witness") {
            std::string version;
            ls >> version;
            if (version != "1") fail("unsupported version '" + version + "'");
            versioned = true;
        } else if (head == "model") {
            ls >> file.model_digest;
        } else if (head == "safety") {
            std::string kind;
            ls >> kind >> file.spec.target;
            auto parsed = safety_kind_from_string(kind);
            if (!parsed) fail("unknown safety kind '" + kind + "'");
            file.spec.kind = *parsed;
        } else if (head == "seed") {
            ls >> file.seed;
        } else if (head == "step") {
            WitnessFileStep step;
            ls >> step.command >> step.digest;
            if (step.command.empty() || step.digest.empty()) fail("malformed step record");
            std::string pair;
            while (ls >> pair) {
                auto eq = pair.find('=');
                if (eq == std::string::npos) fail("malformed binding '" + pair + "'");
                step.binding[pair.substr(0, eq)] = pair.substr(eq + 1);
            }
            file.steps.push_back(std::move(step));
        } else {
            fail("unknown record '" + head + "'");
        }
    }
    if (!versioned) throw ModelError("witness file misses the 'witness 1' header");
    return file;
}

const char* to_string(ReplayVerdict verdict) {
    switch (verdict) {
    case ReplayVerdict::ValidLeak: return "valid-leak";
    case ReplayVerdict::ReplayMismatch: return "replay-mismatch";
    case ReplayVerdict::NoLeak: return "no-leak";
    }
    return "?";
}

ReplayResult replay_witness(const Model& m, const ModelState& q0, const WitnessFile& file) {
    ReplayResult result;
    result.witness.initial = q0;
    ModelState q = q0;
    for (std::size_t i = 0; i < file.steps.size(); ++i) {
        const auto& s = file.steps[i];
        ModelState next = step(m, q, s.command, s.binding); // throws on unknown command
        if (next == q) {
            result.verdict = ReplayVerdict::ReplayMismatch;
            result.detail = "step " + std::to_string(i + 1) + " (" + s.command +
                            ") left the state unchanged";
            return result;
        }
        if (state_digest(next) != s.digest) {
            result.verdict = ReplayVerdict::ReplayMismatch;
            result.detail = "step " + std::to_string(i + 1) + " (" + s.command +
                            ") reached a state with a different digest";
            return result;
        }
        result.witness.steps.push_back({s.command, s.binding, next});
        q = std::move(next);
    }
    bool leaked = !file.steps.empty() && is_leaked(m, file.spec, q0, q);
    result.verdict = leaked ? ReplayVerdict::ValidLeak : ReplayVerdict::NoLeak;
    if (!leaked) result.detail = "replay succeeded but the final state does not leak";
    return result;
}

} // namespace depsearch
