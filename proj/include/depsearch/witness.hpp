#pragma once

// Replayable state transition sequences: the common result format of the
// heuristic search and the brute-force oracle, plus the line-oriented file
// format the CLI can write and re-verify.

#include "depsearch/safety.hpp"

namespace depsearch {

struct WitnessStep {
    std::string command;
    Binding binding;
    ModelState result;

    bool operator==(const WitnessStep&) const = default;
};

struct Witness {
    ModelState initial;
    std::vector<WitnessStep> steps; // every step changed the state

    bool operator==(const Witness&) const = default;
};

// Re-executes the steps through step(): true when every recorded state is
// reproduced exactly and the final state leaks.
bool verify_witness(const Model& m, const SafetySpec& spec, const Witness& w);

// Human-readable trace, one line per step: command, binding, changed components.
std::string witness_trace(const Witness& w);

// Machine format (schema-versioned): header lines `witness 1`, `model`,
// `safety`, `seed`, then `step <cmd> <digest> k=v ...` lines.
std::string witness_records(const Model& m, const SafetySpec& spec, std::uint64_t seed,
                            const Witness& w);

struct WitnessFileStep {
    std::string command;
    Binding binding;
    std::string digest;
};

struct WitnessFile {
    std::string model_digest;
    SafetySpec spec;
    std::uint64_t seed = 0;
    std::vector<WitnessFileStep> steps;
};

WitnessFile parse_witness_records(std::string_view text); // throws ModelError

enum class ReplayVerdict { ValidLeak, ReplayMismatch, NoLeak };
const char* to_string(ReplayVerdict verdict);

struct ReplayResult {
    ReplayVerdict verdict = ReplayVerdict::NoLeak;
    std::string detail;
    Witness witness; // states actually reached during replay
};

// Replays a witness file from q0. A step that leaves the state unchanged or
// reaches a state with a different digest is a mismatch; otherwise the final
// state decides leak / no leak. Unknown commands are an error.
ReplayResult replay_witness(const Model& m, const ModelState& q0, const WitnessFile& file);

} // namespace depsearch
