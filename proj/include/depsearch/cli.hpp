#pragma once

// Command-line front-end: model loading (with DEPSEARCH_MODEL_PATH search),
// analysis orchestration, report and graph emission, witness replay.
// Exit codes are a stable contract: 0 leak / success, 2 budget exhausted or
// no leak, 1 error.

#include <iosfwd>

#include "depsearch/heuristic.hpp"
#include "depsearch/oracle.hpp"

namespace depsearch {

struct RunConfig {
    std::string mode = "analyze"; // analyze | oracle | simulate | cdg | acf | replay
    std::string model_path;
    std::string state_path; // optional q0 override
    std::string safety_kind = "t";
    std::string target;
    SearchBudget budget;
    OracleBounds bounds;
    bool canonical_dedupe = true;
    unsigned jobs = 1;
    std::string format = "text"; // text | records | dot
    std::string witness_out;    // analyze / oracle: machine witness file
    std::string witness_in;     // replay input
    std::string script_path;    // simulate input
};

// Resolves the model path (directly, then against the colon-separated
// DEPSEARCH_MODEL_PATH directories), parses it and applies the state override.
Model load_model(const RunConfig& cfg);

int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_acf(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_cdg(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_replay(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Dispatch on cfg.mode.
int run_cli(const RunConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace depsearch
