#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "depsearch/cli.hpp"
#include "support/fixtures.hpp"

using namespace depsearch;
using namespace depsearch::testing;

namespace {

struct CliRun {
    int status = -1;
    std::string out;
    std::string err;
};

CliRun run(const RunConfig& cfg) {
    std::ostringstream out, err;
    CliRun result;
    result.status = run_cli(cfg, out, err);
    result.out = out.str();
    result.err = err.str();
    return result;
}

RunConfig onestep_analyze() {
    RunConfig cfg;
    cfg.mode = "analyze";
    cfg.model_path = repo_path("models/selx_onestep.acm");
    cfg.safety_kind = "t";
    cfg.target = "t1";
    cfg.budget.seed = 9;
    return cfg;
}

std::string temp_file(const std::string& name) {
    return std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") + "/" + name;
}

} // namespace

TEST_CASE("analyze exits 0 with a witness on a leaking instance") {
    CliRun r = run(onestep_analyze());
    CHECK(r.status == 0);
    CHECK(r.out.find("leak found") != std::string::npos);
    CHECK(r.out.find("relabel(e=p1, f=f1, r2=r0, t2=t1)") != std::string::npos);
}

TEST_CASE("analyze exits 2 when the budget is exhausted") {
    RunConfig cfg = onestep_analyze();
    cfg.target = "t0"; // unreachable: nothing transitions back to t0
    cfg.budget.max_paths = 30;
    CliRun r = run(cfg);
    CHECK(r.status == 2);
    CHECK(r.out.find("not a safety proof") != std::string::npos);
}

TEST_CASE("analyze exits 1 on errors") {
    RunConfig cfg = onestep_analyze();
    cfg.target = "nosuch_type";
    CliRun unknown_target = run(cfg);
    CHECK(unknown_target.status == 1);
    CHECK(unknown_target.err.find("unknown target") != std::string::npos);

    RunConfig bad = onestep_analyze();
    bad.model_path = repo_path("README.md");
    CHECK(run(bad).status == 1);

    RunConfig missing = onestep_analyze();
    missing.model_path = repo_path("models/does_not_exist.acm");
    CliRun nf = run(missing);
    CHECK(nf.status == 1);
    CHECK(nf.err.find("not found") != std::string::npos);
}

TEST_CASE("malformed model files report a location") {
    std::string path = temp_file("broken.acm");
    std::ofstream(path) << "sort entity\ncomponent E : set(entity) dynamic\n";
    RunConfig cfg = onestep_analyze();
    cfg.model_path = path;
    CliRun r = run(cfg);
    CHECK(r.status == 1);
    CHECK(r.err.find(":2:") != std::string::npos);
}

TEST_CASE("identical configurations produce byte-identical reports") {
    RunConfig cfg = onestep_analyze();
    CliRun a = run(cfg);
    CliRun b = run(cfg);
    CHECK(a.status == b.status);
    CHECK(a.out == b.out);

    cfg.format = "records";
    CliRun c = run(cfg);
    CliRun d = run(cfg);
    CHECK(c.out == d.out);
    CHECK(c.out.find("witness 1\n") == 0);
}

TEST_CASE("witness files round-trip through replay") {
    std::string path = temp_file("witness_onestep.dsw");
    RunConfig cfg = onestep_analyze();
    cfg.witness_out = path;
    REQUIRE(run(cfg).status == 0);

    RunConfig rp;
    rp.mode = "replay";
    rp.model_path = cfg.model_path;
    rp.witness_in = path;
    CliRun ok = run(rp);
    CHECK(ok.status == 0);
    CHECK(ok.out.find("valid-leak") != std::string::npos);

    // a tampered binding no longer replays
    std::string text;
    {
        std::ifstream in(path);
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    std::string tampered = text;
    auto pos = tampered.find("f=f1");
    REQUIRE(pos != std::string::npos);
    tampered.replace(pos, 4, "f=p1");
    std::string tampered_path = temp_file("witness_tampered.dsw");
    std::ofstream(tampered_path) << tampered;
    rp.witness_in = tampered_path;
    CliRun bad = run(rp);
    CHECK(bad.status == 2);
    CHECK(bad.out.find("replay-mismatch") != std::string::npos);

    // a truncated witness replays but does not leak
    std::string truncated = text.substr(0, text.find("step "));
    std::string truncated_path = temp_file("witness_truncated.dsw");
    std::ofstream(truncated_path) << truncated;
    rp.witness_in = truncated_path;
    CliRun none = run(rp);
    CHECK(none.status == 2);
    CHECK(none.out.find("no-leak") != std::string::npos);

    // witnesses recorded for a different model are rejected
    RunConfig other = rp;
    other.model_path = repo_path("models/selx_chain.acm");
    other.witness_in = path;
    CliRun mismatch = run(other);
    CHECK(mismatch.status == 1);
    CHECK(mismatch.err.find("different model") != std::string::npos);
}

TEST_CASE("oracle subcommand mirrors the exit-code contract") {
    RunConfig cfg;
    cfg.mode = "oracle";
    cfg.model_path = repo_path("models/selx_onestep.acm");
    cfg.safety_kind = "t";
    cfg.target = "t1";
    CliRun leak = run(cfg);
    CHECK(leak.status == 0);
    CHECK(leak.out.find("shortest witness has 1 step") != std::string::npos);

    cfg.target = "t0";
    cfg.bounds.max_states = 200000;
    CliRun safe = run(cfg);
    CHECK(safe.status == 2);
}

TEST_CASE("acf subcommand prints disjuncts and leak groups") {
    RunConfig cfg;
    cfg.mode = "acf";
    cfg.model_path = repo_path("models/selx_onestep.acm");
    CliRun r = run(cfg);
    CHECK(r.status == 0);
    CHECK(r.out.find("access (6 clauses)") != std::string::npos);
    CHECK(r.out.find("E -> e-unsafety") != std::string::npos);
    CHECK(r.out.find("cl -> c-unsafety") != std::string::npos);
    CHECK(r.out.find("con -> t-unsafety") != std::string::npos);

    cfg.format = "records";
    CliRun records = run(cfg);
    CHECK(records.out.find("depsearch-records 1\n") == 0);
    CHECK(records.out.find("acf-disjunct\taccess\t6") != std::string::npos);

    // a model without AR-dependent commands warns
    RunConfig hru_cfg;
    hru_cfg.mode = "acf";
    std::string path = temp_file("no_ar.acm");
    std::ofstream(path) << R"(sort entity
component E : set(entity) dynamic ES
command touch(e: entity, e2: entity) {
  PRE:
    e in E
    e2 not in E
  POST:
    E += e2
}
state {
  E = { e0 }
}
)";
    hru_cfg.model_path = path;
    CliRun warn = run(hru_cfg);
    CHECK(warn.status == 0);
    CHECK(warn.out.find("warning") != std::string::npos);
}

TEST_CASE("cdg subcommand emits deterministic DOT") {
    RunConfig cfg;
    cfg.mode = "cdg";
    cfg.model_path = repo_path("models/selx_onestep.acm");
    cfg.safety_kind = "t";
    cfg.target = "t1";
    CliRun a = run(cfg);
    CliRun b = run(cfg);
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("digraph cdg") != std::string::npos);
    // r-simple needs an access matrix; selx has none
    cfg.safety_kind = "r-simple";
    cfg.target = "read";
    CliRun bad = run(cfg);
    CHECK(bad.status == 1);
}

TEST_CASE("simulate runs a script and prints the trace") {
    std::string script = temp_file("script.txt");
    std::ofstream(script) << "relabel e=p1 f=f1 r2=r0 t2=t1\n"
                          << "access e=p1 e2=f1 p=read\n";
    RunConfig cfg;
    cfg.mode = "simulate";
    cfg.model_path = repo_path("models/selx_onestep.acm");
    cfg.script_path = script;
    CliRun r = run(cfg);
    CHECK(r.status == 0);
    CHECK(r.out.find("1. relabel(e=p1, f=f1, r2=r0, t2=t1) -> changed: con") != std::string::npos);
    CHECK(r.out.find("2. access(e=p1, e2=f1, p=read) -> no-op") != std::string::npos);
    CHECK(r.out.find("final state ") != std::string::npos);
}

TEST_CASE("the model search path environment variable is honored") {
    setenv("DEPSEARCH_MODEL_PATH", repo_path("models").c_str(), 1);
    RunConfig cfg = onestep_analyze();
    cfg.model_path = "selx_onestep.acm";
    CliRun r = run(cfg);
    CHECK(r.status == 0);
    unsetenv("DEPSEARCH_MODEL_PATH");
}
