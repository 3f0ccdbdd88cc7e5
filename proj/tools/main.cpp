#include <iostream>

#include <CLI11.hpp>

#include "depsearch/cli.hpp"

int main(int argc, char** argv) {
    using depsearch::RunConfig;
    RunConfig cfg;

    CLI::App app{"heuristic safety analysis for core-based access control models"};
    app.require_subcommand(1);

    auto add_model_opts = [&](CLI::App* sub) {
        sub->add_option("--model", cfg.model_path, "model file (searched in $DEPSEARCH_MODEL_PATH)")
            ->required();
        sub->add_option("--state", cfg.state_path, "initial-state override file");
    };
    auto add_safety_opts = [&](CLI::App* sub) {
        sub->add_option("--safety", cfg.safety_kind, "safety kind")
            ->check(CLI::IsMember({"r-simple", "e", "c", "t", "t-simple"}))
            ->required();
        sub->add_option("--target", cfg.target, "leakage target value")->required();
    };

    CLI::App* analyze = app.add_subcommand("analyze", "heuristic leak search");
    add_model_opts(analyze);
    add_safety_opts(analyze);
    analyze->add_option("--budget-paths", cfg.budget.max_paths, "paths to try");
    analyze->add_option("--budget-len", cfg.budget.max_path_length, "max commands per path");
    analyze->add_option("--budget-revisits", cfg.budget.max_revisits,
                        "max occurrences of a command per path");
    analyze->add_option("--budget-seconds", cfg.budget.wall_clock_seconds, "wall clock cap");
    analyze->add_option("--seed", cfg.budget.seed, "rng seed");
    analyze->add_option("--jobs", cfg.jobs, "parallel path exploration (relaxes determinism)");
    analyze->add_option("--format", cfg.format, "text | records")
        ->check(CLI::IsMember({"text", "records"}));
    analyze->add_option("--witness-out", cfg.witness_out, "write the witness file here");

    CLI::App* oracle = app.add_subcommand("oracle", "bounded brute-force reachability check");
    add_model_opts(oracle);
    add_safety_opts(oracle);
    oracle->add_option("--depth", cfg.bounds.max_depth, "bfs depth bound");
    oracle->add_option("--fresh", cfg.bounds.max_fresh_per_sort, "fresh values per sort");
    oracle->add_option("--max-states", cfg.bounds.max_states, "state cap");
    oracle->add_flag_callback("--no-canonical", [&] { cfg.canonical_dedupe = false; },
                              "disable fresh-identifier symmetry reduction");
    oracle->add_option("--format", cfg.format, "text | records")
        ->check(CLI::IsMember({"text", "records"}));
    oracle->add_option("--witness-out", cfg.witness_out, "write the witness file here");

    CLI::App* acf = app.add_subcommand("acf", "access control function and leak target report");
    add_model_opts(acf);
    acf->add_option("--format", cfg.format, "text | records")
        ->check(CLI::IsMember({"text", "records"}));

    CLI::App* cdg = app.add_subcommand("cdg", "command dependency graph (DOT)");
    add_model_opts(cdg);
    add_safety_opts(cdg);

    CLI::App* replay = app.add_subcommand("replay", "re-verify a witness file");
    add_model_opts(replay);
    replay->add_option("--witness", cfg.witness_in, "witness file")->required();
    replay->add_option("--format", cfg.format, "text | records")
        ->check(CLI::IsMember({"text", "records"}));

    CLI::App* simulate = app.add_subcommand("simulate", "run a command script against the model");
    add_model_opts(simulate);
    simulate->add_option("--script", cfg.script_path, "script file (one 'cmd k=v ...' per line)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    cfg.mode = app.get_subcommands().front()->get_name();
    return depsearch::run_cli(cfg, std::cout, std::cerr);
}
