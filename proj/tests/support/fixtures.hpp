#pragma once

// Shared helpers for the test suites: repo paths, the bundled instances, and
// hand-written expected command bodies used as golden values.

#include <string>

#include "depsearch/builtin_models.hpp"
#include "depsearch/dsl.hpp"

namespace depsearch::testing {

inline std::string repo_path(const std::string& rel) {
    return std::string(DEPSEARCH_SOURCE_DIR) + "/" + rel;
}

inline Model load_repo_model(const std::string& rel) { return parse_model_file(repo_path(rel)); }

inline Model selx_onestep() { return load_repo_model("models/selx_onestep.acm"); }
inline Model selx_chain() { return load_repo_model("models/selx_chain.acm"); }
inline Model selx_demo() { return load_repo_model("models/selx.acm"); }
inline Model hru_demo() { return load_repo_model("models/hru.acm"); }

// The four selx commands, written out by hand term by term. This is the
// golden value the builder output is compared against; keep it independent
// of the parser and printer.
inline std::vector<Command> expected_selx_commands() {
    auto v = [](const char* name) { return Term::variable(name); };
    auto k = [](const char* value) { return Term::constant(value); };
    auto w = [] { return Term::wildcard(); };

    Command create;
    create.id = "create";
    create.params = {{"e", "entity"}, {"e2", "entity"}, {"c2", "class"}};
    create.pre.clauses = {
        MembershipClause{"E", {v("e")}, false},
        MembershipClause{"E", {v("e2")}, true},
        MembershipClause{"C", {v("c2")}, false},
        MappingMatchClause{"con", {v("e")}, {v("u"), v("r"), v("t")}},
    };
    create.post = {
        SetInsert{"E", {v("e2")}},
        MapUpdate{"cl", {v("e2")}, {v("c2")}},
        MapUpdate{"con", {v("e2")}, {v("u"), v("r"), v("t")}},
    };

    Command remove;
    remove.id = "remove";
    remove.params = {{"e", "entity"}};
    remove.pre.clauses = {MembershipClause{"E", {v("e")}, false}};
    remove.post = {
        SetDelete{"E", {v("e")}},
        MapRestrict{"cl", "E"},
        MapRestrict{"con", "E"},
    };

    Command relabel;
    relabel.id = "relabel";
    relabel.params = {{"e", "entity"}, {"f", "entity"}, {"r2", "role"}, {"t2", "type"}};
    relabel.pre.clauses = {
        MembershipClause{"E", {v("e")}, false},
        MappingMatchClause{"cl", {v("e")}, {k("process")}},
        MappingMatchClause{"con", {v("e")}, {v("u"), v("r"), v("t")}},
        MappingMatchClause{"con", {v("f")}, {w(), w(), v("tf")}},
        RelationClause{"role_tr", {v("r"), v("r2")}},
        RelationClause{"type_tr", {v("t"), v("tf"), v("t2")}},
    };
    relabel.post = {MapUpdate{"con", {v("e")}, {v("u"), v("r2"), v("t2")}}};

    Command access;
    access.id = "access";
    access.params = {{"e", "entity"}, {"e2", "entity"}, {"p", "perm"}};
    access.pre.clauses = {
        MembershipClause{"E", {v("e"), v("e2")}, false},
        MappingMatchClause{"cl", {v("e")}, {k("process")}},
        MappingMatchClause{"cl", {v("e2")}, {v("c2")}},
        MappingMatchClause{"con", {v("e")}, {w(), w(), v("t")}},
        MappingMatchClause{"con", {v("e2")}, {w(), w(), v("t2")}},
        ContainmentClause{v("p"), "allow", {v("t"), v("t2"), v("c2")}},
    };
    access.post = {PostTruth{}};

    return {create, remove, relabel, access};
}

inline Command expected_delegate_read() {
    auto v = [](const char* name) { return Term::variable(name); };
    auto k = [](const char* value) { return Term::constant(value); };
    Command cmd;
    cmd.id = "delegateRead";
    cmd.params = {{"s1", "subject"}, {"s2", "subject"}, {"o", "object"}};
    cmd.pre.clauses = {ContainmentClause{k("read_right"), "acm", {v("s1"), v("o")}}};
    cmd.post = {CellInsert{"acm", {v("s2"), v("o")}, k("read_right")}};
    return cmd;
}

} // namespace depsearch::testing
