#pragma once

// Model description language front-end. The grammar reference lives in
// docs/model-language.md; in short: `sort`, `component`, `command`, `ext` and
// `state` declarations; one clause per line inside PRE:/POST: blocks; `in` /
// `not in` for membership, `=` with tuple literals for mapping matches, `_`
// for the wildcard, quoted atoms ('process') for constants inside command
// bodies. In ext/state blocks every identifier is a constant.

#include <string>
#include <string_view>

#include "depsearch/model.hpp"

namespace depsearch {

struct ParseError : std::runtime_error {
    int line = 0;
    int column = 0;

    ParseError(int line, int column, const std::string& message)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line(line), column(column) {}
};

// Parses and validates a complete model. Components must be declared before
// the commands and extents that use them.
Model parse_model(std::string_view text, std::string_view name = "");
Model parse_model_file(const std::string& path);

// Parses a `state { ... }` block against the model's dynamic components
// (used for initial-state overrides).
ModelState parse_state_file(const std::string& path, const Model& m);
ModelState parse_state(std::string_view text, const Model& m);

// Condition / update fragments: newline-separated clause lines. Component
// references are resolved against the model's schema; binding discipline is
// checked later, at command validation.
ConditionExpr parse_condition(std::string_view text, const Model& m);
std::vector<PostClause> parse_post(std::string_view text, const Model& m);

// One `command name(params) { PRE: ... POST: ... }` block, validated against
// the model.
Command parse_command(std::string_view text, const Model& m);

// --- canonical printing (parse . print == identity on the clause lists) ---

std::string print_term(const Term& t);
std::string print_clause(const AtomicClause& clause);
std::string print_post(const PostClause& clause);
std::string print_condition(const ConditionExpr& expr);
std::string print_command(const Command& cmd);
std::string print_component(const ComponentSchema& schema);
std::string print_extent_entry(const ComponentSchema& schema, const Extent& extent);
std::string print_model(const Model& m);

} // namespace depsearch
