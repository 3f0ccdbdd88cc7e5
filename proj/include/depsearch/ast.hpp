#pragma once

// Condition language: the restricted conjunctive fragment in which PRE and
// POST conditions of commands are written. A condition is an ordered list of
// atomic clauses; a post-condition is an ordered list of update clauses.
// Anything not mentioned by an update clause is left unchanged (frame rule).

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace depsearch {

struct Term {
    enum class Kind { Constant, Variable, Wildcard };

    Kind kind = Kind::Wildcard;
    std::string text; // empty for wildcards

    static Term constant(std::string value) { return {Kind::Constant, std::move(value)}; }
    static Term variable(std::string name) { return {Kind::Variable, std::move(name)}; }
    static Term wildcard() { return {Kind::Wildcard, {}}; }

    bool is_constant() const { return kind == Kind::Constant; }
    bool is_variable() const { return kind == Kind::Variable; }
    bool is_wildcard() const { return kind == Kind::Wildcard; }

    bool operator==(const Term&) const = default;
};

using TermVec = std::vector<Term>;

// x in X / { x, y } in X / x not in X. For arity-1 set components `elements`
// lists one or more members; negation is restricted to a single element.
struct MembershipClause {
    std::string component;
    TermVec elements;
    bool negated = false;

    bool operator==(const MembershipClause&) const = default;
};

// (a, b) in rel — one tuple element of a relation-kind component.
struct RelationClause {
    std::string component;
    TermVec tuple;

    bool operator==(const RelationClause&) const = default;
};

// f(k) = (p1, ..., pn) — pattern match against a scalar-valued mapping.
// Unbound variables in the pattern are bound by the match; wildcards match
// anything and bind nothing.
struct MappingMatchClause {
    std::string component;
    TermVec key;
    TermVec pattern;

    bool operator==(const MappingMatchClause&) const = default;
};

// x in f(k) — containment in a set-valued mapping cell. Absent keys denote
// the empty cell.
struct ContainmentClause {
    Term element;
    std::string component;
    TermVec key;

    bool operator==(const ContainmentClause&) const = default;
};

struct TruthClause {
    bool operator==(const TruthClause&) const = default;
};

using AtomicClause =
    std::variant<TruthClause, MembershipClause, RelationClause, MappingMatchClause, ContainmentClause>;

// Conjunction, evaluated in clause order (pattern matches bind left to right).
struct ConditionExpr {
    std::vector<AtomicClause> clauses;

    static ConditionExpr truth() { return ConditionExpr{{TruthClause{}}}; }
    bool is_truth_only() const;

    bool operator==(const ConditionExpr&) const = default;
};

// --- post-condition clauses ---

struct SetInsert {
    std::string component;
    TermVec tuple;

    bool operator==(const SetInsert&) const = default;
};

struct SetDelete {
    std::string component;
    TermVec tuple;

    bool operator==(const SetDelete&) const = default;
};

// f[key -> value]
struct MapUpdate {
    std::string component;
    TermVec key;
    TermVec value;

    bool operator==(const MapUpdate&) const = default;
};

// f restricted to the keys currently in `to_set` (a set-kind component of the
// same arity as f's key).
struct MapRestrict {
    std::string component;
    std::string to_set;

    bool operator==(const MapRestrict&) const = default;
};

// f[key -> f(key) u {element}] for a set-valued mapping.
struct CellInsert {
    std::string component;
    TermVec key;
    Term element;

    bool operator==(const CellInsert&) const = default;
};

struct PostTruth {
    bool operator==(const PostTruth&) const = default;
};

using PostClause = std::variant<PostTruth, SetInsert, SetDelete, MapUpdate, MapRestrict, CellInsert>;

// Assignment of variable names to constant values. Ordered so that every
// consumer iterates deterministically.
using Binding = std::map<std::string, std::string>;

// Name of the component an atomic clause refers to; empty for truth.
const std::string& clause_component(const AtomicClause& clause);
const std::string& post_component(const PostClause& clause);

// Flat clause access (both directions are trivially the stored lists; these
// exist so static analyses iterate conditions uniformly).
const std::vector<AtomicClause>& clauses_of(const ConditionExpr& expr);

// Visitor helper.
template <class... Fs>
struct Overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

} // namespace depsearch
