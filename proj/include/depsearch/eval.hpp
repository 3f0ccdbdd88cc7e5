#pragma once

// Evaluation of conditions against a state and application of update clauses.
//
// eval_pre walks the clause list in order. Mapping matches extend the binding
// by pattern matching; wildcards match anything. Unbound variables in other
// positions are resolved by existential search over the referenced extent
// (virtual sink conditions need this; parsed commands never do, their
// validator enforces the binding discipline). Lookup of an absent mapping key
// makes the clause false, not an error. Enumeration order is the extents'
// sorted order, so evaluation is deterministic.

#include <optional>

#include "depsearch/ast.hpp"
#include "depsearch/state.hpp"

namespace depsearch {

struct EvalResult {
    bool satisfied = false;
    Binding binding; // input binding extended by pattern matches

    explicit operator bool() const { return satisfied; }
};

// Referencing a component that exists in neither q nor ext throws ModelError.
EvalResult eval_pre(const ConditionExpr& expr, const ModelState& q, const StaticExt& ext,
                    const Binding& b);

// Applies the clauses in order to a copy of q and returns it; components not
// mentioned keep their extent (frame rule). All terms must ground under b.
// Throws ModelError for updates on unknown/static components, unground terms
// and kind mismatches (e.g. restricting a map to a set of different arity).
ModelState apply_post(const std::vector<PostClause>& clauses, const ModelState& q, const Binding& b);

// Ground a term under a binding; wildcards and unbound variables yield
// nullopt.
std::optional<std::string> ground_term(const Term& t, const Binding& b);

} // namespace depsearch
