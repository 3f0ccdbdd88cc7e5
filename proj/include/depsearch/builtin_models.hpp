#pragma once

// Built-in model instantiations: the classic HRU matrix model with the
// delegateRead sample command, and the SELX model of SELinux type
// enforcement (entities labeled with security contexts, class assignments,
// role/type transition relations, allow rules). Both are defined in the
// model language (see models/ for the shipped copies with demo instances);
// the builders parse the embedded sources.

#include <set>

#include "depsearch/model.hpp"

namespace depsearch {

// Schema + commands only (no ext/state blocks).
const std::string& hru_model_source();
const std::string& selx_model_source();

// HRU: dynamic S, O, acm : S x O -> 2^R, static R. Delta = {delegateRead}
// plus the caller's extra commands. q0 is empty; instances come from state
// files or are built programmatically.
Model build_hru(const std::set<std::string>& rights, const TransitionScheme& extra = {});

// SELX: dynamic E, cl, con; static C, U, R, T, role_tr, type_tr, P, allow.
// Delta = {create, remove, relabel, access}. The ext must cover all static
// components and declare the 'process' class.
Model build_selx(const StaticExt& ext);

// Instance invariants beyond schema shape: domain(cl) = domain(con) = E,
// context values componentwise in U x R x T, class values in C, relation
// extents within their label sets, allow keys/cells within T/C/P.
void validate_selx_instance(const Model& m, const ModelState& q);

// acm keys within S x O, cells within R.
void validate_hru_instance(const Model& m, const ModelState& q);

} // namespace depsearch
