#include "depsearch/ast.hpp"

namespace depsearch {

namespace {
const std::string kEmpty;
}

bool ConditionExpr::is_truth_only() const {
    for (const auto& c : clauses)
        if (!std::holds_alternative<TruthClause>(c)) return false;
    return true;
}

const std::string& clause_component(const AtomicClause& clause) {
    return std::visit(Overloaded{
                          [](const TruthClause&) -> const std::string& { return kEmpty; },
                          [](const MembershipClause& c) -> const std::string& { return c.component; },
                          [](const RelationClause& c) -> const std::string& { return c.component; },
                          [](const MappingMatchClause& c) -> const std::string& { return c.component; },
                          [](const ContainmentClause& c) -> const std::string& { return c.component; },
                      },
                      clause);
}

const std::string& post_component(const PostClause& clause) {
    return std::visit(Overloaded{
                          [](const PostTruth&) -> const std::string& { return kEmpty; },
                          [](const SetInsert& c) -> const std::string& { return c.component; },
                          [](const SetDelete& c) -> const std::string& { return c.component; },
                          [](const MapUpdate& c) -> const std::string& { return c.component; },
                          [](const MapRestrict& c) -> const std::string& { return c.component; },
                          [](const CellInsert& c) -> const std::string& { return c.component; },
                      },
                      clause);
}

const std::vector<AtomicClause>& clauses_of(const ConditionExpr& expr) { return expr.clauses; }

} // namespace depsearch
