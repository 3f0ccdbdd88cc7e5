#include <sstream>

#include "depsearch/dsl.hpp"

namespace depsearch {

namespace {

void write_term(std::ostream& os, const Term& t) {
    switch (t.kind) {
    case Term::Kind::Constant: os << '\'' << t.text << '\''; break;
    case Term::Kind::Variable: os << t.text; break;
    case Term::Kind::Wildcard: os << '_'; break;
    }
}

void write_paren_terms(std::ostream& os, const TermVec& terms) {
    os << '(';
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i) os << ", ";
        write_term(os, terms[i]);
    }
    os << ')';
}

// Single terms print bare; longer tuples in parentheses.
void write_tuple_terms(std::ostream& os, const TermVec& terms) {
    if (terms.size() == 1) {
        write_term(os, terms[0]);
        return;
    }
    write_paren_terms(os, terms);
}

void write_value_tuple(std::ostream& os, const Tuple& values) {
    if (values.size() == 1) {
        os << values[0];
        return;
    }
    os << '(';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os << ", ";
        os << values[i];
    }
    os << ')';
}

void write_sort_list(std::ostream& os, const std::vector<std::string>& sorts) {
    if (sorts.size() == 1) {
        os << sorts[0];
        return;
    }
    os << '(';
    for (std::size_t i = 0; i < sorts.size(); ++i) {
        if (i) os << ", ";
        os << sorts[i];
    }
    os << ')';
}

} // namespace

std::string print_term(const Term& t) {
    std::ostringstream os;
    write_term(os, t);
    return std::move(os).str();
}

std::string print_clause(const AtomicClause& clause) {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const TruthClause&) { os << "true"; },
                   [&](const MembershipClause& c) {
                       if (c.elements.size() == 1) {
                           write_term(os, c.elements[0]);
                       } else {
                           os << "{ ";
                           for (std::size_t i = 0; i < c.elements.size(); ++i) {
                               if (i) os << ", ";
                               write_term(os, c.elements[i]);
                           }
                           os << " }";
                       }
                       os << (c.negated ? " not in " : " in ") << c.component;
                   },
                   [&](const RelationClause& c) {
                       write_paren_terms(os, c.tuple);
                       os << " in " << c.component;
                   },
                   [&](const MappingMatchClause& c) {
                       os << c.component;
                       write_paren_terms(os, c.key);
                       os << " = ";
                       write_paren_terms(os, c.pattern);
                   },
                   [&](const ContainmentClause& c) {
                       write_term(os, c.element);
                       os << " in " << c.component;
                       write_paren_terms(os, c.key);
                   },
               },
               clause);
    return std::move(os).str();
}

std::string print_post(const PostClause& clause) {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const PostTruth&) { os << "true"; },
                   [&](const SetInsert& c) {
                       os << c.component << " += ";
                       write_tuple_terms(os, c.tuple);
                   },
                   [&](const SetDelete& c) {
                       os << c.component << " -= ";
                       write_tuple_terms(os, c.tuple);
                   },
                   [&](const MapUpdate& c) {
                       os << c.component;
                       write_paren_terms(os, c.key);
                       os << " := ";
                       write_paren_terms(os, c.value);
                   },
                   [&](const MapRestrict& c) {
                       os << "restrict " << c.component << " to " << c.to_set;
                   },
                   [&](const CellInsert& c) {
                       os << c.component;
                       write_paren_terms(os, c.key);
                       os << " += ";
                       write_term(os, c.element);
                   },
               },
               clause);
    return std::move(os).str();
}

std::string print_condition(const ConditionExpr& expr) {
    std::ostringstream os;
    for (const auto& clause : expr.clauses) os << print_clause(clause) << '\n';
    return std::move(os).str();
}

std::string print_command(const Command& cmd) {
    std::ostringstream os;
    os << "command " << cmd.id << '(';
    for (std::size_t i = 0; i < cmd.params.size(); ++i) {
        if (i) os << ", ";
        os << cmd.params[i].name << ": " << cmd.params[i].sort;
    }
    os << ") {\n  PRE:\n";
    for (const auto& clause : cmd.pre.clauses) os << "    " << print_clause(clause) << '\n';
    os << "  POST:\n";
    for (const auto& clause : cmd.post) os << "    " << print_post(clause) << '\n';
    os << "}\n";
    return std::move(os).str();
}

std::string print_component(const ComponentSchema& schema) {
    std::ostringstream os;
    os << "component " << schema.name << " : ";
    switch (schema.kind) {
    case ComponentKind::Set: os << "set(" << schema.key_sorts[0] << ')'; break;
    case ComponentKind::Relation: {
        os << "relation(";
        for (std::size_t i = 0; i < schema.key_sorts.size(); ++i) {
            if (i) os << ", ";
            os << schema.key_sorts[i];
        }
        os << ')';
        break;
    }
    case ComponentKind::Map: {
        os << "map(";
        write_sort_list(os, schema.key_sorts);
        os << " -> ";
        if (schema.set_valued) {
            os << "set(" << schema.value_sorts[0] << ')';
        } else {
            write_sort_list(os, schema.value_sorts);
        }
        os << ')';
        break;
    }
    }
    os << (schema.dynamic ? " dynamic " : " static ") << to_string(schema.category);
    return std::move(os).str();
}

std::string print_extent_entry(const ComponentSchema& schema, const Extent& extent) {
    std::ostringstream os;
    os << schema.name << " = { ";
    bool first = true;
    if (const auto* set = std::get_if<SetExtent>(&extent)) {
        for (const auto& row : set->rows) {
            if (!first) os << ", ";
            first = false;
            write_value_tuple(os, row);
        }
    } else if (const auto* map = std::get_if<MapExtent>(&extent)) {
        for (const auto& [key, value] : map->entries) {
            if (!first) os << ", ";
            first = false;
            write_value_tuple(os, key);
            os << " -> ";
            write_value_tuple(os, value);
        }
    } else {
        for (const auto& [key, cell] : std::get<SetMapExtent>(extent).cells) {
            if (!first) os << ", ";
            first = false;
            write_value_tuple(os, key);
            os << " -> { ";
            bool first_el = true;
            for (const auto& el : cell) {
                if (!first_el) os << ", ";
                first_el = false;
                os << el;
            }
            os << " }";
        }
    }
    os << " }";
    return std::move(os).str();
}

std::string print_model(const Model& m) {
    std::ostringstream os;
    if (!m.name.empty()) os << "model " << m.name << '\n';
    for (const auto& sort : m.sorts) os << "sort " << sort << '\n';
    os << '\n';
    for (const auto& schema : m.schema) os << print_component(schema) << '\n';
    os << '\n';
    for (const auto& cmd : m.delta_scheme.commands) os << print_command(cmd) << '\n';
    os << "ext {\n";
    for (const auto& schema : m.schema) {
        if (schema.dynamic) continue;
        os << "  " << print_extent_entry(schema, m.ext.extents.at(schema.name)) << '\n';
    }
    os << "}\n\nstate {\n";
    for (const auto& schema : m.schema) {
        if (!schema.dynamic) continue;
        os << "  " << print_extent_entry(schema, m.q0.extents.at(schema.name)) << '\n';
    }
    os << "}\n";
    return std::move(os).str();
}

std::string serialize_model(const Model& m) { return print_model(m); }

} // namespace depsearch
