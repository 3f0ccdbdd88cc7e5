#include "depsearch/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace depsearch {

namespace {

enum class Tok {
    Ident,
    Atom, // quoted constant
    Wildcard,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Arrow,   // ->
    Eq,      // =
    PlusEq,  // +=
    MinusEq, // -=
    Assign,  // :=
    Newline,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int col = 1;
};

struct Lexer {
    std::string_view src;
    std::size_t pos = 0;
    int line = 1;
    int col = 1;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line, col, msg); }

    char peek(std::size_t ahead = 0) const {
        return pos + ahead < src.size() ? src[pos + ahead] : '\0';
    }

    void advance() {
        if (pos >= src.size()) return;
        if (src[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    Token next() {
        for (;;) {
            while (peek() == ' ' || peek() == '\t' || peek() == '\r') advance();
            if (peek() == '#') {
                while (peek() && peek() != '\n') advance();
                continue;
            }
            break;
        }
        Token t;
        t.line = line;
        t.col = col;
        char c = peek();
        if (!c) {
            t.kind = Tok::End;
            return t;
        }
        if (c == '\n') {
            advance();
            t.kind = Tok::Newline;
            return t;
        }
        auto two = [&](char a, char b) { return peek() == a && peek(1) == b; };
        if (two('-', '>')) {
            advance(); advance();
            t.kind = Tok::Arrow;
            return t;
        }
        if (two(':', '=')) {
            advance(); advance();
            t.kind = Tok::Assign;
            return t;
        }
        if (two('+', '=')) {
            advance(); advance();
            t.kind = Tok::PlusEq;
            return t;
        }
        if (two('-', '=')) {
            advance(); advance();
            t.kind = Tok::MinusEq;
            return t;
        }
        switch (c) {
        case '(': advance(); t.kind = Tok::LParen; return t;
        case ')': advance(); t.kind = Tok::RParen; return t;
        case '{': advance(); t.kind = Tok::LBrace; return t;
        case '}': advance(); t.kind = Tok::RBrace; return t;
        case ',': advance(); t.kind = Tok::Comma; return t;
        case ':': advance(); t.kind = Tok::Colon; return t;
        case '=': advance(); t.kind = Tok::Eq; return t;
        default: break;
        }
        if (c == '\'') {
            advance();
            std::string text;
            while (peek() && peek() != '\'' && peek() != '\n') {
                text += peek();
                advance();
            }
            if (peek() != '\'') fail("unterminated quoted constant");
            advance();
            if (text.empty()) fail("empty quoted constant");
            t.kind = Tok::Atom;
            t.text = std::move(text);
            return t;
        }
        if (c == '_' && !std::isalnum(static_cast<unsigned char>(peek(1))) && peek(1) != '_') {
            advance();
            t.kind = Tok::Wildcard;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string text;
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
                text += peek();
                advance();
            }
            t.kind = Tok::Ident;
            t.text = std::move(text);
            return t;
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

struct Parser {
    explicit Parser(std::string_view text) : lexer{text} { current = lexer.next(); }

    Lexer lexer;
    Token current;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(current.line, current.col, msg);
    }

    Token take() {
        Token t = current;
        current = lexer.next();
        return t;
    }

    bool at(Tok kind) const { return current.kind == kind; }
    bool at_keyword(std::string_view kw) const { return at(Tok::Ident) && current.text == kw; }

    void skip_newlines() {
        while (at(Tok::Newline)) take();
    }

    Token expect(Tok kind, const char* what) {
        if (!at(kind)) fail(std::string("expected ") + what);
        return take();
    }

    std::string expect_ident(const char* what) { return expect(Tok::Ident, what).text; }

    void expect_keyword(std::string_view kw) {
        if (!at_keyword(kw)) fail("expected '" + std::string(kw) + "'");
        take();
    }

    void end_of_clause() {
        if (at(Tok::Newline)) {
            skip_newlines();
            return;
        }
        if (at(Tok::RBrace) || at(Tok::End)) return;
        fail("expected end of line after clause");
    }

    // --- terms -------------------------------------------------------------

    Term parse_term(bool allow_wildcard) {
        if (at(Tok::Wildcard)) {
            if (!allow_wildcard) fail("wildcard is not allowed here");
            take();
            return Term::wildcard();
        }
        if (at(Tok::Atom)) return Term::constant(take().text);
        if (at(Tok::Ident)) return Term::variable(take().text);
        fail("expected a term");
    }

    TermVec parse_term_tuple(bool allow_wildcard) {
        TermVec terms;
        if (at(Tok::LParen)) {
            take();
            terms.push_back(parse_term(allow_wildcard));
            while (at(Tok::Comma)) {
                take();
                terms.push_back(parse_term(allow_wildcard));
            }
            expect(Tok::RParen, "')'");
            return terms;
        }
        terms.push_back(parse_term(allow_wildcard));
        return terms;
    }

    TermVec parse_paren_terms(bool allow_wildcard) {
        expect(Tok::LParen, "'('");
        TermVec terms;
        terms.push_back(parse_term(allow_wildcard));
        while (at(Tok::Comma)) {
            take();
            terms.push_back(parse_term(allow_wildcard));
        }
        expect(Tok::RParen, "')'");
        return terms;
    }

    // --- clauses -----------------------------------------------------------

    const ComponentSchema& component(const Model& m, const std::string& name, const Token& at) {
        const ComponentSchema* c = m.find_component(name);
        if (!c) throw ParseError(at.line, at.col, "unknown component '" + name + "'");
        return *c;
    }

    void check_arity(std::size_t have, std::size_t want, const Token& at, const std::string& name) {
        if (have != want)
            throw ParseError(at.line, at.col,
                             "arity mismatch for '" + name + "': got " + std::to_string(have) +
                                 ", expected " + std::to_string(want));
    }

    AtomicClause parse_pre_clause(const Model& m) {
        if (at_keyword("true")) {
            take();
            return TruthClause{};
        }
        if (at(Tok::LBrace)) { // { a, b } in X  — every listed term is a member
            take();
            TermVec elements;
            elements.push_back(parse_term(false));
            while (at(Tok::Comma)) {
                take();
                elements.push_back(parse_term(false));
            }
            expect(Tok::RBrace, "'}'");
            expect_keyword("in");
            Token name = expect(Tok::Ident, "component name");
            const auto& schema = component(m, name.text, name);
            if (schema.kind != ComponentKind::Set)
                throw ParseError(name.line, name.col,
                                 "'" + name.text + "' is not a set component");
            return MembershipClause{name.text, std::move(elements), false};
        }
        if (at(Tok::LParen)) { // (a, b) in rel
            TermVec tuple = parse_paren_terms(false);
            expect_keyword("in");
            Token name = expect(Tok::Ident, "component name");
            const auto& schema = component(m, name.text, name);
            if (schema.kind != ComponentKind::Relation)
                throw ParseError(name.line, name.col,
                                 "'" + name.text + "' is not a relation component");
            check_arity(tuple.size(), schema.key_sorts.size(), name, name.text);
            return RelationClause{name.text, std::move(tuple)};
        }
        // f(key) = pattern, when an identifier is directly followed by '('
        if (at(Tok::Ident)) {
            Token ident = take();
            if (at(Tok::LParen)) {
                const auto& schema = component(m, ident.text, ident);
                if (!schema.is_scalar_map())
                    throw ParseError(ident.line, ident.col,
                                     "'" + ident.text + "' is not a scalar mapping");
                TermVec key = parse_paren_terms(false);
                check_arity(key.size(), schema.key_sorts.size(), ident, ident.text);
                expect(Tok::Eq, "'='");
                TermVec pattern = parse_term_tuple(true);
                check_arity(pattern.size(), schema.value_sorts.size(), ident, ident.text);
                return MappingMatchClause{ident.text, std::move(key), std::move(pattern)};
            }
            return parse_membership_tail(m, Term::variable(ident.text));
        }
        Term element = parse_term(false);
        return parse_membership_tail(m, std::move(element));
    }

    AtomicClause parse_membership_tail(const Model& m, Term element) {
        bool negated = false;
        if (at_keyword("not")) {
            take();
            negated = true;
        }
        expect_keyword("in");
        Token name = expect(Tok::Ident, "component name");
        const auto& schema = component(m, name.text, name);
        if (at(Tok::LParen)) { // x in f(k, ...)
            if (negated)
                throw ParseError(name.line, name.col, "negated containment is not supported");
            if (!schema.is_set_map())
                throw ParseError(name.line, name.col,
                                 "'" + name.text + "' is not a set-valued mapping");
            TermVec key = parse_paren_terms(false);
            check_arity(key.size(), schema.key_sorts.size(), name, name.text);
            return ContainmentClause{std::move(element), name.text, std::move(key)};
        }
        if (schema.kind != ComponentKind::Set)
            throw ParseError(name.line, name.col, "'" + name.text + "' is not a set component");
        return MembershipClause{name.text, {std::move(element)}, negated};
    }

    PostClause parse_post_clause(const Model& m) {
        if (at_keyword("true")) {
            take();
            return PostTruth{};
        }
        if (at_keyword("restrict")) { // restrict f to S
            take();
            Token name = expect(Tok::Ident, "mapping component");
            const auto& schema = component(m, name.text, name);
            if (!schema.is_map())
                throw ParseError(name.line, name.col, "'" + name.text + "' is not a mapping");
            expect_keyword("to");
            Token set_name = expect(Tok::Ident, "set component");
            component(m, set_name.text, set_name);
            return MapRestrict{name.text, set_name.text};
        }
        Token ident = expect(Tok::Ident, "component name");
        const auto& schema = component(m, ident.text, ident);
        if (at(Tok::LParen)) {
            TermVec key = parse_paren_terms(false);
            check_arity(key.size(), schema.key_sorts.size(), ident, ident.text);
            if (at(Tok::Assign)) { // f(k) := value
                take();
                if (!schema.is_scalar_map())
                    throw ParseError(ident.line, ident.col,
                                     "'" + ident.text + "' is not a scalar mapping");
                TermVec value = parse_term_tuple(false);
                check_arity(value.size(), schema.value_sorts.size(), ident, ident.text);
                return MapUpdate{ident.text, std::move(key), std::move(value)};
            }
            expect(Tok::PlusEq, "':=' or '+='"); // f(k) += x
            if (!schema.is_set_map())
                throw ParseError(ident.line, ident.col,
                                 "'" + ident.text + "' is not a set-valued mapping");
            Term element = parse_term(false);
            return CellInsert{ident.text, std::move(key), std::move(element)};
        }
        if (schema.is_map())
            throw ParseError(ident.line, ident.col,
                             "updates of '" + ident.text + "' need a key, e.g. " + ident.text +
                                 "(k) := v");
        bool insert = at(Tok::PlusEq);
        if (!insert && !at(Tok::MinusEq)) fail("expected '+=' or '-='");
        take();
        TermVec tuple = parse_term_tuple(false);
        check_arity(tuple.size(), schema.key_sorts.size(), ident, ident.text);
        if (insert) return SetInsert{ident.text, std::move(tuple)};
        return SetDelete{ident.text, std::move(tuple)};
    }

    // --- declarations ------------------------------------------------------

    std::vector<std::string> parse_sort_list() {
        std::vector<std::string> sorts;
        if (at(Tok::LParen)) {
            take();
            sorts.push_back(expect_ident("sort name"));
            while (at(Tok::Comma)) {
                take();
                sorts.push_back(expect_ident("sort name"));
            }
            expect(Tok::RParen, "')'");
            return sorts;
        }
        sorts.push_back(expect_ident("sort name"));
        return sorts;
    }

    ComponentSchema parse_component(const Model& m) {
        ComponentSchema schema;
        Token name = expect(Tok::Ident, "component name");
        schema.name = name.text;
        if (m.find_component(schema.name))
            throw ParseError(name.line, name.col, "duplicate component '" + schema.name + "'");
        expect(Tok::Colon, "':'");
        Token kind = expect(Tok::Ident, "component kind (set / relation / map)");
        if (kind.text == "set") {
            schema.kind = ComponentKind::Set;
            expect(Tok::LParen, "'('");
            schema.key_sorts.push_back(expect_ident("sort name"));
            expect(Tok::RParen, "')'");
        } else if (kind.text == "relation") {
            schema.kind = ComponentKind::Relation;
            expect(Tok::LParen, "'('");
            schema.key_sorts.push_back(expect_ident("sort name"));
            while (at(Tok::Comma)) {
                take();
                schema.key_sorts.push_back(expect_ident("sort name"));
            }
            expect(Tok::RParen, "')'");
            if (schema.key_sorts.size() < 2)
                throw ParseError(kind.line, kind.col, "relations need at least two sorts");
        } else if (kind.text == "map") {
            schema.kind = ComponentKind::Map;
            expect(Tok::LParen, "'('");
            schema.key_sorts = parse_sort_list();
            expect(Tok::Arrow, "'->'");
            if (at_keyword("set")) {
                take();
                schema.set_valued = true;
                expect(Tok::LParen, "'('");
                schema.value_sorts.push_back(expect_ident("sort name"));
                expect(Tok::RParen, "')'");
            } else {
                schema.value_sorts = parse_sort_list();
            }
            expect(Tok::RParen, "')'");
        } else {
            throw ParseError(kind.line, kind.col, "unknown component kind '" + kind.text + "'");
        }
        Token dyn = expect(Tok::Ident, "'dynamic' or 'static'");
        if (dyn.text == "dynamic") {
            schema.dynamic = true;
        } else if (dyn.text == "static") {
            schema.dynamic = false;
        } else {
            throw ParseError(dyn.line, dyn.col, "expected 'dynamic' or 'static'");
        }
        Token tag = expect(Tok::Ident, "entity labeling category");
        auto cat = el_category_from_string(tag.text);
        if (!cat)
            throw ParseError(tag.line, tag.col, "unknown entity labeling category '" + tag.text + "'");
        schema.category = *cat;
        for (const auto& sort : schema.key_sorts)
            if (std::find(m.sorts.begin(), m.sorts.end(), sort) == m.sorts.end())
                throw ParseError(name.line, name.col, "unknown sort '" + sort + "'");
        for (const auto& sort : schema.value_sorts)
            if (std::find(m.sorts.begin(), m.sorts.end(), sort) == m.sorts.end())
                throw ParseError(name.line, name.col, "unknown sort '" + sort + "'");
        return schema;
    }

    Command parse_command_block(const Model& m) {
        Command cmd;
        Token name = expect(Tok::Ident, "command name");
        cmd.id = name.text;
        expect(Tok::LParen, "'('");
        if (!at(Tok::RParen)) {
            for (;;) {
                std::string pname = expect_ident("parameter name");
                expect(Tok::Colon, "':'");
                std::string sort = expect_ident("sort name");
                cmd.params.push_back({std::move(pname), std::move(sort)});
                if (!at(Tok::Comma)) break;
                take();
            }
        }
        expect(Tok::RParen, "')'");
        skip_newlines();
        expect(Tok::LBrace, "'{'");
        skip_newlines();
        expect_keyword("PRE");
        expect(Tok::Colon, "':'");
        skip_newlines();
        while (!at_keyword("POST")) {
            cmd.pre.clauses.push_back(parse_pre_clause(m));
            end_of_clause();
            if (at(Tok::RBrace) || at(Tok::End)) fail("expected POST: block");
        }
        expect_keyword("POST");
        expect(Tok::Colon, "':'");
        skip_newlines();
        while (!at(Tok::RBrace)) {
            if (at(Tok::End)) fail("expected '}'");
            cmd.post.push_back(parse_post_clause(m));
            end_of_clause();
        }
        expect(Tok::RBrace, "'}'");
        try {
            validate_command(m, cmd);
        } catch (const ModelError& e) {
            throw ParseError(name.line, name.col, e.what());
        }
        return cmd;
    }

    // --- extents -----------------------------------------------------------

    std::string parse_value() {
        if (at(Tok::Atom) || at(Tok::Ident)) return take().text;
        fail("expected a constant value");
    }

    Tuple parse_value_tuple() {
        Tuple values;
        if (at(Tok::LParen)) {
            take();
            values.push_back(parse_value());
            while (at(Tok::Comma)) {
                take();
                values.push_back(parse_value());
            }
            expect(Tok::RParen, "')'");
            return values;
        }
        values.push_back(parse_value());
        return values;
    }

    Extent parse_extent(const ComponentSchema& schema, const Token& name) {
        expect(Tok::Eq, "'='");
        expect(Tok::LBrace, "'{'");
        skip_newlines();
        auto arity_check = [&](const Tuple& t, std::size_t want, const char* what) {
            if (t.size() != want)
                throw ParseError(name.line, name.col,
                                 std::string(what) + " arity mismatch in extent of '" + schema.name +
                                     "'");
        };
        if (schema.kind != ComponentKind::Map) {
            SetExtent extent;
            while (!at(Tok::RBrace)) {
                Tuple row = parse_value_tuple();
                arity_check(row, schema.key_sorts.size(), "row");
                extent.rows.insert(std::move(row));
                skip_newlines();
                if (at(Tok::Comma)) take();
                skip_newlines();
            }
            take();
            return extent;
        }
        if (schema.set_valued) {
            SetMapExtent extent;
            while (!at(Tok::RBrace)) {
                Tuple key = parse_value_tuple();
                arity_check(key, schema.key_sorts.size(), "key");
                expect(Tok::Arrow, "'->'");
                expect(Tok::LBrace, "'{'");
                skip_newlines();
                std::set<std::string>& cell = extent.cells[key];
                while (!at(Tok::RBrace)) {
                    cell.insert(parse_value());
                    skip_newlines();
                    if (at(Tok::Comma)) take();
                    skip_newlines();
                }
                take();
                skip_newlines();
                if (at(Tok::Comma)) take();
                skip_newlines();
            }
            take();
            return extent;
        }
        MapExtent extent;
        while (!at(Tok::RBrace)) {
            Tuple key = parse_value_tuple();
            arity_check(key, schema.key_sorts.size(), "key");
            expect(Tok::Arrow, "'->'");
            Tuple value = parse_value_tuple();
            arity_check(value, schema.value_sorts.size(), "value");
            extent.entries[std::move(key)] = std::move(value);
            skip_newlines();
            if (at(Tok::Comma)) take();
            skip_newlines();
        }
        take();
        return extent;
    }

    std::map<std::string, Extent> parse_extent_block(const Model& m, bool dynamic,
                                                     const char* label) {
        std::map<std::string, Extent> extents;
        skip_newlines();
        expect(Tok::LBrace, "'{'");
        skip_newlines();
        while (!at(Tok::RBrace)) {
            Token name = expect(Tok::Ident, "component name");
            const auto& schema = component(m, name.text, name);
            if (schema.dynamic != dynamic)
                throw ParseError(name.line, name.col,
                                 "component '" + name.text + "' does not belong in " + label);
            if (extents.count(name.text))
                throw ParseError(name.line, name.col, "duplicate extent for '" + name.text + "'");
            extents.emplace(name.text, parse_extent(schema, name));
            skip_newlines();
        }
        take();
        return extents;
    }
};

Extent empty_extent(const ComponentSchema& schema) {
    if (schema.kind == ComponentKind::Map) {
        if (schema.set_valued) return SetMapExtent{};
        return MapExtent{};
    }
    return SetExtent{};
}

void fill_missing_extents(const Model& m, std::map<std::string, Extent>& extents, bool dynamic) {
    for (const auto& schema : m.schema) {
        if (schema.dynamic != dynamic) continue;
        if (!extents.count(schema.name)) extents.emplace(schema.name, empty_extent(schema));
    }
}

} // namespace

Model parse_model(std::string_view text, std::string_view name) {
    Parser p(text);
    Model m;
    m.name = name;
    bool have_state = false;
    bool have_ext = false;
    p.skip_newlines();
    while (!p.at(Tok::End)) {
        Token head = p.expect(Tok::Ident, "declaration");
        if (head.text == "model") {
            m.name = p.expect_ident("model name");
        } else if (head.text == "sort") {
            std::string sort = p.expect_ident("sort name");
            if (std::find(m.sorts.begin(), m.sorts.end(), sort) != m.sorts.end())
                throw ParseError(head.line, head.col, "duplicate sort '" + sort + "'");
            m.sorts.push_back(std::move(sort));
        } else if (head.text == "component") {
            m.schema.push_back(p.parse_component(m));
        } else if (head.text == "command") {
            Command cmd = p.parse_command_block(m);
            if (m.delta_scheme.find(cmd.id))
                throw ParseError(head.line, head.col, "duplicate command '" + cmd.id + "'");
            m.delta_scheme.commands.push_back(std::move(cmd));
        } else if (head.text == "ext") {
            if (have_ext) throw ParseError(head.line, head.col, "duplicate ext block");
            have_ext = true;
            m.ext.extents = p.parse_extent_block(m, false, "ext");
        } else if (head.text == "state") {
            if (have_state) throw ParseError(head.line, head.col, "duplicate state block");
            have_state = true;
            m.q0.extents = p.parse_extent_block(m, true, "a state block");
        } else {
            throw ParseError(head.line, head.col, "unknown declaration '" + head.text + "'");
        }
        p.skip_newlines();
    }
    fill_missing_extents(m, m.ext.extents, false);
    fill_missing_extents(m, m.q0.extents, true);
    validate_model(m);
    return m;
}

Model parse_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string name = path;
    if (auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
    if (auto dot = name.find_last_of('.'); dot != std::string::npos) name = name.substr(0, dot);
    try {
        return parse_model(buffer.str(), name);
    } catch (const ParseError& e) {
        throw ModelError(path + ":" + e.what());
    }
}

ModelState parse_state(std::string_view text, const Model& m) {
    Parser p(text);
    p.skip_newlines();
    p.expect_keyword("state");
    ModelState q;
    q.extents = p.parse_extent_block(m, true, "a state block");
    p.skip_newlines();
    if (!p.at(Tok::End)) p.fail("trailing content after state block");
    fill_missing_extents(m, q.extents, true);
    validate_state(m, q);
    return q;
}

ModelState parse_state_file(const std::string& path, const Model& m) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open state file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_state(buffer.str(), m);
    } catch (const ParseError& e) {
        throw ModelError(path + ":" + e.what());
    }
}

ConditionExpr parse_condition(std::string_view text, const Model& m) {
    Parser p(text);
    ConditionExpr expr;
    p.skip_newlines();
    while (!p.at(Tok::End)) {
        expr.clauses.push_back(p.parse_pre_clause(m));
        p.end_of_clause();
    }
    return expr;
}

std::vector<PostClause> parse_post(std::string_view text, const Model& m) {
    Parser p(text);
    std::vector<PostClause> clauses;
    p.skip_newlines();
    while (!p.at(Tok::End)) {
        clauses.push_back(p.parse_post_clause(m));
        p.end_of_clause();
    }
    return clauses;
}

Command parse_command(std::string_view text, const Model& m) {
    Parser p(text);
    p.skip_newlines();
    p.expect_keyword("command");
    Command cmd = p.parse_command_block(m);
    p.skip_newlines();
    if (!p.at(Tok::End)) p.fail("trailing content after command block");
    return cmd;
}

} // namespace depsearch
