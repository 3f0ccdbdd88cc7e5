#include "depsearch/builtin_models.hpp"

#include "depsearch/dsl.hpp"

namespace depsearch {

namespace {

const std::string kHruSource = R"(sort subject
sort object
sort right

component S : set(subject) dynamic ES
component O : set(object) dynamic ES
component acm : map((subject, object) -> set(right)) dynamic AR
component R : set(right) static LS

command delegateRead(s1: subject, s2: subject, o: object) {
  PRE:
    'read_right' in acm(s1, o)
  POST:
    acm(s2, o) += 'read_right'
}
)";

const std::string kSelxSource = R"(sort entity
sort class
sort user
sort role
sort type
sort perm

component E : set(entity) dynamic ES
component cl : map(entity -> class) dynamic LA
component con : map(entity -> (user, role, type)) dynamic LA
component C : set(class) static LS
component U : set(user) static LS
component R : set(role) static LS
component T : set(type) static LS
component role_tr : relation(role, role) static RR
component type_tr : relation(type, type, type) static RR
component P : set(perm) static AR
component allow : map((type, type, class) -> set(perm)) static AR

command create(e: entity, e2: entity, c2: class) {
  PRE:
    e in E
    e2 not in E
    c2 in C
    con(e) = (u, r, t)
  POST:
    E += e2
    cl(e2) := (c2)
    con(e2) := (u, r, t)
}

command remove(e: entity) {
  PRE:
    e in E
  POST:
    E -= e
    restrict cl to E
    restrict con to E
}

command relabel(e: entity, f: entity, r2: role, t2: type) {
  PRE:
    e in E
    cl(e) = ('process')
    con(e) = (u, r, t)
    con(f) = (_, _, tf)
    (r, r2) in role_tr
    (t, tf, t2) in type_tr
  POST:
    con(e) := (u, r2, t2)
}

command access(e: entity, e2: entity, p: perm) {
  PRE:
    { e, e2 } in E
    cl(e) = ('process')
    cl(e2) = (c2)
    con(e) = (_, _, t)
    con(e2) = (_, _, t2)
    p in allow(t, t2, c2)
  POST:
    true
}
)";

const std::set<Tuple>& set_rows(const Model& m, const std::map<std::string, Extent>& extents,
                                const std::string& name) {
    auto it = extents.find(name);
    if (it == extents.end()) throw ModelError(m.name + ": missing extent for '" + name + "'");
    return std::get<SetExtent>(it->second).rows;
}

} // namespace

const std::string& hru_model_source() { return kHruSource; }
const std::string& selx_model_source() { return kSelxSource; }

Model build_hru(const std::set<std::string>& rights, const TransitionScheme& extra) {
    Model m = parse_model(kHruSource, "hru");
    SetExtent r_extent;
    for (const auto& right : rights) r_extent.rows.insert(Tuple{right});
    m.ext.extents["R"] = std::move(r_extent);
    for (const auto& cmd : extra.commands) {
        if (m.delta_scheme.find(cmd.id))
            throw ModelError("hru: duplicate command '" + cmd.id + "'");
        validate_command(m, cmd);
        m.delta_scheme.commands.push_back(cmd);
    }
    validate_model(m);
    validate_hru_instance(m, m.q0);
    return m;
}

Model build_selx(const StaticExt& ext) {
    Model m = parse_model(kSelxSource, "selx");
    m.ext = ext;
    validate_model(m);
    if (!set_rows(m, m.ext.extents, "C").count(Tuple{"process"}))
        throw ModelError("selx: ext must declare the 'process' class");
    validate_selx_instance(m, m.q0);
    return m;
}

void validate_selx_instance(const Model& m, const ModelState& q) {
    const auto& entities = set_rows(m, q.extents, "E");
    const auto& classes = set_rows(m, m.ext.extents, "C");
    const auto& users = set_rows(m, m.ext.extents, "U");
    const auto& roles = set_rows(m, m.ext.extents, "R");
    const auto& types = set_rows(m, m.ext.extents, "T");
    const auto& perms = set_rows(m, m.ext.extents, "P");

    const auto& cl = std::get<MapExtent>(q.extents.at("cl")).entries;
    const auto& con = std::get<MapExtent>(q.extents.at("con")).entries;
    for (const auto& e : entities) {
        if (!cl.count(e)) throw ModelError("selx: entity '" + e[0] + "' has no class assignment");
        if (!con.count(e)) throw ModelError("selx: entity '" + e[0] + "' has no security context");
    }
    for (const auto& [e, c] : cl) {
        if (!entities.count(e)) throw ModelError("selx: cl defined for unknown entity '" + e[0] + "'");
        if (!classes.count(c)) throw ModelError("selx: unknown class '" + c[0] + "'");
    }
    for (const auto& [e, ctx] : con) {
        if (!entities.count(e)) throw ModelError("selx: con defined for unknown entity '" + e[0] + "'");
        if (!users.count(Tuple{ctx[0]})) throw ModelError("selx: unknown user '" + ctx[0] + "'");
        if (!roles.count(Tuple{ctx[1]})) throw ModelError("selx: unknown role '" + ctx[1] + "'");
        if (!types.count(Tuple{ctx[2]})) throw ModelError("selx: unknown type '" + ctx[2] + "'");
    }
    for (const auto& row : set_rows(m, m.ext.extents, "role_tr"))
        if (!roles.count(Tuple{row[0]}) || !roles.count(Tuple{row[1]}))
            throw ModelError("selx: role_tr mentions unknown role");
    for (const auto& row : set_rows(m, m.ext.extents, "type_tr"))
        for (const auto& t : row)
            if (!types.count(Tuple{t})) throw ModelError("selx: type_tr mentions unknown type '" + t + "'");
    for (const auto& [key, cell] : std::get<SetMapExtent>(m.ext.extents.at("allow")).cells) {
        if (!types.count(Tuple{key[0]}) || !types.count(Tuple{key[1]}))
            throw ModelError("selx: allow key mentions unknown type");
        if (!classes.count(Tuple{key[2]}))
            throw ModelError("selx: allow key mentions unknown class '" + key[2] + "'");
        for (const auto& p : cell)
            if (!perms.count(Tuple{p}))
                throw ModelError("selx: allow cell mentions unknown permission '" + p + "'");
    }
}

void validate_hru_instance(const Model& m, const ModelState& q) {
    const auto& subjects = set_rows(m, q.extents, "S");
    const auto& objects = set_rows(m, q.extents, "O");
    const auto& rights = set_rows(m, m.ext.extents, "R");
    for (const auto& [key, cell] : std::get<SetMapExtent>(q.extents.at("acm")).cells) {
        if (!subjects.count(Tuple{key[0]}) || !objects.count(Tuple{key[1]}))
            throw ModelError("hru: acm key (" + key[0] + ", " + key[1] + ") outside S x O");
        for (const auto& r : cell)
            if (!rights.count(Tuple{r})) throw ModelError("hru: unknown right '" + r + "'");
    }
}

} // namespace depsearch
