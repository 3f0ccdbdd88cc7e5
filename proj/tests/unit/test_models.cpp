#include <doctest.h>

#include <random>

#include "support/fixtures.hpp"

using namespace depsearch;
using namespace depsearch::testing;

TEST_CASE("build_selx registers the four basic commands verbatim") {
    Model selx = build_selx(selx_onestep().ext);
    auto expected = expected_selx_commands();
    REQUIRE(selx.delta_scheme.commands.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CAPTURE(expected[i].id);
        CHECK(selx.delta_scheme.commands[i] == expected[i]);
    }
    // the shipped model file carries the same command set
    CHECK(selx_onestep().delta_scheme == selx.delta_scheme);
    CHECK(selx_demo().delta_scheme == selx.delta_scheme);
}

TEST_CASE("build_selx validates its static extension") {
    StaticExt ext = selx_onestep().ext;
    std::get<SetExtent>(ext.extents.at("C")).rows.erase(Tuple{"process"});
    CHECK_THROWS_WITH_AS(build_selx(ext), doctest::Contains("process"), ModelError);

    StaticExt bad_allow = selx_onestep().ext;
    std::get<SetMapExtent>(bad_allow.extents.at("allow")).cells[Tuple{"t0", "tf"}] = {"read"};
    CHECK_THROWS_AS(build_selx(bad_allow), ModelError);
}

TEST_CASE("selx EL classification matches the component table") {
    Model selx = build_selx(selx_onestep().ext);
    auto names = [&](ElCategory cat) {
        auto v = el_components(selx, cat);
        return std::set<std::string>(v.begin(), v.end());
    };
    CHECK(names(ElCategory::LS) == std::set<std::string>{"C", "U", "R", "T"});
    CHECK(names(ElCategory::RR) == std::set<std::string>{"role_tr", "type_tr"});
    CHECK(names(ElCategory::ES) == std::set<std::string>{"E"});
    CHECK(names(ElCategory::LA) == std::set<std::string>{"cl", "con"});
    CHECK(names(ElCategory::AR) == std::set<std::string>{"P", "allow"});
    CHECK(names(ElCategory::MC).empty());
    // dynamic components are exactly the protection-state members
    std::set<std::string> dynamic;
    for (const auto& c : selx.schema)
        if (c.dynamic) dynamic.insert(c.name);
    CHECK(dynamic == std::set<std::string>{"E", "cl", "con"});
}

TEST_CASE("selx access never changes the state") {
    Model selx = selx_onestep();
    std::mt19937_64 rng(3);
    std::vector<std::string> entities{"p1", "f1", "zz"};
    std::vector<std::string> perms{"read", "write"};
    for (int i = 0; i < 50; ++i) {
        Binding b{{"e", entities[rng() % entities.size()]},
                  {"e2", entities[rng() % entities.size()]},
                  {"p", perms[rng() % perms.size()]}};
        CHECK(step(selx, selx.q0, "access", b) == selx.q0);
    }
}

TEST_CASE("remove then recreate restores membership but labels come from the creator") {
    Model selx = selx_onestep();
    ModelState q1 = step(selx, selx.q0, "remove", {{"e", "f1"}});
    CHECK(std::get<SetExtent>(q1.extents.at("E")).rows.count(Tuple{"f1"}) == 0);
    ModelState q2 = step(selx, q1, "create", {{"e", "p1"}, {"e2", "f1"}, {"c2", "file"}});
    CHECK(std::get<SetExtent>(q2.extents.at("E")).rows.count(Tuple{"f1"}) == 1);
    // f1 now carries p1's context (u0, r0, t0), not its old (u0, r0, tf)
    CHECK(std::get<MapExtent>(q2.extents.at("con")).entries.at(Tuple{"f1"}) ==
          Tuple{"u0", "r0", "t0"});
}

TEST_CASE("build_hru ships delegateRead and accepts extra commands") {
    Model hru = build_hru({"read_right"});
    REQUIRE(hru.delta_scheme.commands.size() == 1);
    CHECK(hru.delta_scheme.commands[0] == expected_delegate_read());
    const Command& d = hru.delta_scheme.commands[0];
    REQUIRE(d.params.size() == 3);
    CHECK(d.params[0].name == "s1");
    CHECK(d.params[1].name == "s2");
    CHECK(d.params[2].name == "o");

    Model base = build_hru({"read_right", "own"});
    TransitionScheme extra;
    extra.commands.push_back(parse_command(R"(command createObject(s: subject, o2: object) {
  PRE:
    s in S
    o2 not in O
  POST:
    O += o2
    acm(s, o2) += 'own'
})",
                                           base));
    Model hru2 = build_hru({"read_right", "own"}, extra);
    CHECK(hru2.delta_scheme.commands.size() == 2);
    CHECK(hru2.delta_scheme.find("createObject") != nullptr);

    // commands touching unknown components are rejected
    TransitionScheme bogus;
    Command bad;
    bad.id = "bad";
    bad.pre = ConditionExpr::truth();
    bad.post = {SetInsert{"nosuch", {Term::constant("x")}}};
    bogus.commands.push_back(bad);
    CHECK_THROWS_AS(build_hru({"read_right"}, bogus), ModelError);
}

TEST_CASE("hru instance invariants") {
    Model hru = hru_demo();
    validate_hru_instance(hru, hru.q0);
    ModelState bad = hru.q0;
    std::get<SetMapExtent>(bad.extents.at("acm")).cells[Tuple{"s9", "o1"}] = {"read_right"};
    CHECK_THROWS_AS(validate_hru_instance(hru, bad), ModelError);
}

TEST_CASE("selx instance invariants") {
    Model selx = selx_onestep();
    validate_selx_instance(selx, selx.q0);
    ModelState bad = selx.q0;
    std::get<MapExtent>(bad.extents.at("cl")).entries.erase(Tuple{"f1"});
    CHECK_THROWS_WITH_AS(validate_selx_instance(selx, bad), doctest::Contains("class assignment"),
                         ModelError);
}
