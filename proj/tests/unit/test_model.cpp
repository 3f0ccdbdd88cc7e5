#include <doctest.h>

#include <random>

#include "depsearch/eval.hpp"
#include "support/fixtures.hpp"
#include "support/model_gen.hpp"

using namespace depsearch;
using namespace depsearch::testing;

TEST_CASE("step applies POST when PRE holds and is the identity otherwise") {
    Model hru = hru_demo();
    Binding ok{{"s1", "s1"}, {"s2", "s2"}, {"o", "o1"}};
    ModelState q1 = step(hru, hru.q0, "delegateRead", ok);
    const auto& cells = std::get<SetMapExtent>(q1.extents.at("acm")).cells;
    CHECK(cells.at(Tuple{"s2", "o1"}).count("read_right") == 1);

    Binding blocked{{"s1", "s2"}, {"s2", "s1"}, {"o", "o1"}}; // s2 holds nothing
    CHECK(step(hru, hru.q0, "delegateRead", blocked) == hru.q0);

    CHECK_THROWS_AS(step(hru, hru.q0, "nosuch", ok), ModelError);
    CHECK_THROWS_AS(step(hru, hru.q0, "delegateRead", Binding{{"s1", "s1"}}), ModelError);
}

TEST_CASE("step executes the relabel example") {
    Model selx = selx_onestep();
    Binding b{{"e", "p1"}, {"f", "f1"}, {"r2", "r0"}, {"t2", "t1"}};
    ModelState q1 = step(selx, selx.q0, "relabel", b);
    CHECK(std::get<MapExtent>(q1.extents.at("con")).entries.at(Tuple{"p1"}) ==
          Tuple{"u0", "r0", "t1"});
}

TEST_CASE("run folds step and keeps every intermediate state") {
    Model selx = selx_chain();
    CHECK(run(selx, selx.q0, {}).empty()); // delta*(q, epsilon) = q

    std::vector<std::pair<std::string, Binding>> inputs{
        {"create_file", {{"e", "p1"}, {"e2", "f9"}}},
        {"relabel", {{"e", "p1"}, {"f", "f9"}, {"r2", "r0"}, {"t2", "t1"}}},
    };
    auto trace = run(selx, selx.q0, inputs);
    REQUIRE(trace.size() == 2);
    CHECK(std::get<SetExtent>(trace[0].extents.at("E")).rows.count(Tuple{"f9"}) == 1);
    CHECK(std::get<MapExtent>(trace[1].extents.at("con")).entries.at(Tuple{"p1"}) ==
          Tuple{"u0", "r0", "t1"});

    // a failing middle command leaves an unchanged state in the trace
    std::vector<std::pair<std::string, Binding>> with_noop{
        {"relabel", {{"e", "p1"}, {"f", "p1"}, {"r2", "r0"}, {"t2", "t1"}}}, // no tf entrypoint
        {"create_file", {{"e", "p1"}, {"e2", "f9"}}},
    };
    auto trace2 = run(selx, selx.q0, with_noop);
    REQUIRE(trace2.size() == 2);
    CHECK(trace2[0] == selx.q0);
    CHECK(trace2[1] != selx.q0);
}

TEST_CASE("run is a left fold") {
    Model selx = selx_onestep();
    std::mt19937_64 rng(7);
    std::vector<std::string> ids;
    for (const auto& c : selx.delta_scheme.commands) ids.push_back(c.id);
    auto random_inputs = [&](std::size_t n) {
        std::vector<std::pair<std::string, Binding>> inputs;
        std::vector<std::string> entities{"p1", "f1", "x1"};
        std::vector<std::string> roles{"r0"};
        std::vector<std::string> types{"t0", "tf", "t1"};
        std::vector<std::string> classes{"process", "file"};
        std::vector<std::string> perms{"read"};
        auto pick = [&](const std::vector<std::string>& pool) {
            return pool[rng() % pool.size()];
        };
        for (std::size_t i = 0; i < n; ++i) {
            const std::string& id = ids[rng() % ids.size()];
            const Command* cmd = selx.delta_scheme.find(id);
            Binding b;
            for (const auto& p : cmd->params) {
                if (p.sort == "entity") b[p.name] = pick(entities);
                else if (p.sort == "role") b[p.name] = pick(roles);
                else if (p.sort == "type") b[p.name] = pick(types);
                else if (p.sort == "class") b[p.name] = pick(classes);
                else b[p.name] = pick(perms);
            }
            inputs.emplace_back(id, std::move(b));
        }
        return inputs;
    };
    for (int round = 0; round < 20; ++round) {
        auto a = random_inputs(1 + rng() % 3);
        auto b = random_inputs(1 + rng() % 3);
        auto joined = a;
        joined.insert(joined.end(), b.begin(), b.end());
        ModelState mid = run(selx, selx.q0, a).empty() ? selx.q0 : run(selx, selx.q0, a).back();
        ModelState split_final = run(selx, mid, b).empty() ? mid : run(selx, mid, b).back();
        auto joined_trace = run(selx, selx.q0, joined);
        ModelState joined_final = joined_trace.empty() ? selx.q0 : joined_trace.back();
        CHECK(split_final == joined_final);
    }
}

TEST_CASE("decide is lambda: PRE satisfaction without mutation") {
    Model selx = selx_onestep();
    ModelState before = selx.q0;
    CHECK(decide(selx, selx.q0, "remove", {{"e", "p1"}}));
    CHECK_FALSE(decide(selx, selx.q0, "access", {{"e", "p1"}, {"e2", "f1"}, {"p", "read"}}));
    CHECK(selx.q0 == before);
    CHECK_THROWS_AS(decide(selx, selx.q0, "nosuch", {}), ModelError);

    // access authorized when the allow rule matches
    Binding b{{"e", "p1"}, {"f", "f1"}, {"r2", "r0"}, {"t2", "t1"}};
    ModelState q1 = step(selx, selx.q0, "relabel", b); // p1 now has type t1
    CHECK(decide(selx, q1, "access", {{"e", "p1"}, {"e2", "f1"}, {"p", "read"}}));
}

TEST_CASE("lambda/delta coherence and frame rule on random inputs") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        GeneratedCase c = generate_case(seed);
        std::mt19937_64 rng(seed ^ 0xabcd);
        auto constants = constants_by_sort(c.model);
        for (int round = 0; round < 25; ++round) {
            const Command& cmd =
                c.model.delta_scheme.commands[rng() % c.model.delta_scheme.commands.size()];
            Binding b;
            bool ok = true;
            for (const auto& p : cmd.params) {
                auto it = constants.find(p.sort);
                if (it == constants.end() || it->second.empty()) {
                    ok = false;
                    break;
                }
                auto pos = rng() % it->second.size();
                b[p.name] = *std::next(it->second.begin(), static_cast<long>(pos));
            }
            if (!ok) continue;
            ModelState next = step(c.model, c.model.q0, cmd.id, b);
            if (!(next == c.model.q0)) CHECK(decide(c.model, c.model.q0, cmd.id, b));
            // components unmentioned by POST are unchanged
            std::set<std::string> touched;
            for (const auto& post : cmd.post) {
                if (!post_component(post).empty()) touched.insert(post_component(post));
            }
            for (const auto& [name, extent] : c.model.q0.extents) {
                if (touched.count(name)) continue;
                CHECK(next.extents.at(name) == extent);
            }
        }
    }
}

TEST_CASE("el_components answers category queries") {
    Model selx = selx_onestep();
    CHECK(el_components(selx, ElCategory::LA) == std::vector<std::string>{"cl", "con"});
    CHECK(el_components(selx, ElCategory::RR) == std::vector<std::string>{"role_tr", "type_tr"});
    CHECK(el_components(selx, ElCategory::MC).empty());
}

TEST_CASE("model validation rejects POST on static components") {
    Model selx = selx_onestep();
    Command bad;
    bad.id = "bad";
    bad.params = {{"c", "class"}};
    bad.pre = ConditionExpr::truth();
    bad.post = {SetInsert{"C", {Term::variable("c")}}};
    CHECK_THROWS_WITH_AS(validate_command(selx, bad),
                         doctest::Contains("static component"), ModelError);
}

TEST_CASE("canonical model export is stable") {
    Model a = selx_onestep();
    Model b = selx_onestep();
    CHECK(serialize_model(a) == serialize_model(b));
    CHECK(model_digest(a) == model_digest(b));
    Model reparsed = parse_model(print_model(a), a.name);
    CHECK(print_model(reparsed) == print_model(a));
}
