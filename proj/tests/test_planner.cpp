#include <random>

#include "doctest.h"
#include "star/planner.hpp"
#include "support/strips_oracle.hpp"

using namespace star;

namespace {

GroundedPlanningTask chain_task() {
    // a enables b enables c; goal c
    GroundedPlanningTask t;
    t.facts = {"(a)", "(b)", "(c)", "(start)"};
    t.init = {3};
    t.goal = {2};
    t.actions.push_back({"(make-a)", {3}, {0}, {}});
    t.actions.push_back({"(make-b)", {0}, {1}, {}});
    t.actions.push_back({"(make-c)", {1}, {2}, {}});
    return t;
}

StripsDomain cafeteria_domain() {
    StripsDomain d;
    d.name = "cafeteria";
    d.types = {{"food", ""}, {"tray", ""}};
    d.predicates = {{"raw", {{"?f", "food"}}},
                    {"heated", {{"?f", "food"}}},
                    {"served", {{"?f", "food"}, {"?t", "tray"}}}};
    ActionSchema heat;
    heat.name = "heat";
    heat.params = {{"?f", "food"}};
    heat.preconditions = {{"raw", {"?f"}}};
    heat.add = {{"heated", {"?f"}}};
    heat.del = {{"raw", {"?f"}}};
    ActionSchema serve;
    serve.name = "serve";
    serve.params = {{"?f", "food"}, {"?t", "tray"}};
    serve.preconditions = {{"heated", {"?f"}}};
    serve.add = {{"served", {"?f", "?t"}}};
    d.actions = {heat, serve};
    return d;
}

StripsProblem cafeteria_problem() {
    StripsProblem p;
    p.name = "lunch";
    p.domain_name = "cafeteria";
    p.objects = {{"soup", "food"}, {"stew", "food"}, {"pasta", "food"},
                 {"t1", "tray"}, {"t2", "tray"}};
    p.init = {{"raw", {"soup"}}, {"raw", {"stew"}}, {"raw", {"pasta"}}};
    p.goal = {{"served", {"soup", "t1"}}};
    return p;
}

}  // namespace

TEST_CASE("ground: one parameter over two constants gives two actions") {
    StripsDomain d;
    d.types = {{"thing", ""}};
    d.name = "mini";
    d.predicates = {{"here", {{"?x", "thing"}}}, {"done", {{"?x", "thing"}}}};
    ActionSchema a;
    a.name = "touch";
    a.params = {{"?x", "thing"}};
    a.preconditions = {{"here", {"?x"}}};
    a.add = {{"done", {"?x"}}};
    d.actions = {a};
    StripsProblem p;
    p.name = "mini-p";
    p.domain_name = "mini";
    p.objects = {{"x1", "thing"}, {"x2", "thing"}};
    p.init = {{"here", {"x1"}}, {"here", {"x2"}}};
    p.goal = {{"done", {"x1"}}};
    auto task = ground(d, p);
    CHECK(task.actions.size() == 2);
}

TEST_CASE("ground: statically unreachable actions are pruned") {
    StripsDomain d;
    d.name = "mini";
    d.predicates = {{"p", {}}, {"q", {}}, {"never", {}}};
    ActionSchema ok;
    ok.name = "ok";
    ok.preconditions = {{"p", {}}};
    ok.add = {{"q", {}}};
    ActionSchema blocked;
    blocked.name = "blocked";
    blocked.preconditions = {{"never", {}}};
    blocked.add = {{"q", {}}};
    d.actions = {ok, blocked};
    StripsProblem p;
    p.name = "mini-p";
    p.domain_name = "mini";
    p.init = {{"p", {}}};
    p.goal = {{"q", {}}};
    auto task = ground(d, p);
    REQUIRE(task.actions.size() == 1);
    CHECK(task.actions[0].name == "(ok)");
}

TEST_CASE("ground: cafeteria count matches independent enumeration") {
    auto task = ground(cafeteria_domain(), cafeteria_problem());
    // independent count: heat has 1 food param (3 foods), serve has
    // food x tray (3*2); all reachable
    std::size_t expected = 3 + 3 * 2;
    CHECK(task.actions.size() == expected);
}

TEST_CASE("ground: blow-up guard") {
    CHECK_THROWS_AS(ground(cafeteria_domain(), cafeteria_problem(), 4), PlanningError);
}

TEST_CASE("solve: init superset of goal gives the empty plan") {
    GroundedPlanningTask t;
    t.facts = {"(a)"};
    t.init = {0};
    t.goal = {0};
    auto plan = solve(t);
    REQUIRE(plan.has_value());
    CHECK(plan->steps.empty());
    CHECK(validate_plan(*plan, t).valid);
}

TEST_CASE("solve: three-fact chain has plan length three") {
    auto t = chain_task();
    CHECK(relaxed_plan_length(t) == 3);  // relaxation is exact on delete-free chains
    auto plan = solve(t);
    REQUIRE(plan.has_value());
    CHECK(plan->steps.size() == 3);
    CHECK(validate_plan(*plan, t).valid);
}

TEST_CASE("solve: unreachable goal is unsolvable") {
    GroundedPlanningTask t;
    t.facts = {"(a)", "(g)"};
    t.init = {0};
    t.goal = {1};
    t.actions.push_back({"(noop)", {0}, {0}, {}});
    CHECK_FALSE(solve(t).has_value());
}

TEST_CASE("validate_plan flags the first violated step") {
    auto t = chain_task();
    auto plan = solve(t);
    REQUIRE(plan.has_value());
    Plan swapped = *plan;
    std::swap(swapped.steps[1], swapped.steps[2]);
    auto v = validate_plan(swapped, t);
    CHECK_FALSE(v.valid);
    CHECK(v.first_violated_step == 1);
}

TEST_CASE("plan text is one action per line") {
    auto plan = solve(chain_task());
    REQUIRE(plan.has_value());
    CHECK(plan->to_text() == "(make-a)\n(make-b)\n(make-c)\n");
}

TEST_CASE("compile_tree: chain compiles to one validating plan per unit") {
    auto make = [](const std::string& in_state, const std::string& verb,
                   const std::string& out_state) {
        FunctionalUnit u;
        u.inputs = {{"carrot", {in_state}, {}}};
        u.motion.verb = verb;
        u.outputs = {{"carrot", {out_state}, {}}};
        return u;
    };
    TaskTree tree;
    tree.units = {make("raw", "cut", "chopped"), make("chopped", "cook", "cooked"),
                  make("cooked", "serve", "plated")};
    tree.goal = {"carrot", {"plated"}, {}};
    KitchenState kitchen{{{"carrot", {"raw"}, {}}}};

    auto compiled = compile_tree(tree, kitchen);
    REQUIRE(compiled.size() == 3);
    for (const auto& cu : compiled) {
        auto pd = parse_pddl(cu.domain_text);
        auto pp = parse_pddl(cu.problem_text);
        REQUIRE(pd.domain.has_value());
        REQUIRE(pp.problem.has_value());
        auto task = ground(*pd.domain, *pp.problem);
        CHECK(validate_plan(cu.plan, task).valid);
        CHECK(cu.plan.steps.size() == 1);
    }
}

TEST_CASE("compile_tree: empty tree compiles to nothing") {
    TaskTree tree;
    tree.goal = {"carrot", {}, {}};
    CHECK(compile_tree(tree, KitchenState{}).empty());
}

TEST_CASE("compile_tree: unsolvable middle unit names the unit") {
    FunctionalUnit ok;
    ok.inputs = {{"carrot", {"raw"}, {}}};
    ok.motion.verb = "cut";
    ok.outputs = {{"carrot", {"chopped"}, {}}};
    FunctionalUnit broken;
    broken.inputs = {{"unicorn", {"shiny"}, {}}};
    broken.motion.verb = "cook";
    broken.outputs = {{"stew", {"cooked"}, {}}};
    TaskTree tree;
    tree.units = {ok, broken};
    tree.goal = {"stew", {"cooked"}, {}};
    KitchenState kitchen{{{"carrot", {"raw"}, {}}}};
    try {
        compile_tree(tree, kitchen);
        FAIL("expected PlanningError");
    } catch (const PlanningError& e) {
        CHECK(std::string(e.what()).find(broken.unit_id()) != std::string::npos);
    }
}

TEST_CASE("solve is deterministic") {
    std::mt19937 rng(911);
    auto task = planner_oracle::random_solvable_task(rng, 10, 16, 5);
    auto p1 = solve(task);
    auto p2 = solve(task);
    REQUIRE(p1.has_value());
    REQUIRE(p2.has_value());
    CHECK(p1->steps == p2->steps);
}

TEST_CASE("property: solve matches the breadth-first oracle at desk scale") {
    std::mt19937 rng(912);
    for (int trial = 0; trial < 40; ++trial) {
        auto task = planner_oracle::random_solvable_task(rng, 8 + trial % 5, 12 + trial % 9,
                                                         3 + trial % 4);
        int opt = planner_oracle::bfs_optimal_length(task);
        REQUIRE(opt >= 0);  // solvable by construction
        auto plan = solve(task);
        REQUIRE(plan.has_value());
        CHECK(validate_plan(*plan, task).valid);
        CHECK(plan->steps.size() <= static_cast<std::size_t>(2 * opt));
    }
}

TEST_CASE("property: h_FF is exact on single-achiever delete-free tasks") {
    std::mt19937 rng(913);
    for (int trial = 0; trial < 20; ++trial) {
        auto [task, optimal] = planner_oracle::single_achiever_task(rng, 6 + trial % 5);
        CHECK(relaxed_plan_length(task) == optimal);
        int bfs = planner_oracle::bfs_optimal_length(task);
        CHECK(bfs == optimal);
    }
}
