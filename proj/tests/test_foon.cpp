#include <algorithm>
#include <random>

#include "doctest.h"
#include "star/foon.hpp"
#include "support/generators.hpp"
#include "support/paths.hpp"

using namespace star;

namespace {

FunctionalUnit pour_unit() {
    FunctionalUnit u;
    u.inputs = {{"water", {"in-cup"}, {}}, {"bowl", {"clean"}, {}}};
    u.motion.verb = "pour";
    u.outputs = {{"bowl", {"contains-water"}, {}}};
    return u;
}

FunctionalUnit shuffled_copy(const FunctionalUnit& u, std::mt19937& rng) {
    FunctionalUnit c = u;
    std::shuffle(c.inputs.begin(), c.inputs.end(), rng);
    std::shuffle(c.outputs.begin(), c.outputs.end(), rng);
    for (auto& o : c.inputs) std::shuffle(o.states.begin(), o.states.end(), rng);
    for (auto& o : c.outputs) std::shuffle(o.states.begin(), o.states.end(), rng);
    return c;
}

}  // namespace

TEST_CASE("parse: one well-formed unit block") {
    const std::string text =
        "U\n"
        "I water | in-cup\n"
        "I bowl | clean\n"
        "M pour\n"
        "O bowl | contains-water\n";
    auto units = parse_subgraph(text);
    REQUIRE(units.size() == 1);
    CHECK(units[0].inputs.size() == 2);
    CHECK(units[0].motion.verb == "pour");
    CHECK(units[0].outputs.size() == 1);
    CHECK(units[0].outputs[0].states == std::vector<std::string>{"contains-water"});
}

TEST_CASE("parse: empty input errors") {
    CHECK_THROWS_AS(parse_subgraph(""), ParseError);
    CHECK_THROWS_AS(parse_subgraph("# only a comment\n\n"), ParseError);
}

TEST_CASE("parse: errors carry 1-based line numbers") {
    try {
        parse_subgraph("U\nI water\nX what\nM pour\nO bowl\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    try {
        parse_subgraph("U\nI water\nM pour | notkeyvalue\nO bowl\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_subgraph("U\nI water\nO bowl\n"), ParseError);  // missing M
    CHECK_THROWS_AS(parse_subgraph("I water\nM pour\n"), ParseError);     // missing U
}

TEST_CASE("parse: lowercases names, states and verbs") {
    auto units = parse_subgraph("U\nI Water | In-Cup\nM POUR\nO Bowl\n");
    CHECK(units[0].inputs[0].name == "water");
    CHECK(units[0].inputs[0].states[0] == "in-cup");
    CHECK(units[0].motion.verb == "pour");
}

TEST_CASE("serialize: canonical form sorts states, keeps unit order") {
    auto units = parse_subgraph("U\nI water | zesty,apple\nM pour\nO bowl\n");
    std::string out = serialize_subgraph(units);
    CHECK(out ==
          "U\n"
          "I water | apple,zesty\n"
          "M pour\n"
          "O bowl\n");
}

TEST_CASE("serialize: empty list yields empty string") {
    CHECK(serialize_subgraph({}) == "");
}

TEST_CASE("golden file round-trips through parse/serialize") {
    const std::string text = testsupport::read_file(testsupport::repo_path("data/golden/five_units.foon"));
    auto units = parse_subgraph(text);
    REQUIRE(units.size() == 5);
    // serialize(parse(t)) equals the canonicalization of what was parsed
    std::string ser = serialize_subgraph(units);
    auto reparsed = parse_subgraph(ser);
    REQUIRE(reparsed.size() == units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
        CHECK(unit_equals(units[i], reparsed[i]));
    }
    // and a second pass is byte-identical (canonical fixed point)
    CHECK(serialize_subgraph(reparsed) == ser);
}

TEST_CASE("unit_equals ignores input, output and state order") {
    FunctionalUnit a = pour_unit();
    CHECK(unit_equals(a, a));

    FunctionalUnit b = a;
    std::reverse(b.inputs.begin(), b.inputs.end());
    CHECK(unit_equals(a, b));

    FunctionalUnit c = a;
    c.motion.verb = "mix";
    CHECK_FALSE(unit_equals(a, c));
}

TEST_CASE("unit_id is a 16-hex-char content digest") {
    FunctionalUnit a = pour_unit();
    FunctionalUnit b = a;
    std::reverse(b.inputs.begin(), b.inputs.end());
    CHECK(a.unit_id() == b.unit_id());
    CHECK(a.unit_id().size() == 16);
    CHECK(a.unit_id().find_first_not_of("0123456789abcdef") == std::string::npos);

    FunctionalUnit c = a;
    c.outputs[0].states.push_back("warm");
    CHECK(a.unit_id() != c.unit_id());
}

TEST_CASE("unit_id ignores triggers") {
    FunctionalUnit a = pour_unit();
    FunctionalUnit b = a;
    b.triggers.push_back({"overpour", {"bowl"}});
    CHECK(a.unit_id() == b.unit_id());
    CHECK(unit_equals(a, b));
}

TEST_CASE("validate_unit reports invariant violations") {
    CHECK(validate_unit(pour_unit()).empty());

    FunctionalUnit no_out = pour_unit();
    no_out.outputs.clear();
    auto v = validate_unit(no_out);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "outputs");
    CHECK(v[0].rule == "non-empty required");

    FunctionalUnit dup = pour_unit();
    dup.inputs[0].states = {"in-cup", "in-cup"};
    auto v2 = validate_unit(dup);
    REQUIRE(v2.size() == 1);
    CHECK(v2[0].field == "inputs[0].states");

    FunctionalUnit bad_name = pour_unit();
    bad_name.inputs[0].name = "wa\tter";
    CHECK(validate_unit(bad_name).size() == 1);
}

TEST_CASE("trigger lines parse and serialize with their unit") {
    const std::string text =
        "T overpour | mixture,bowl\n"
        "U\n"
        "I flour\n"
        "I mixture | watery\n"
        "M scoop\n"
        "O mixture | mixed\n";
    auto units = parse_subgraph(text);
    REQUIRE(units.size() == 1);
    REQUIRE(units[0].triggers.size() == 1);
    CHECK(units[0].triggers[0].failure_type == "overpour");
    CHECK(units[0].triggers[0].objects == std::vector<std::string>{"bowl", "mixture"});
    CHECK(serialize_subgraph(units) ==
          "T overpour | bowl,mixture\n"
          "U\n"
          "I flour\n"
          "I mixture | watery\n"
          "M scoop\n"
          "O mixture | mixed\n");
}

TEST_CASE("property: round-trip is identity up to canonicalization") {
    std::mt19937 rng(7001);
    for (int trial = 0; trial < 200; ++trial) {
        auto units = testgen::random_units(rng, 1 + trial % 6);
        auto parsed = parse_subgraph(serialize_subgraph(units));
        auto canon = canonicalize(units);
        REQUIRE(parsed.size() == canon.size());
        for (std::size_t i = 0; i < canon.size(); ++i) {
            CHECK(unit_equals(parsed[i], canon[i]));
            CHECK(parsed[i].unit_id() == canon[i].unit_id());
        }
    }
}

TEST_CASE("property: unit_equals is an equivalence relation") {
    std::mt19937 rng(7002);
    for (int trial = 0; trial < 200; ++trial) {
        FunctionalUnit a = testgen::random_unit(rng);
        FunctionalUnit b = shuffled_copy(a, rng);
        FunctionalUnit c = shuffled_copy(b, rng);
        CHECK(unit_equals(a, a));
        CHECK(unit_equals(a, b));
        CHECK(unit_equals(b, a));
        CHECK(unit_equals(a, c));  // transitivity across two shuffles

        FunctionalUnit d = testgen::random_unit(rng);
        CHECK(unit_equals(a, d) == unit_equals(d, a));
    }
}
