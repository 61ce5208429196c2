#include <random>

#include "doctest.h"
#include "star/store.hpp"
#include "support/generators.hpp"
#include "support/paths.hpp"

using namespace star;

TEST_CASE("merge into empty store adds everything") {
    auto units = parse_subgraph(
        testsupport::read_file(testsupport::repo_path("data/golden/five_units.foon")));
    KnowledgeStore store;
    auto report = store.merge(units, Section::foon);
    CHECK(report.added == units.size());
    CHECK(report.skipped_duplicates == 0);
    CHECK(store.size(Section::foon) == units.size());
}

TEST_CASE("merge is idempotent") {
    auto units = parse_subgraph(
        testsupport::read_file(testsupport::repo_path("data/golden/five_units.foon")));
    KnowledgeStore store;
    store.merge(units, Section::foon);
    auto second = store.merge(units, Section::foon);
    CHECK(second.added == 0);
    CHECK(second.skipped_duplicates == units.size());
}

TEST_CASE("merge skips duplicates that differ only by ordering") {
    FunctionalUnit u;
    u.inputs = {{"water", {"in-cup"}, {}}, {"bowl", {}, {}}};
    u.motion.verb = "pour";
    u.outputs = {{"bowl", {"contains-water"}, {}}};

    KnowledgeStore store;
    store.merge({u}, Section::foon);
    FunctionalUnit reordered = u;
    std::reverse(reordered.inputs.begin(), reordered.inputs.end());
    auto report = store.merge({reordered}, Section::foon);
    CHECK(report.added == 0);
    CHECK(report.skipped_duplicates == 1);
}

TEST_CASE("sections are kept separate") {
    FunctionalUnit u;
    u.inputs = {{"flour", {}, {}}};
    u.motion.verb = "scoop";
    u.outputs = {{"mixture", {"mixed"}, {}}};
    KnowledgeStore store;
    store.merge({u}, Section::failnet);
    CHECK(store.size(Section::foon) == 0);
    CHECK(store.size(Section::failnet) == 1);
    CHECK(store.output_index(Section::foon).empty());
    CHECK(store.output_index(Section::failnet).count("mixture") == 1);
}

TEST_CASE("store text round-trips with sections") {
    auto units = parse_subgraph(
        testsupport::read_file(testsupport::repo_path("data/golden/five_units.foon")));
    KnowledgeStore store;
    store.merge(units, Section::foon);
    FunctionalUnit rec;
    rec.inputs = {{"flour", {}, {}}, {"mixture", {"watery"}, {}}};
    rec.motion.verb = "scoop";
    rec.outputs = {{"mixture", {"mixed"}, {}}};
    rec.triggers.push_back({"overpour", {"mixture"}});
    store.merge({rec}, Section::failnet);

    std::string text = store.to_text();
    auto loaded = KnowledgeStore::from_text(text);
    CHECK(loaded.size(Section::foon) == store.size(Section::foon));
    CHECK(loaded.size(Section::failnet) == 1);
    CHECK(loaded.to_text() == text);
    auto rec_back = loaded.find(Section::failnet, rec.unit_id());
    REQUIRE(rec_back.has_value());
    REQUIRE(rec_back->triggers.size() == 1);
    CHECK(rec_back->triggers[0].failure_type == "overpour");
}

TEST_CASE("store files require a section header before units") {
    CHECK_THROWS_AS(KnowledgeStore::from_text("U\nI a\nM go\nO b\n"), ParseError);
    CHECK_THROWS_AS(KnowledgeStore::from_text("[KITCHEN]\n"), ParseError);
    CHECK(KnowledgeStore::from_text("[FOON]\n\n[FAILNET]\n").empty());
}

TEST_CASE("duplicate merge unions triggers") {
    FunctionalUnit rec;
    rec.inputs = {{"flour", {}, {}}};
    rec.motion.verb = "scoop";
    rec.outputs = {{"mixture", {"mixed"}, {}}};
    KnowledgeStore store;
    store.merge({rec}, Section::failnet);
    FunctionalUnit again = rec;
    again.triggers.push_back({"overpour", {"mixture"}});
    auto report = store.merge({again}, Section::failnet);
    CHECK(report.added == 0);
    auto stored = store.find(Section::failnet, rec.unit_id());
    REQUIRE(stored.has_value());
    CHECK(stored->triggers.size() == 1);
}

TEST_CASE("property: merge idempotence and index soundness") {
    std::mt19937 rng(7100);
    for (int trial = 0; trial < 100; ++trial) {
        auto units = testgen::random_units(rng, 1 + trial % 10);
        KnowledgeStore store;
        auto first = store.merge(units, Section::foon);
        CHECK(first.added + first.skipped_duplicates == units.size());
        auto second = store.merge(units, Section::foon);
        CHECK(second.added == 0);
        CHECK(second.skipped_duplicates == units.size());

        // Index soundness: every indexed unit really produces the name.
        for (const auto& [name, ids] : store.output_index(Section::foon)) {
            for (const auto& id : ids) {
                auto u = store.find(Section::foon, id);
                REQUIRE(u.has_value());
                bool produces = false;
                for (const auto& o : u->outputs) produces |= o.name == name;
                CHECK(produces);
            }
        }
        // Completeness: every output name of every stored unit is indexed.
        for (const auto& [id, u] : store.units(Section::foon)) {
            for (const auto& o : u.outputs) {
                auto it = store.output_index(Section::foon).find(o.name);
                REQUIRE(it != store.output_index(Section::foon).end());
                CHECK(std::find(it->second.begin(), it->second.end(), id) != it->second.end());
            }
        }
    }
}
