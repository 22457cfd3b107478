#include <doctest.h>

#include <regex>

#include "generators.hpp"
#include "oracles.hpp"
#include "sigsynth/error.hpp"
#include "sigsynth/obfuscator.hpp"
#include "testutil.hpp"

using namespace sigsynth;
using namespace sigsynth::testing;

namespace {

std::set<CfEdge> restricted_closure(const Iccg& g, const Iccg& original)
{
    std::set<CfEdge> out;
    for (const auto& [u, v] : bfs_closure(g))
        if (original.has_vertex(u) && original.has_vertex(v))
            out.insert({u, v});
    return out;
}

std::size_t count_tier(const Iccg& g, int tier)
{
    return static_cast<std::size_t>(std::count_if(g.meta_edges().begin(), g.meta_edges().end(),
                                                   [&](const MetaEdge& e) { return tier_of(e.label) == tier; }));
}

} // namespace

TEST_CASE("bounded draws follow the rejection-sampling contract")
{
    for (std::uint64_t n : {std::uint64_t{1}, std::uint64_t{3}, std::uint64_t{1000},
                            (std::uint64_t{1} << 63) + 1, std::numeric_limits<std::uint64_t>::max()}) {
        Prng p(42);
        std::mt19937_64 raw(42);
        // n * floor(2^64 / n) computed in 128-bit arithmetic.
        const unsigned __int128 two64 = static_cast<unsigned __int128>(1) << 64;
        const unsigned __int128 bound = (two64 / n) * n;
        for (int i = 0; i < 200; ++i) {
            std::uint64_t x;
            do
                x = raw();
            while (static_cast<unsigned __int128>(x) >= bound);
            CHECK(p.below(n) == x % n);
        }
    }
    Prng p(1);
    CHECK_THROWS_AS(p.below(0), InvariantError);
}

TEST_CASE("no operations leave the graph unchanged")
{
    const Iccg g = load_iccg(fixture("golddream/sample1.json"));
    CHECK(obfuscate(g, {}, 7) == g);
}

TEST_CASE("rename")
{
    const Iccg g = load_iccg(fixture("golddream/sample1.json"));
    const Iccg r = obfuscate(g, {RenameComponents{}}, 9);
    CHECK(r.vertex_count() == g.vertex_count());
    CHECK(r.has_system());
    const std::regex name("c[0-9a-f]{8}");
    for (const auto& [id, t] : r.vertices())
        if (id != kSystemId)
            CHECK(std::regex_match(id, name));
    CHECK(r.cf_edges().size() == g.cf_edges().size());
    CHECK(r.meta_edges().size() == g.meta_edges().size());
    CHECK(embeds_by_enumeration(r, g) == true);
    CHECK(obfuscate(g, {RenameComponents{}}, 9) == r);
    CHECK(obfuscate(g, {RenameComponents{}}, 10) != r);
}

TEST_CASE("dummy insertion keeps reachability between original components")
{
    Rng rng(31);
    const auto labels = label_pool(5);
    GraphParams p;
    p.max_vertices = 6;
    p.cf_prob = 0.4;
    for (int i = 0; i < 50; ++i) {
        const Iccg g = random_iccg(rng, labels, p);
        const int k = uniform(rng, 1, 3);
        const Iccg o = obfuscate(g, {InsertDummyOnEdge{k}}, static_cast<std::uint64_t>(i));
        if (g.cf_edges().empty()) {
            CHECK(o == g);
            continue;
        }
        CHECK(o.vertex_count() == g.vertex_count() + static_cast<std::size_t>(k));
        CHECK(o.cf_edges().size() == g.cf_edges().size() + static_cast<std::size_t>(k));
        CHECK(o.meta_edges() == g.meta_edges());
        CHECK(restricted_closure(o, g) == bfs_closure(g));
        for (int d = 0; d < k; ++d)
            CHECK(o.type_of("dummy" + std::to_string(d)) == ComponentType::activity);
    }
}

TEST_CASE("metadata removal")
{
    Iccg g;
    g.add_vertex("s", ComponentType::service);
    for (const char* src : {"A", "B", "C"})
        g.add_meta_edge("s", "s", taint_flow(src, "Internet"));
    g.add_meta_edge("s", "s", suspicious_api("sendTextMessage"));

    CHECK(obfuscate(g, {RemoveMetadata{0.0}}, 1) == g);
    const Iccg all = obfuscate(g, {RemoveMetadata{1.0}}, 1);
    CHECK(count_tier(all, kTaintTier) == 0);
    CHECK(count_tier(all, kApiTier) == 1);
    // floor(0.5 * 3 + 0.5) = 2
    CHECK(count_tier(obfuscate(g, {RemoveMetadata{0.5}}, 1), kTaintTier) == 1);
    // floor(0.4 * 3 + 0.5) = 1
    CHECK(count_tier(obfuscate(g, {RemoveMetadata{0.4}}, 1), kTaintTier) == 2);
    CHECK(count_tier(obfuscate(g, {RemoveMetadata{1.0, kApiTier}}, 1), kApiTier) == 0);
    CHECK_THROWS_AS(obfuscate(g, {RemoveMetadata{1.5}}, 1), InvariantError);
    CHECK_THROWS_AS(obfuscate(g, {RemoveMetadata{-0.1}}, 1), InvariantError);
}

TEST_CASE("noise edges")
{
    Iccg g;
    g.add_vertex("SYSTEM", ComponentType::system);
    g.add_vertex("a", ComponentType::activity);
    g.add_vertex("b", ComponentType::activity);
    g.add_cf_edge("SYSTEM", "a");
    const Iccg o = obfuscate(g, {AddNoiseEdges{2}}, 5);
    CHECK(o.cf_edges().size() == 3);
    for (const auto& e : g.cf_edges())
        CHECK(o.cf_edges().contains(e));
    // Absent pairs: SYSTEM->b, a->a, a->b, b->a, b->b.
    CHECK(obfuscate(g, {AddNoiseEdges{100}}, 5).cf_edges().size() == 6);
    CHECK_THROWS_AS(obfuscate(g, {AddNoiseEdges{-1}}, 5), InvariantError);
    CHECK_THROWS_AS(obfuscate(g, {InsertDummyOnEdge{-1}}, 5), InvariantError);
}

TEST_CASE("recipes")
{
    const Recipe r = recipe_from_json(nlohmann::json::parse(R"({"seed": 17, "ops": [
        {"op": "rename"}, {"op": "insert_dummy", "count": 2},
        {"op": "remove_metadata", "fraction": 0.25, "tier": "filter"}, {"op": "noise_edges", "count": 3}]})"));
    CHECK(r.seed == 17);
    REQUIRE(r.ops.size() == 4);
    CHECK(std::holds_alternative<RenameComponents>(r.ops[0]));
    CHECK(std::get<InsertDummyOnEdge>(r.ops[1]).count == 2);
    CHECK(std::get<RemoveMetadata>(r.ops[2]).tier == kFilterTier);
    CHECK(std::get<RemoveMetadata>(r.ops[2]).fraction == 0.25);
    CHECK(std::get<AddNoiseEdges>(r.ops[3]).count == 3);

    CHECK_THROWS_AS(recipe_from_json(nlohmann::json::parse(R"({"ops": [{"op": "shuffle"}]})")), ParseError);
    CHECK_THROWS_AS(recipe_from_json(nlohmann::json::parse(R"({"ops": [{"op": "remove_metadata", "tier": 7}]})")),
                    ParseError);
    CHECK_THROWS_AS(recipe_from_json(nlohmann::json::parse(R"([1])")), ParseError);

    const auto dir = scratch_dir("recipe");
    write_text_file(dir / "bad.json", "{\"ops\": [");
    try {
        load_recipe(dir / "bad.json");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("bad.json") != std::string::npos);
    }
}

TEST_CASE("same seed, same output")
{
    const Iccg g = load_iccg(fixture("golddream/sample2.json"));
    const std::vector<ObfuscationOp> ops{RenameComponents{}, InsertDummyOnEdge{3}, RemoveMetadata{0.5},
                                         AddNoiseEdges{2}};
    CHECK(obfuscate(g, ops, 123) == obfuscate(g, ops, 123));
}
