#include <doctest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "sigsynth/matcher.hpp"
#include "sigsynth/oracle.hpp"
#include "sigsynth/synth.hpp"
#include "testutil.hpp"

using namespace sigsynth;
using namespace sigsynth::testing;

namespace {

bool has_warning(const Synthesis& s, const std::string& needle)
{
    return std::any_of(s.warnings.begin(), s.warnings.end(),
                       [&](const std::string& w) { return w.find(needle) != std::string::npos; });
}

} // namespace

TEST_CASE("GoldDream pair keeps the receiver, the service and their metadata")
{
    const auto samples = golddream_samples();
    const WeightTable weights = compute_weights(benign_corpus());
    const Synthesis s = infer_signature(samples, weights, "GoldDream");

    Iccg expected("GoldDream");
    expected.add_vertex("SYSTEM", ComponentType::system);
    expected.add_vertex("receiver0", ComponentType::receiver);
    expected.add_vertex("service0", ComponentType::service);
    expected.add_cf_edge("SYSTEM", "receiver0");
    expected.add_cf_edge("receiver0", "service0");
    expected.add_meta_edge("receiver0", "receiver0", intent_filter("SMS_RECEIVED"));
    expected.add_meta_edge("receiver0", "receiver0", intent_filter("BOOT_COMPLETED"));
    expected.add_meta_edge("service0", "service0", taint_flow("DeviceId", "Internet"));
    expected.add_meta_edge("service0", "service0", taint_flow("SubscriberId", "Internet"));
    expected.add_meta_edge("service0", "service0", suspicious_api("sendTextMessage"));
    CHECK(s.signature.graph == expected);
    CHECK(s.signature.family == "GoldDream");
    CHECK(s.objective == tier_vector(expected, weights));
    CHECK(s.warnings.empty());
}

TEST_CASE("objective equals the recomputed tier vector of the decoded signature")
{
    Rng rng(3);
    const auto labels = label_pool(6);
    for (int i = 0; i < 60; ++i) {
        const auto samples = random_instance(rng, uniform(rng, 1, 4), 5, labels);
        const WeightTable weights = random_weights(rng, labels);
        const Synthesis s = infer_signature(samples, weights, "F");
        CHECK(s.objective == tier_vector(s.signature.graph, weights));
        for (const auto& g : samples)
            CHECK(embeds_by_enumeration(s.signature.graph, g));
    }
}

TEST_CASE("optimum agrees with subgraph enumeration")
{
    Rng rng(4);
    const auto labels = label_pool(4);
    GraphParams p;
    p.max_vertices = 3;
    p.meta_prob = 0.3;
    int checked = 0;
    for (int i = 0; i < 300 && checked < 60; ++i) {
        std::vector<Iccg> samples;
        const Iccg core = random_iccg(rng, labels, p, "c");
        for (int k = 0; k < uniform(rng, 2, 3); ++k) {
            GraphParams extra = p;
            extra.min_vertices = 0;
            extra.max_vertices = 1;
            samples.push_back(grow(rng, core, labels, extra, "s" + std::to_string(k)));
        }
        // Keeps the 2^items enumeration cheap.
        if (samples[0].cf_edges().size() + samples[0].meta_edges().size() > 12)
            continue;
        const WeightTable weights = random_weights(rng, labels);
        std::vector<std::int64_t> expected;
        for (bool support : {true, false}) {
            try {
                expected = enumerate_mscs_objective(samples, weights, 6, support);
            } catch (const std::exception&) {
                break;
            }
            SynthOptions o;
            o.require_metadata_support = support;
            CHECK(infer_signature(samples, weights, "F", o).objective == expected);
            if (support)
                ++checked;
        }
    }
    CHECK(checked >= 30);
}

TEST_CASE("identical samples without support reach the sample's own objective")
{
    Rng rng(5);
    const auto labels = label_pool(6);
    for (int i = 0; i < 30; ++i) {
        GraphParams p;
        p.max_vertices = 4;
        const Iccg g = random_iccg(rng, labels, p);
        const std::vector<Iccg> samples{g, rename_all(g, "copy")};
        const WeightTable weights = random_weights(rng, labels);
        SynthOptions o;
        o.require_metadata_support = false;
        CHECK(infer_signature(samples, weights, "F", o).objective == tier_vector(g, weights));
    }
}

TEST_CASE("adding a sample never improves the objective")
{
    Rng rng(6);
    const auto labels = label_pool(6);
    for (int i = 0; i < 40; ++i) {
        auto samples = random_instance(rng, 3, 4, labels);
        const WeightTable weights = random_weights(rng, labels);
        const std::vector<Iccg> fewer(samples.begin(), samples.end() - 1);
        const auto small = infer_signature(fewer, weights, "F").objective;
        const auto large = infer_signature(samples, weights, "F").objective;
        CHECK(large <= small);
    }
}

TEST_CASE("suspiciousness of a flow and two call edges")
{
    const WeightTable weights(9, {});
    Iccg g;
    g.add_vertex("SYSTEM", ComponentType::system);
    g.add_vertex("a", ComponentType::activity);
    g.add_vertex("s", ComponentType::service);
    g.add_cf_edge("SYSTEM", "a");
    g.add_cf_edge("a", "s");
    g.add_meta_edge("s", "s", taint_flow("DeviceId", "Internet"));
    const Suspiciousness s = signature_suspiciousness(g, weights);
    CHECK(s.total == 12);
    CHECK(s.tiers[kTaintTier] == 10);
    CHECK(s.tiers[kEdgeTier] == 2);
    CHECK(s.tiers[kFilterTier] == 0);
    CHECK(weighted_size(g, weights) == 15);
}

TEST_CASE("warnings")
{
    SUBCASE("single sample")
    {
        const std::vector<Iccg> one{load_iccg(fixture("golddream/sample1.json"))};
        SynthOptions o;
        o.require_metadata_support = false;
        const Synthesis s = infer_signature(one, WeightTable(9, {}), "F", o);
        CHECK(has_warning(s, "single sample"));
        CHECK(s.objective == tier_vector(one[0], WeightTable(9, {})));
    }
    SUBCASE("nothing shared")
    {
        Iccg a;
        a.add_vertex("r", ComponentType::receiver);
        a.add_meta_edge("r", "r", intent_filter("A"));
        Iccg b;
        b.add_vertex("r", ComponentType::receiver);
        b.add_meta_edge("r", "r", intent_filter("B"));
        const std::vector<Iccg> samples{a, b};
        const Synthesis s = infer_signature(samples, WeightTable(9, {}), "F");
        CHECK(is_empty_signature(s.signature.graph));
        CHECK(has_warning(s, "no shared suspicious structure"));
    }
}

TEST_CASE("weighted-size mode matches the brute-force oracle")
{
    Rng rng(7);
    const auto labels = label_pool(5);
    for (int i = 0; i < 40; ++i) {
        const auto samples = random_instance(rng, uniform(rng, 2, 3), 4, labels);
        const WeightTable weights = random_weights(rng, labels);
        SynthOptions o;
        o.mode = ObjectiveMode::weighted_size;
        o.require_metadata_support = false;
        const Synthesis s = infer_signature(samples, weights, "F", o);
        const OracleResult r = oracle_mscs(samples, weights, {ObjectiveMode::weighted_size, false});
        CHECK(weighted_size(s.signature.graph, weights) == r.weighted_size);
    }
}

TEST_CASE("synthesis is deterministic")
{
    const auto samples = golddream_samples();
    const WeightTable weights = compute_weights(benign_corpus());
    const Synthesis a = infer_signature(samples, weights, "F");
    const Synthesis b = infer_signature(samples, weights, "F");
    CHECK(a.signature == b.signature);
    CHECK(a.problem == b.problem);
}
