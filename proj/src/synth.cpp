#include "sigsynth/synth.hpp"

#include "sigsynth/error.hpp"
#include "sigsynth/matcher.hpp"

namespace sigsynth {

namespace {

std::vector<std::string> slot_ids(const VertexPool& pool)
{
    std::vector<std::string> ids;
    for (const auto& v : pool.vertices)
        ids.push_back(std::string(to_string(v.type)) + std::to_string(v.index_in_type));
    if (pool.system_anchor)
        ids.emplace_back(kSystemId);
    return ids;
}

} // namespace

Iccg decode(const Assignment& a, const VarMap& vm, const VertexPool& pool)
{
    const auto ids = slot_ids(pool);
    Iccg g;
    for (int s = 0; s < pool.slot_count(); ++s)
        if (a.value(vm.domain.at(static_cast<std::size_t>(s))))
            g.add_vertex(ids[s], pool.slot_type(s));
    for (const auto& [key, var] : vm.cf_edge)
        if (a.value(var))
            g.add_cf_edge(ids[key.first], ids[key.second]);
    for (const auto& [key, var] : vm.meta_edge)
        if (a.value(var))
            g.add_meta_edge(ids[std::get<0>(key)], ids[std::get<1>(key)], vm.labels.at(std::get<2>(key)));
    return g;
}

Suspiciousness signature_suspiciousness(const Iccg& g, const WeightTable& weights)
{
    Suspiciousness s;
    for (const auto& e : g.meta_edges())
        s.tiers[tier_of(e.label)] += weights.weight(e.label);
    s.tiers[kEdgeTier] = Rational(g.cf_edges().size());
    for (const auto& t : s.tiers)
        s.total += t;
    return s;
}

std::vector<std::int64_t> objective_vector(const Iccg& g, const WeightTable& weights)
{
    std::vector<std::int64_t> out(kTierCount, 0);
    for (const auto& e : g.meta_edges())
        out[tier_of(e.label)] += quantize(weights.weight(e.label));
    out[kEdgeTier] = static_cast<std::int64_t>(g.cf_edges().size());
    return out;
}

Rational weighted_size(const Iccg& g, const WeightTable& weights)
{
    return Rational(g.vertex_count()) + signature_suspiciousness(g, weights).total;
}

bool is_empty_signature(const Iccg& g)
{
    return g.cf_edges().empty() && g.meta_edges().empty() && g.vertex_count() == (g.has_system() ? 1u : 0u);
}

Synthesis infer_signature(std::span<const Iccg> samples, const WeightTable& weights, const std::string& family,
                          const SynthOptions& options)
{
    Synthesis out;
    if (samples.size() == 1)
        out.warnings.push_back("synthesizing from a single sample");
    const VertexPool pool = build_pool(samples);
    Encoding enc = encode(samples, weights, pool, {options.mode, options.require_metadata_support});
    out.warnings.insert(out.warnings.end(), enc.warnings.begin(), enc.warnings.end());

    const Assignment a = maximize_lex(enc.problem, options.maxsat, &out.stats);
    out.objective = a.objective;

    Iccg g = decode(a, enc.vars, pool);
    g.set_name(family);
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (!exact_match(g, samples[i]))
            throw InternalError("synthesized signature does not embed into sample " + std::to_string(i + 1));
    if (is_empty_signature(g))
        out.warnings.push_back("no shared suspicious structure");

    const Suspiciousness s = signature_suspiciousness(g, weights);
    out.signature = Signature{std::move(g), family, s.total, s.tiers};
    out.problem = std::move(enc.problem);
    return out;
}

} // namespace sigsynth
