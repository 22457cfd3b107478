#include "sigsynth/encoder.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "sigsynth/error.hpp"

namespace sigsynth {

namespace {

// Exact integer scaling for weighted_size mode is used while lcm(denominators) stays
// below this; beyond it weights are rounded at 1/1000 resolution.
constexpr std::int64_t kMaxExactScale = 1'000'000;

using TypePair = std::tuple<ComponentType, ComponentType, bool>;             // (src, dst, self-loop)
using TypedLabel = std::tuple<ComponentType, ComponentType, bool, int>;       // + label id

struct SampleShape {
    std::set<TypePair> cf;
    std::set<TypedLabel> meta;
};

SampleShape shape_of(const IndexedGraph& g)
{
    SampleShape s;
    for (int u = 0; u < g.size(); ++u)
        for (int v = 0; v < g.size(); ++v)
            if (g.has_cf(u, v))
                s.cf.emplace(g.types[u], g.types[v], u == v);
    for (const auto& [u, v, d] : g.meta)
        s.meta.emplace(g.types[u], g.types[v], u == v, d);
    return s;
}

class ClauseBuilder {
public:
    explicit ClauseBuilder(Encoding& enc) : enc_(enc) { enc_.vars.entities.emplace_back(); }

    int new_var(VarEntity entity)
    {
        enc_.vars.entities.push_back(entity);
        return enc_.vars.num_vars();
    }

    void hard(Clause c)
    {
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        enc_.problem.hard.push_back(std::move(c));
    }

private:
    Encoding& enc_;
};

std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    if (a != 0 && b > std::numeric_limits<std::int64_t>::max() / a)
        throw WeightOverflowError("scaled weight exceeds 64 bits");
    return a * b;
}

} // namespace

std::int64_t quantize(const Rational& w) { return quantize_scaled(w, kQuantizationScale); }

ComponentType VertexPool::slot_type(int slot) const
{
    if (slot == system_slot())
        return ComponentType::system;
    return vertices.at(static_cast<std::size_t>(slot)).type;
}

VertexPool build_pool(std::span<const Iccg> samples)
{
    if (samples.empty())
        throw InvariantError("vertex pool needs at least one sample");
    VertexPool pool;
    for (auto t : kPoolTypes)
        pool.per_type[t] = std::numeric_limits<int>::max();
    pool.system_anchor = true;
    for (const auto& g : samples) {
        const TypeCensus census = type_census(g);
        for (auto t : kPoolTypes)
            pool.per_type[t] = std::min(pool.per_type[t], static_cast<int>(census.at(t)));
        pool.system_anchor = pool.system_anchor && g.has_system();
    }
    for (auto t : kPoolTypes)
        for (int k = 0; k < pool.per_type[t]; ++k)
            pool.vertices.push_back({t, k});
    return pool;
}

Encoding encode(std::span<const Iccg> samples, const WeightTable& weights, const VertexPool& pool,
                const EncodeOptions& options)
{
    if (samples.empty())
        throw InvariantError("encoding needs at least one sample");
    Encoding enc;
    VarMap& vm = enc.vars;
    ClauseBuilder cb(enc);

    std::vector<IndexedGraph> graphs;
    std::vector<SampleShape> shapes;
    for (const auto& g : samples) {
        graphs.push_back(IndexedGraph::build(g, vm.labels));
        shapes.push_back(shape_of(graphs.back()));
    }

    if (!pool.system_anchor) {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const int sys = graphs[i].system;
            if (sys < 0)
                continue;
            bool has_edges = false;
            for (int v = 0; v < graphs[i].size(); ++v)
                has_edges = has_edges || graphs[i].has_cf(sys, v);
            for (const auto& [u, v, d] : graphs[i].meta)
                has_edges = has_edges || u == sys || v == sys;
            if (has_edges) {
                enc.warnings.push_back("sample " + std::to_string(i + 1) + " (" + samples[i].name() +
                                       ") has SYSTEM edges but not every sample has a SYSTEM vertex; "
                                       "SYSTEM edges are dropped from the signature");
                break;
            }
        }
    }

    const int slots = pool.slot_count();
    const int sys_slot = pool.system_slot();

    // Candidate x0 / y0 variables: only slot pairs whose typed edge shape occurs in every
    // sample. Any other x0 / y0 is forced false by the preservation clauses anyway.
    auto cf_feasible = [&](int a, int b) {
        if (b == sys_slot)
            return false;
        const TypePair key{pool.slot_type(a), pool.slot_type(b), a == b};
        return std::all_of(shapes.begin(), shapes.end(), [&](const SampleShape& s) { return s.cf.contains(key); });
    };
    auto meta_feasible = [&](int a, int b, int d) {
        const TypedLabel key{pool.slot_type(a), pool.slot_type(b), a == b, d};
        return std::all_of(shapes.begin(), shapes.end(), [&](const SampleShape& s) { return s.meta.contains(key); });
    };

    // Variable order: metadata by tier, cf edges, domain, embeddings.
    std::vector<std::tuple<int, int, int, int>> meta_keys;  // (tier, a, b, d)
    for (int d = 0; d < vm.labels.size(); ++d)
        for (int a = 0; a < slots; ++a)
            for (int b = 0; b < slots; ++b)
                if (meta_feasible(a, b, d))
                    meta_keys.emplace_back(tier_of(vm.labels.at(d)), a, b, d);
    std::sort(meta_keys.begin(), meta_keys.end());
    for (const auto& [tier, a, b, d] : meta_keys)
        vm.meta_edge[{a, b, d}] =
            cb.new_var({VarEntity::Kind::meta_edge, a, b, -1, -1, d});
    for (int a = 0; a < slots; ++a)
        for (int b = 0; b < slots; ++b)
            if (cf_feasible(a, b))
                vm.cf_edge[{a, b}] = cb.new_var({VarEntity::Kind::cf_edge, a, b, -1, -1, -1});
    for (int a = 0; a < slots; ++a)
        vm.domain.push_back(cb.new_var({VarEntity::Kind::domain, a, -1, -1, -1, -1}));
    vm.embed.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const IndexedGraph& g = graphs[i];
        vm.embed[i].resize(static_cast<std::size_t>(slots));
        for (int a = 0; a < slots; ++a) {
            const ComponentType t = pool.slot_type(a);
            for (int w = 0; w < g.size(); ++w)
                if (g.types[w] == t)
                    vm.embed[i][a].emplace_back(
                        w, cb.new_var({VarEntity::Kind::embed, a, -1, static_cast<int>(i), w, -1}));
        }
    }
    enc.problem.num_vars = vm.num_vars();

    // Hard constraints per sample.
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const IndexedGraph& g = graphs[i];
        const auto& emb = vm.embed[i];

        // Constant domain: d(v) <-> OR_w f_i(v, w).
        for (int a = 0; a < slots; ++a) {
            Clause some{-vm.domain[a]};
            for (const auto& [w, f] : emb[a]) {
                some.push_back(f);
                cb.hard({-f, vm.domain[a]});
            }
            cb.hard(std::move(some));
        }
        // Function property.
        for (int a = 0; a < slots; ++a)
            for (std::size_t x = 0; x < emb[a].size(); ++x)
                for (std::size_t y = x + 1; y < emb[a].size(); ++y)
                    cb.hard({-emb[a][x].second, -emb[a][y].second});
        // One-to-one.
        std::vector<std::vector<int>> into(static_cast<std::size_t>(g.size()));
        for (int a = 0; a < slots; ++a)
            for (const auto& [w, f] : emb[a])
                into[static_cast<std::size_t>(w)].push_back(f);
        for (const auto& fs : into)
            for (std::size_t x = 0; x < fs.size(); ++x)
                for (std::size_t y = x + 1; y < fs.size(); ++y)
                    cb.hard({-fs[x], -fs[y]});
        // Type preservation holds by construction: f vars exist only between equal types.

        // Control-flow preservation: f(v,w) & f(v',w') & x0(v,v') -> (w,w') in X_i.
        for (const auto& [key, x] : vm.cf_edge) {
            const auto [a, b] = key;
            for (const auto& [w, fa] : emb[a])
                for (const auto& [w2, fb] : emb[b]) {
                    if ((a == b) != (w == w2) || g.has_cf(w, w2))
                        continue;
                    cb.hard({-fa, -fb, -x});
                }
        }
        // Metadata preservation: f(v,w) & f(v',w') & y0(v,v',d) -> (w,w',d) in Y_i.
        for (const auto& [key, y] : vm.meta_edge) {
            const auto [a, b, d] = key;
            for (const auto& [w, fa] : emb[a])
                for (const auto& [w2, fb] : emb[b]) {
                    if ((a == b) != (w == w2) || g.has_meta(w, w2, d))
                        continue;
                    cb.hard({-fa, -fb, -y});
                }
        }
        // SYSTEM anchoring.
        if (sys_slot >= 0)
            cb.hard({emb[sys_slot].at(0).second});
    }

    // No spurious control flow / metadata.
    for (const auto& [key, x] : vm.cf_edge) {
        cb.hard({-x, vm.domain[key.first]});
        cb.hard({-x, vm.domain[key.second]});
    }
    for (const auto& [key, y] : vm.meta_edge) {
        cb.hard({-y, vm.domain[std::get<0>(key)]});
        cb.hard({-y, vm.domain[std::get<1>(key)]});
    }

    if (options.require_metadata_support) {
        std::vector<Clause> support(static_cast<std::size_t>(slots));
        for (int a = 0; a < slots; ++a)
            support[a].push_back(-vm.domain[a]);
        for (const auto& [key, y] : vm.meta_edge) {
            support[std::get<0>(key)].push_back(y);
            if (std::get<1>(key) != std::get<0>(key))
                support[std::get<1>(key)].push_back(y);
        }
        for (int a = 0; a < pool.size(); ++a)
            cb.hard(std::move(support[a]));
    }

    // Objective.
    if (options.mode == ObjectiveMode::lexicographic) {
        enc.problem.tiers.resize(kTierCount);
        for (const auto& [key, y] : vm.meta_edge) {
            const MetadataLabel& label = vm.labels.at(std::get<2>(key));
            enc.problem.tiers[tier_of(label)].push_back({{y}, quantize(weights.weight(label))});
        }
        for (const auto& [key, x] : vm.cf_edge)
            enc.problem.tiers[kEdgeTier].push_back({{x}, 1});
    } else {
        BigInt scale = 1;
        for (const auto& [key, y] : vm.meta_edge) {
            const BigInt den = denominator(weights.weight(vm.labels.at(std::get<2>(key))));
            scale = boost::multiprecision::lcm(scale, den);
            if (scale > kMaxExactScale)
                break;
        }
        const bool exact = scale <= kMaxExactScale;
        enc.size_scale = exact ? scale.convert_to<std::int64_t>() : kQuantizationScale;
        enc.problem.tiers.resize(1);
        auto& tier = enc.problem.tiers[0];
        for (int a = 0; a < slots; ++a)
            tier.push_back({{vm.domain[a]}, enc.size_scale});
        for (const auto& [key, x] : vm.cf_edge)
            tier.push_back({{x}, enc.size_scale});
        for (const auto& [key, y] : vm.meta_edge) {
            const Rational w = weights.weight(vm.labels.at(std::get<2>(key)));
            const std::int64_t scaled =
                exact ? checked_mul(numerator(w).convert_to<std::int64_t>(),
                                    enc.size_scale / denominator(w).convert_to<std::int64_t>())
                      : quantize_scaled(w, enc.size_scale);
            tier.push_back({{y}, scaled});
        }
    }
    validate(enc.problem);
    // Surfaces overflow of the tier flattening early.
    (void)tier_multipliers(enc.problem);
    return enc;
}

} // namespace sigsynth
