#include "sigsynth/oracle.hpp"

#include <algorithm>
#include <set>

#include <boost/dynamic_bitset.hpp>

#include "sigsynth/error.hpp"
#include "sigsynth/graph_index.hpp"
#include "sigsynth/synth.hpp"

namespace sigsynth {

namespace {

using Mask = boost::dynamic_bitset<>;

struct Item {
    int u;
    int v;
    int label;  // -1 for a cf edge
};

// Keeps only masks not strictly contained in another one.
std::vector<Mask> maximal(std::set<Mask> masks)
{
    std::vector<Mask> out;
    for (const auto& m : masks) {
        bool dominated = false;
        for (const auto& o : masks)
            if (o != m && m.is_subset_of(o)) {
                dominated = true;
                break;
            }
        if (!dominated)
            out.push_back(m);
    }
    return out;
}

class MapEnumerator {
public:
    MapEnumerator(const IndexedGraph& host, const std::vector<int>& verts, const std::vector<ComponentType>& types,
                  const std::vector<Item>& items)
        : host_(host), verts_(verts), types_(types), items_(items)
    {
    }

    std::vector<Mask> masks()
    {
        image_.assign(verts_.size(), -1);
        used_.assign(static_cast<std::size_t>(host_.size()), 0);
        found_.clear();
        recurse(0);
        return maximal(std::move(found_));
    }

private:
    void recurse(std::size_t k)
    {
        if (k == verts_.size()) {
            Mask m(items_.size());
            for (std::size_t i = 0; i < items_.size(); ++i) {
                const auto& it = items_[i];
                const int a = image_[it.u];
                const int b = image_[it.v];
                m[i] = it.label < 0 ? host_.has_cf(a, b) : host_.has_meta(a, b, it.label);
            }
            found_.insert(std::move(m));
            return;
        }
        for (int w = 0; w < host_.size(); ++w) {
            if (used_[w] || host_.types[w] != types_[k])
                continue;
            used_[w] = 1;
            image_[k] = w;
            recurse(k + 1);
            used_[w] = 0;
        }
    }

    const IndexedGraph& host_;
    const std::vector<int>& verts_;
    const std::vector<ComponentType>& types_;
    const std::vector<Item>& items_;
    std::vector<int> image_;
    std::vector<char> used_;
    std::set<Mask> found_;
};

} // namespace

OracleResult oracle_mscs(std::span<const Iccg> samples, const WeightTable& weights, const OracleOptions& options)
{
    if (samples.empty())
        throw InvariantError("oracle needs at least one sample");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::size_t n = samples[i].vertex_count() - (samples[i].has_system() ? 1 : 0);
        if (n > static_cast<std::size_t>(kOracleMaxVertices))
            throw TooLargeError("sample " + std::to_string(i + 1) + " has " + std::to_string(n) +
                                " non-SYSTEM vertices; the oracle accepts at most " +
                                std::to_string(kOracleMaxVertices));
    }
    const bool anchored = std::all_of(samples.begin(), samples.end(), [](const Iccg& g) { return g.has_system(); });

    LabelTable labels;
    std::vector<IndexedGraph> graphs;
    for (const auto& g : samples)
        graphs.push_back(IndexedGraph::build(g, labels));
    const IndexedGraph& first = graphs[0];

    std::vector<int> pool;
    for (int w = 0; w < first.size(); ++w)
        if (w != first.system)
            pool.push_back(w);

    std::optional<OracleResult> best;
    for (std::uint32_t subset = 0; subset < (1u << pool.size()); ++subset) {
        // Chosen vertices of the first sample, local index -> sample index.
        std::vector<int> verts;
        for (std::size_t k = 0; k < pool.size(); ++k)
            if (subset & (1u << k))
                verts.push_back(pool[k]);
        if (anchored)
            verts.push_back(first.system);
        std::vector<ComponentType> types;
        for (int w : verts)
            types.push_back(first.types[w]);

        std::vector<Item> items;
        for (std::size_t a = 0; a < verts.size(); ++a)
            for (std::size_t b = 0; b < verts.size(); ++b)
                if (first.has_cf(verts[a], verts[b]))
                    items.push_back({static_cast<int>(a), static_cast<int>(b), -1});
        for (std::size_t a = 0; a < verts.size(); ++a)
            for (std::size_t b = 0; b < verts.size(); ++b)
                for (int d = 0; d < labels.size(); ++d)
                    if (first.has_meta(verts[a], verts[b], d))
                        items.push_back({static_cast<int>(a), static_cast<int>(b), d});

        std::vector<Mask> current{Mask(items.size()).set()};
        for (std::size_t i = 1; i < graphs.size() && !current.empty(); ++i) {
            const std::vector<Mask> here = MapEnumerator(graphs[i], verts, types, items).masks();
            std::set<Mask> next;
            for (const auto& a : current)
                for (const auto& b : here)
                    next.insert(a & b);
            current = maximal(std::move(next));
        }

        for (const auto& mask : current) {
            if (options.require_metadata_support) {
                std::vector<char> supported(verts.size(), 0);
                for (std::size_t i = 0; i < items.size(); ++i)
                    if (mask[i] && items[i].label >= 0)
                        supported[items[i].u] = supported[items[i].v] = 1;
                bool ok = true;
                for (std::size_t k = 0; k < verts.size(); ++k)
                    ok = ok && (supported[k] || verts[k] == first.system);
                if (!ok)
                    continue;
            }
            Iccg g;
            for (int w : verts)
                g.add_vertex(first.ids[w], first.types[w]);
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (!mask[i])
                    continue;
                const std::string& u = first.ids[verts[items[i].u]];
                const std::string& v = first.ids[verts[items[i].v]];
                if (items[i].label < 0)
                    g.add_cf_edge(u, v);
                else
                    g.add_meta_edge(u, v, labels.at(items[i].label));
            }
            OracleResult r;
            r.objective = objective_vector(g, weights);
            r.weighted_size = weighted_size(g, weights);
            const bool improves =
                !best || (options.mode == ObjectiveMode::lexicographic ? r.objective > best->objective
                                                                       : r.weighted_size > best->weighted_size);
            if (improves) {
                const Suspiciousness s = signature_suspiciousness(g, weights);
                r.signature = Signature{std::move(g), "", s.total, s.tiers};
                best = std::move(r);
            }
        }
    }
    if (!best)
        throw InternalError("oracle found no feasible candidate");
    return *best;
}

} // namespace sigsynth
