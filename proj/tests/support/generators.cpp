#include "generators.hpp"

#include <algorithm>
#include <map>

namespace sigsynth::testing {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::vector<MetadataLabel> label_pool(int count)
{
    const std::vector<MetadataLabel> all = {
        intent_filter("SMS_RECEIVED"),     taint_flow("DeviceId", "Internet"),
        suspicious_api("sendTextMessage"), intent_filter("BOOT_COMPLETED"),
        taint_flow("Location", "SMS"),     suspicious_action("INSTALL_PACKAGE"),
        intent_filter("PHONE_STATE"),      taint_flow("Contacts", "Internet"),
    };
    return {all.begin(), all.begin() + std::min<std::size_t>(all.size(), static_cast<std::size_t>(count))};
}

Iccg random_iccg(Rng& rng, const std::vector<MetadataLabel>& labels, const GraphParams& p, const std::string& prefix)
{
    Iccg g(prefix);
    std::vector<std::string> ids;
    if (coin(rng, p.system_prob)) {
        g.add_vertex(std::string(kSystemId), ComponentType::system);
        ids.emplace_back(kSystemId);
    }
    const int n = uniform(rng, p.min_vertices, p.max_vertices);
    for (int k = 0; k < n; ++k) {
        const std::string id = prefix + std::to_string(k);
        g.add_vertex(id, p.types[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(p.types.size()) - 1))]);
        ids.push_back(id);
    }
    for (const auto& u : ids)
        for (const auto& v : ids)
            if (v != kSystemId && coin(rng, p.cf_prob))
                g.add_cf_edge(u, v);
    for (const auto& u : ids)
        for (const auto& v : ids)
            for (const auto& d : labels)
                if (coin(rng, u == v ? p.meta_prob : p.cross_meta_prob))
                    g.add_meta_edge(u, v, d);
    return g;
}

Iccg rename_all(const Iccg& g, const std::string& prefix)
{
    std::map<std::string, std::string> name;
    int k = 0;
    for (const auto& [id, t] : g.vertices())
        name[id] = id == kSystemId ? id : prefix + std::to_string(k++);
    Iccg out(g.name());
    for (const auto& [id, t] : g.vertices())
        out.add_vertex(name[id], t);
    for (const auto& [u, v] : g.cf_edges())
        out.add_cf_edge(name[u], name[v]);
    for (const auto& e : g.meta_edges())
        out.add_meta_edge(name[e.src], name[e.dst], e.label);
    return out;
}

Iccg grow(Rng& rng, const Iccg& core, const std::vector<MetadataLabel>& labels, const GraphParams& extra,
          const std::string& prefix)
{
    Iccg g = rename_all(core, prefix + "c");
    if (!g.has_system() && coin(rng, extra.system_prob))
        g.add_vertex(std::string(kSystemId), ComponentType::system);
    const int n = uniform(rng, extra.min_vertices, extra.max_vertices);
    for (int k = 0; k < n; ++k)
        g.add_vertex(prefix + "x" + std::to_string(k),
                     extra.types[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(extra.types.size()) - 1))]);
    std::vector<std::string> ids;
    for (const auto& [id, t] : g.vertices())
        ids.push_back(id);
    for (const auto& u : ids)
        for (const auto& v : ids)
            if (v != kSystemId && !g.has_cf_edge(u, v) && coin(rng, extra.cf_prob))
                g.add_cf_edge(u, v);
    for (const auto& u : ids)
        for (const auto& v : ids)
            for (const auto& d : labels)
                if (!g.has_meta_edge({u, v, d}) && coin(rng, u == v ? extra.meta_prob : extra.cross_meta_prob))
                    g.add_meta_edge(u, v, d);
    return g;
}

std::vector<Iccg> random_instance(Rng& rng, int samples, int max_vertices, const std::vector<MetadataLabel>& labels)
{
    std::vector<Iccg> out;
    if (coin(rng, 0.25)) {
        GraphParams p;
        p.max_vertices = max_vertices;
        for (int i = 0; i < samples; ++i)
            out.push_back(random_iccg(rng, labels, p, "s" + std::to_string(i) + "v"));
        return out;
    }
    GraphParams core_params;
    core_params.min_vertices = 1;
    core_params.max_vertices = std::min(3, max_vertices);
    core_params.meta_prob = 0.45;
    core_params.cf_prob = 0.35;
    const Iccg core = random_iccg(rng, labels, core_params, "core");
    GraphParams extra;
    extra.min_vertices = 0;
    extra.max_vertices = std::max(0, max_vertices - static_cast<int>(core.vertex_count() - (core.has_system() ? 1 : 0)));
    extra.system_prob = core.has_system() ? 0.0 : 0.3;
    for (int i = 0; i < samples; ++i)
        out.push_back(grow(rng, core, labels, extra, "s" + std::to_string(i)));
    return out;
}

WeightTable random_weights(Rng& rng, const std::vector<MetadataLabel>& labels)
{
    std::map<MetadataLabel, std::int64_t> counts;
    for (const auto& d : labels) {
        const int b = uniform(rng, 0, 9);
        if (b > 0)
            counts[d] = b;
    }
    return WeightTable(9, counts);
}

} // namespace sigsynth::testing
