#include "sigsynth/obfuscator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "sigsynth/error.hpp"

namespace sigsynth {

namespace {

template <class T>
void partial_shuffle(std::vector<T>& v, std::size_t k, Prng& rng)
{
    for (std::size_t i = 0; i < k && i < v.size(); ++i)
        std::swap(v[i], v[i + rng.below(v.size() - i)]);
}

std::string hex_name(std::uint64_t x)
{
    char buf[24];
    std::snprintf(buf, sizeof buf, "c%08llx", static_cast<unsigned long long>(x & 0xffffffffULL));
    return buf;
}

Iccg rebuild(const Iccg& g, const std::map<std::string, std::string>& rename)
{
    Iccg out(g.name());
    for (const auto& [id, type] : g.vertices())
        out.add_vertex(rename.at(id), type);
    for (const auto& [u, v] : g.cf_edges())
        out.add_cf_edge(rename.at(u), rename.at(v));
    for (const auto& e : g.meta_edges())
        out.add_meta_edge(rename.at(e.src), rename.at(e.dst), e.label);
    return out;
}

void apply(Iccg& g, const RenameComponents&, Prng& rng)
{
    std::map<std::string, std::string> rename;
    std::set<std::string> taken;
    for (const auto& [id, type] : g.vertices()) {
        if (id == kSystemId) {
            rename[id] = id;
            taken.insert(id);
        }
    }
    for (const auto& [id, type] : g.vertices()) {
        if (id == kSystemId)
            continue;
        std::string fresh;
        do
            fresh = hex_name(rng.below(std::numeric_limits<std::uint64_t>::max()));
        while (!taken.insert(fresh).second);
        rename[id] = fresh;
    }
    g = rebuild(g, rename);
}

void apply(Iccg& g, const InsertDummyOnEdge& op, Prng& rng)
{
    if (op.count < 0)
        throw InvariantError("insert_dummy count must be non-negative");
    int next = 0;
    for (int k = 0; k < op.count && !g.cf_edges().empty(); ++k) {
        const std::vector<CfEdge> edges(g.cf_edges().begin(), g.cf_edges().end());
        const auto [u, v] = edges[rng.below(edges.size())];
        std::string dummy;
        do
            dummy = "dummy" + std::to_string(next++);
        while (g.has_vertex(dummy));
        g.remove_cf_edge(u, v);
        g.add_vertex(dummy, ComponentType::activity);
        g.add_cf_edge(u, dummy);
        g.add_cf_edge(dummy, v);
    }
}

void apply(Iccg& g, const RemoveMetadata& op, Prng& rng)
{
    if (!(op.fraction >= 0.0 && op.fraction <= 1.0))
        throw InvariantError("remove_metadata fraction must lie in [0, 1]");
    std::vector<MetaEdge> tier;
    for (const auto& e : g.meta_edges())
        if (tier_of(e.label) == op.tier)
            tier.push_back(e);
    const auto k = static_cast<std::size_t>(std::floor(op.fraction * static_cast<double>(tier.size()) + 0.5));
    partial_shuffle(tier, k, rng);
    for (std::size_t i = 0; i < k; ++i)
        g.remove_meta_edge(tier[i]);
}

void apply(Iccg& g, const AddNoiseEdges& op, Prng& rng)
{
    if (op.count < 0)
        throw InvariantError("noise_edges count must be non-negative");
    std::vector<CfEdge> absent;
    for (const auto& [u, tu] : g.vertices())
        for (const auto& [v, tv] : g.vertices())
            if (tv != ComponentType::system && !g.has_cf_edge(u, v))
                absent.emplace_back(u, v);
    const auto k = std::min(absent.size(), static_cast<std::size_t>(op.count));
    partial_shuffle(absent, k, rng);
    for (std::size_t i = 0; i < k; ++i)
        g.add_cf_edge(absent[i].first, absent[i].second);
}

int tier_from_json(const nlohmann::json& j)
{
    if (j.is_number_integer()) {
        const int t = j.get<int>();
        if (t < 0 || t > kTaintTier)
            throw ParseError("remove_metadata tier must be 0, 1 or 2");
        return t;
    }
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "filter")
            return kFilterTier;
        if (s == "api" || s == "action")
            return kApiTier;
        if (s == "taint")
            return kTaintTier;
    }
    throw ParseError("remove_metadata tier must be 'filter', 'api' or 'taint'");
}

} // namespace

std::uint64_t Prng::below(std::uint64_t n)
{
    if (n == 0)
        throw InvariantError("empty range");
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - (max % n + 1) % n;  // n * floor(2^64 / n) - 1
    std::uint64_t x;
    do
        x = engine_();
    while (x > limit);
    return x % n;
}

Iccg obfuscate(const Iccg& g, const std::vector<ObfuscationOp>& ops, std::uint64_t seed)
{
    Prng rng(seed);
    Iccg out = g;
    for (const auto& op : ops)
        std::visit([&](const auto& o) { apply(out, o, rng); }, op);
    return out;
}

Recipe recipe_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw ParseError("recipe must be a JSON object");
    Recipe r;
    try {
        r.seed = j.value("seed", std::uint64_t{0});
        if (!j.contains("ops") || !j.at("ops").is_array())
            throw ParseError("recipe needs an 'ops' array");
        std::size_t index = 0;
        for (const auto& o : j.at("ops")) {
            const std::string ctx = "ops[" + std::to_string(index++) + "]";
            const std::string name = o.value("op", "");
            if (name == "rename")
                r.ops.emplace_back(RenameComponents{});
            else if (name == "insert_dummy")
                r.ops.emplace_back(InsertDummyOnEdge{o.value("count", 1)});
            else if (name == "remove_metadata")
                r.ops.emplace_back(RemoveMetadata{o.value("fraction", 0.0), tier_from_json(o.value("tier", nlohmann::json("taint")))});
            else if (name == "noise_edges")
                r.ops.emplace_back(AddNoiseEdges{o.value("count", 1)});
            else
                throw ParseError(ctx + ".op: unknown operation '" + name + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("recipe: ") + e.what());
    }
    return r;
}

Recipe load_recipe(const std::filesystem::path& path)
{
    try {
        return recipe_from_json(nlohmann::json::parse(read_text_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace sigsynth
