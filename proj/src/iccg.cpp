#include "sigsynth/iccg.hpp"

#include <fstream>
#include <queue>
#include <sstream>

#include "sigsynth/error.hpp"

namespace sigsynth {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(ComponentType t)
{
    switch (t) {
    case ComponentType::activity: return "activity";
    case ComponentType::provider: return "provider";
    case ComponentType::receiver: return "receiver";
    case ComponentType::service: return "service";
    case ComponentType::system: return "system";
    }
    return "?";
}

ComponentType component_type_from_string(std::string_view s)
{
    if (s == "activity") return ComponentType::activity;
    if (s == "provider") return ComponentType::provider;
    if (s == "receiver") return ComponentType::receiver;
    if (s == "service") return ComponentType::service;
    if (s == "system") return ComponentType::system;
    throw ParseError("unknown component type '" + std::string(s) + "'");
}

std::string_view to_string(LabelKind k)
{
    switch (k) {
    case LabelKind::taint: return "taint";
    case LabelKind::api: return "api";
    case LabelKind::action: return "action";
    case LabelKind::filter: return "filter";
    }
    return "?";
}

LabelKind label_kind_from_string(std::string_view s)
{
    if (s == "taint") return LabelKind::taint;
    if (s == "api") return LabelKind::api;
    if (s == "action") return LabelKind::action;
    if (s == "filter") return LabelKind::filter;
    throw ParseError("unknown label kind '" + std::string(s) + "'");
}

MetadataLabel taint_flow(std::string source, std::string sink)
{
    return {LabelKind::taint, {std::move(source), std::move(sink)}};
}
MetadataLabel suspicious_api(std::string name) { return {LabelKind::api, {std::move(name)}}; }
MetadataLabel suspicious_action(std::string name) { return {LabelKind::action, {std::move(name)}}; }
MetadataLabel intent_filter(std::string name) { return {LabelKind::filter, {std::move(name)}}; }

int tier_of(const MetadataLabel& label)
{
    switch (label.kind) {
    case LabelKind::filter: return kFilterTier;
    case LabelKind::api:
    case LabelKind::action: return kApiTier;
    case LabelKind::taint: return kTaintTier;
    }
    return kTaintTier;
}

std::string to_string(const MetadataLabel& label)
{
    std::string out = label.kind == LabelKind::taint ? "flow" : std::string(to_string(label.kind));
    out += '(';
    for (std::size_t i = 0; i < label.args.size(); ++i) {
        if (i) out += ',';
        out += label.args[i];
    }
    out += ')';
    return out;
}

namespace {

std::size_t expected_arity(LabelKind k) { return k == LabelKind::taint ? 2 : 1; }

void check_label(const MetadataLabel& label)
{
    if (label.args.size() != expected_arity(label.kind))
        throw InvariantError("label " + to_string(label) + " has wrong arity for kind '" +
                             std::string(to_string(label.kind)) + "'");
}

} // namespace

// ---- Iccg ----

void Iccg::require_vertex(const std::string& id) const
{
    if (!vertices_.contains(id))
        throw InvariantError("unknown vertex " + id);
}

void Iccg::add_vertex(const std::string& id, ComponentType type)
{
    if (id.empty())
        throw InvariantError("empty vertex id");
    if (vertices_.contains(id))
        throw InvariantError("duplicate vertex id " + id);
    const bool reserved = id == kSystemId;
    if (reserved != (type == ComponentType::system))
        throw InvariantError("vertex " + id + ": type 'system' is reserved for id SYSTEM");
    vertices_.emplace(id, type);
}

void Iccg::add_cf_edge(const std::string& src, const std::string& dst)
{
    require_vertex(src);
    require_vertex(dst);
    if (dst == kSystemId)
        throw InvariantError("cf edge " + src + "->" + dst + ": SYSTEM has no incoming edges");
    if (!cf_edges_.emplace(src, dst).second)
        throw InvariantError("duplicate cf edge " + src + "->" + dst);
}

void Iccg::add_meta_edge(const std::string& src, const std::string& dst, MetadataLabel label)
{
    require_vertex(src);
    require_vertex(dst);
    check_label(label);
    MetaEdge e{src, dst, std::move(label)};
    const std::string desc = src + "->" + dst + " " + to_string(e.label);
    if (!meta_edges_.insert(std::move(e)).second)
        throw InvariantError("duplicate metadata edge " + desc);
}

void Iccg::remove_vertex(const std::string& id)
{
    require_vertex(id);
    vertices_.erase(id);
    std::erase_if(cf_edges_, [&](const CfEdge& e) { return e.first == id || e.second == id; });
    std::erase_if(meta_edges_, [&](const MetaEdge& e) { return e.src == id || e.dst == id; });
}

bool Iccg::remove_cf_edge(const std::string& src, const std::string& dst)
{
    return cf_edges_.erase({src, dst}) > 0;
}

bool Iccg::remove_meta_edge(const MetaEdge& e) { return meta_edges_.erase(e) > 0; }

bool Iccg::has_cf_edge(const std::string& src, const std::string& dst) const
{
    return cf_edges_.contains({src, dst});
}

std::optional<ComponentType> Iccg::type_of(const std::string& id) const
{
    auto it = vertices_.find(id);
    if (it == vertices_.end())
        return std::nullopt;
    return it->second;
}

// ---- JSON ----

ordered_json label_to_json(const MetadataLabel& label)
{
    ordered_json j;
    j["kind"] = std::string(to_string(label.kind));
    j["args"] = label.args;
    return j;
}

namespace {

const json& field(const json& obj, const char* key, const std::string& context)
{
    if (!obj.is_object())
        throw ParseError(context + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(context + ": missing field '" + key + "'");
    return *it;
}

std::string string_field(const json& obj, const char* key, const std::string& context)
{
    const json& v = field(obj, key, context);
    if (!v.is_string())
        throw ParseError(context + "." + key + ": expected a string");
    return v.get<std::string>();
}

const json& array_field(const json& obj, const char* key, const std::string& context)
{
    const json& v = field(obj, key, context);
    if (!v.is_array())
        throw ParseError(context + "." + key + ": expected an array");
    return v;
}

} // namespace

MetadataLabel label_from_json(const json& j, const std::string& context)
{
    MetadataLabel label;
    try {
        label.kind = label_kind_from_string(string_field(j, "kind", context));
    } catch (const ParseError& e) {
        throw ParseError(context + ".kind: " + e.what());
    }
    const json& args = array_field(j, "args", context);
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!args[i].is_string())
            throw ParseError(context + ".args[" + std::to_string(i) + "]: expected a string");
        label.args.push_back(args[i].get<std::string>());
    }
    if (label.args.size() != expected_arity(label.kind))
        throw ParseError(context + ": label kind '" + std::string(to_string(label.kind)) +
                         "' expects " + std::to_string(expected_arity(label.kind)) + " args");
    return label;
}

ordered_json iccg_to_json(const Iccg& g)
{
    ordered_json j;
    j["name"] = g.name();
    ordered_json vertices = ordered_json::array();
    for (const auto& [id, type] : g.vertices())
        vertices.push_back(ordered_json{{"id", id}, {"type", std::string(to_string(type))}});
    j["vertices"] = std::move(vertices);
    ordered_json cf = ordered_json::array();
    for (const auto& [s, d] : g.cf_edges())
        cf.push_back(ordered_json::array({s, d}));
    j["cf_edges"] = std::move(cf);
    ordered_json meta = ordered_json::array();
    for (const auto& e : g.meta_edges())
        meta.push_back(ordered_json{{"src", e.src}, {"dst", e.dst}, {"label", label_to_json(e.label)}});
    j["meta_edges"] = std::move(meta);
    return j;
}

Iccg iccg_from_json(const json& j)
{
    if (!j.is_object())
        throw ParseError("ICCG document must be a JSON object");
    Iccg g;
    if (j.contains("name")) {
        if (!j["name"].is_string())
            throw ParseError("name: expected a string");
        g.set_name(j["name"].get<std::string>());
    }
    const json& vertices = array_field(j, "vertices", "iccg");
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const std::string ctx = "vertices[" + std::to_string(i) + "]";
        const std::string id = string_field(vertices[i], "id", ctx);
        ComponentType type;
        try {
            type = component_type_from_string(string_field(vertices[i], "type", ctx));
        } catch (const ParseError& e) {
            throw ParseError(ctx + ".type: " + e.what());
        }
        g.add_vertex(id, type);
    }
    if (j.contains("cf_edges")) {
        const json& cf = array_field(j, "cf_edges", "iccg");
        for (std::size_t i = 0; i < cf.size(); ++i) {
            const std::string ctx = "cf_edges[" + std::to_string(i) + "]";
            if (!cf[i].is_array() || cf[i].size() != 2 || !cf[i][0].is_string() || !cf[i][1].is_string())
                throw ParseError(ctx + ": expected [src, dst]");
            g.add_cf_edge(cf[i][0].get<std::string>(), cf[i][1].get<std::string>());
        }
    }
    if (j.contains("meta_edges")) {
        const json& meta = array_field(j, "meta_edges", "iccg");
        for (std::size_t i = 0; i < meta.size(); ++i) {
            const std::string ctx = "meta_edges[" + std::to_string(i) + "]";
            g.add_meta_edge(string_field(meta[i], "src", ctx), string_field(meta[i], "dst", ctx),
                            label_from_json(field(meta[i], "label", ctx), ctx + ".label"));
        }
    }
    return g;
}

namespace {

json parse_json_text(std::string_view text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
}

} // namespace

Iccg parse_iccg(std::string_view text) { return iccg_from_json(parse_json_text(text)); }

std::string dump_iccg(const Iccg& g) { return iccg_to_json(g).dump(2) + "\n"; }

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write " + path.string());
    out << text;
    if (!out)
        throw Error("write failed for " + path.string());
}

Iccg load_iccg(const std::filesystem::path& path)
{
    const std::string text = read_text_file(path);
    try {
        return parse_iccg(text);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const InvariantError& e) {
        throw InvariantError(path.string() + ": " + e.what());
    }
}

void save_iccg(const Iccg& g, const std::filesystem::path& path) { write_text_file(path, dump_iccg(g)); }

ordered_json signature_to_json(const Signature& s)
{
    ordered_json j = iccg_to_json(s.graph);
    j["family"] = s.family;
    j["suspiciousness"] = rational_to_json(s.suspiciousness);
    ordered_json tiers = ordered_json::array();
    for (const auto& t : s.tier_scores)
        tiers.push_back(rational_to_json(t));
    j["tier_scores"] = std::move(tiers);
    return j;
}

Signature signature_from_json(const json& j)
{
    Signature s;
    s.graph = iccg_from_json(j);
    s.family = string_field(j, "family", "signature");
    s.suspiciousness = rational_from_json(field(j, "suspiciousness", "signature"));
    const json& tiers = array_field(j, "tier_scores", "signature");
    if (tiers.size() != kTierCount)
        throw ParseError("signature.tier_scores: expected " + std::to_string(kTierCount) + " entries");
    for (std::size_t i = 0; i < tiers.size(); ++i)
        s.tier_scores[i] = rational_from_json(tiers[i]);
    return s;
}

std::string dump_signature(const Signature& s) { return signature_to_json(s).dump(2) + "\n"; }

Signature load_signature(const std::filesystem::path& path)
{
    const std::string text = read_text_file(path);
    try {
        return signature_from_json(parse_json_text(text));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const InvariantError& e) {
        throw InvariantError(path.string() + ": " + e.what());
    }
}

void save_signature(const Signature& s, const std::filesystem::path& path)
{
    write_text_file(path, dump_signature(s));
}

// ---- utilities ----

Iccg transitive_closure(const Iccg& g)
{
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& [s, d] : g.cf_edges())
        succ[s].push_back(d);

    Iccg out(g.name());
    for (const auto& [id, type] : g.vertices())
        out.add_vertex(id, type);
    for (const auto& e : g.meta_edges())
        out.add_meta_edge(e.src, e.dst, e.label);

    // Reachability via paths of length >= 1: seed the search with direct successors.
    for (const auto& [id, type] : g.vertices()) {
        std::set<std::string> seen;
        std::queue<std::string> work;
        if (auto it = succ.find(id); it != succ.end())
            for (const auto& d : it->second)
                if (seen.insert(d).second)
                    work.push(d);
        while (!work.empty()) {
            const std::string u = work.front();
            work.pop();
            if (auto it = succ.find(u); it != succ.end())
                for (const auto& d : it->second)
                    if (seen.insert(d).second)
                        work.push(d);
        }
        for (const auto& d : seen)
            out.add_cf_edge(id, d);
    }
    return out;
}

TypeCensus type_census(const Iccg& g)
{
    TypeCensus census;
    for (auto t : kPoolTypes)
        census[t] = 0;
    for (const auto& [id, type] : g.vertices())
        if (type != ComponentType::system)
            ++census[type];
    return census;
}

} // namespace sigsynth
