#pragma once

// Inter-component call graph (ICCG) data model.
//
// An ICCG is a triple (V, X, Y): typed components, control-flow (call) edges between
// components, and labeled metadata edges. A single reserved vertex "SYSTEM" of type
// `system` stands for the Android framework; it may only have outgoing call edges.

#include <array>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sigsynth/rational.hpp"

namespace sigsynth {

/// Component kinds. Declaration order is the canonical pool order (activity, provider,
/// receiver, service); `system` is reserved for the framework vertex.
enum class ComponentType { activity, provider, receiver, service, system };

inline constexpr std::array<ComponentType, 4> kPoolTypes = {
    ComponentType::activity, ComponentType::provider, ComponentType::receiver,
    ComponentType::service};

inline constexpr std::string_view kSystemId = "SYSTEM";

std::string_view to_string(ComponentType t);
ComponentType component_type_from_string(std::string_view s);

enum class LabelKind { taint, api, action, filter };

std::string_view to_string(LabelKind k);
LabelKind label_kind_from_string(std::string_view s);

/// Metadata label d from the label domain. Equality is structural.
struct MetadataLabel {
    LabelKind kind = LabelKind::api;
    std::vector<std::string> args;

    auto operator<=>(const MetadataLabel&) const = default;
};

MetadataLabel taint_flow(std::string source, std::string sink);
MetadataLabel suspicious_api(std::string name);
MetadataLabel suspicious_action(std::string name);
MetadataLabel intent_filter(std::string name);

/// Lexicographic priority tiers: intent filters, then API calls/actions, then taint
/// flows, then the control-flow edge count.
inline constexpr int kFilterTier = 0;
inline constexpr int kApiTier = 1;
inline constexpr int kTaintTier = 2;
inline constexpr int kEdgeTier = 3;
inline constexpr int kTierCount = 4;

int tier_of(const MetadataLabel& label);

/// Human-readable form, e.g. `flow(DeviceId,Internet)` or `filter(SMS_RECEIVED)`.
std::string to_string(const MetadataLabel& label);

struct MetaEdge {
    std::string src;
    std::string dst;
    MetadataLabel label;

    auto operator<=>(const MetaEdge&) const = default;
};

using CfEdge = std::pair<std::string, std::string>;
using TypeCensus = std::map<ComponentType, std::size_t>;

/// Value-semantic ICCG. Every mutator validates the graph invariants and throws
/// InvariantError on violation, so any Iccg instance is always valid.
class Iccg {
public:
    Iccg() = default;
    explicit Iccg(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    void add_vertex(const std::string& id, ComponentType type);
    void add_cf_edge(const std::string& src, const std::string& dst);
    void add_meta_edge(const std::string& src, const std::string& dst, MetadataLabel label);

    /// Removes a vertex together with every incident edge.
    void remove_vertex(const std::string& id);
    bool remove_cf_edge(const std::string& src, const std::string& dst);
    bool remove_meta_edge(const MetaEdge& e);

    bool has_vertex(const std::string& id) const { return vertices_.contains(id); }
    bool has_cf_edge(const std::string& src, const std::string& dst) const;
    bool has_meta_edge(const MetaEdge& e) const { return meta_edges_.contains(e); }
    std::optional<ComponentType> type_of(const std::string& id) const;
    bool has_system() const { return vertices_.contains(std::string(kSystemId)); }

    const std::map<std::string, ComponentType>& vertices() const { return vertices_; }
    const std::set<CfEdge>& cf_edges() const { return cf_edges_; }
    const std::set<MetaEdge>& meta_edges() const { return meta_edges_; }

    std::size_t vertex_count() const { return vertices_.size(); }

    friend bool operator==(const Iccg&, const Iccg&) = default;

private:
    void require_vertex(const std::string& id) const;

    std::string name_;
    std::map<std::string, ComponentType> vertices_;
    std::set<CfEdge> cf_edges_;
    std::set<MetaEdge> meta_edges_;
};

/// A synthesized (or loaded) family signature.
struct Signature {
    Iccg graph;
    std::string family;
    /// |X0| + sum of metadata weights under the table used at synthesis time.
    Rational suspiciousness;
    /// Per-tier sums: filters, API calls/actions, taint flows, cf edge count.
    std::array<Rational, kTierCount> tier_scores{};

    friend bool operator==(const Signature&, const Signature&) = default;
};

// ---- serialization (ICCG-JSON v1 / Signature-JSON) ----

nlohmann::ordered_json label_to_json(const MetadataLabel& label);
MetadataLabel label_from_json(const nlohmann::json& j, const std::string& context = "label");

nlohmann::ordered_json iccg_to_json(const Iccg& g);
Iccg iccg_from_json(const nlohmann::json& j);

/// Parses ICCG-JSON text. Syntax errors carry the parser's line/column context.
Iccg parse_iccg(std::string_view text);
std::string dump_iccg(const Iccg& g);

Iccg load_iccg(const std::filesystem::path& path);
void save_iccg(const Iccg& g, const std::filesystem::path& path);

nlohmann::ordered_json signature_to_json(const Signature& s);
Signature signature_from_json(const nlohmann::json& j);
std::string dump_signature(const Signature& s);
Signature load_signature(const std::filesystem::path& path);
void save_signature(const Signature& s, const std::filesystem::path& path);

/// Reads a whole file; throws Error naming the path on failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// ---- graph utilities ----

/// Same vertices and metadata; cf edges replaced by reachability over paths of length >= 1.
Iccg transitive_closure(const Iccg& g);

/// Counts per pool type; the SYSTEM vertex is excluded. Every pool type has an entry.
TypeCensus type_census(const Iccg& g);

} // namespace sigsynth
