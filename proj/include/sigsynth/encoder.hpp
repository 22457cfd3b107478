#pragma once

// MaxSAT encoding of maximally-suspicious common subgraph synthesis.
//
// Signature vertices are drawn from a fixed pool holding, per component type r,
// m_r = min over samples of the number of type-r components. Free variables:
//   d(v)          pool vertex v is in the signature
//   f_i(v, w)     sample i's embedding maps v to w (only for equal types)
//   x0(v, v')     signature control-flow edge
//   y0(v, v', d)  signature metadata edge with label d
// Hard clauses make every model a common subgraph with embeddings into all samples;
// soft unit clauses on x0 / y0 carry the suspiciousness objective.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "sigsynth/graph_index.hpp"
#include "sigsynth/iccg.hpp"
#include "sigsynth/wcnf.hpp"
#include "sigsynth/weights.hpp"

namespace sigsynth {

inline constexpr std::int64_t kQuantizationScale = 1000;

/// round(w * 1000), at least 1.
std::int64_t quantize(const Rational& w);

struct PoolVertex {
    ComponentType type;
    int index_in_type;  // position among pool vertices of the same type
};

struct VertexPool {
    std::map<ComponentType, int> per_type;  // m_r for each pool type
    std::vector<PoolVertex> vertices;       // activity, provider, receiver, service order
    /// Every sample has a SYSTEM vertex; it is then pinned to SYSTEM in each embedding.
    bool system_anchor = false;

    int size() const { return static_cast<int>(vertices.size()); }
    /// Slot count including the SYSTEM anchor (stored after the typed vertices).
    int slot_count() const { return size() + (system_anchor ? 1 : 0); }
    int system_slot() const { return system_anchor ? size() : -1; }
    ComponentType slot_type(int slot) const;
};

VertexPool build_pool(std::span<const Iccg> samples);

enum class ObjectiveMode {
    /// Four tiers: intent filters, API calls/actions, taint flows, cf edge count.
    lexicographic,
    /// One tier maximizing weighted size: 1 per vertex, 1 per cf edge, w_y per metadata
    /// edge, scaled to exact integers. Used for similarity scoring.
    weighted_size,
};

struct EncodeOptions {
    ObjectiveMode mode = ObjectiveMode::lexicographic;
    /// Every non-SYSTEM signature vertex must carry at least one metadata edge.
    bool require_metadata_support = true;
};

struct VarEntity {
    enum class Kind { domain, embed, cf_edge, meta_edge };
    Kind kind = Kind::domain;
    int slot = -1;
    int slot2 = -1;
    int sample = -1;
    int target = -1;  // sample vertex index for embed vars
    int label = -1;   // label id for metadata vars
};

struct VarMap {
    std::vector<int> domain;                                  // slot -> var
    std::vector<std::vector<std::vector<std::pair<int, int>>>> embed;  // [sample][slot] -> (w, var)
    std::map<std::pair<int, int>, int> cf_edge;               // (slot, slot') -> var
    std::map<std::tuple<int, int, int>, int> meta_edge;       // (slot, slot', label) -> var
    std::vector<VarEntity> entities;                          // var id -> entity (index 0 unused)
    LabelTable labels;

    int num_vars() const { return static_cast<int>(entities.size()) - 1; }
};

struct Encoding {
    WcnfProblem problem;
    VarMap vars;
    /// Integer weight per unit of rational weight in weighted_size mode (1 otherwise).
    std::int64_t size_scale = 1;
    std::vector<std::string> warnings;
};

/// Builds hard and soft clauses. Throws WeightOverflowError when scaled weights overflow.
Encoding encode(std::span<const Iccg> samples, const WeightTable& weights, const VertexPool& pool,
                const EncodeOptions& options = {});

} // namespace sigsynth
