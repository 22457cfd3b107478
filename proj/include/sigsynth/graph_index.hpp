#pragma once

// Integer-indexed views of ICCGs used by the encoder, matcher and oracle.

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "sigsynth/iccg.hpp"

namespace sigsynth {

/// Interns metadata labels to dense ids.
class LabelTable {
public:
    int intern(const MetadataLabel& label);
    /// -1 when the label was never interned.
    int find(const MetadataLabel& label) const;
    const MetadataLabel& at(int id) const { return labels_.at(static_cast<std::size_t>(id)); }
    int size() const { return static_cast<int>(labels_.size()); }

private:
    std::vector<MetadataLabel> labels_;
    std::map<MetadataLabel, int> ids_;
};

struct IndexedGraph {
    std::vector<std::string> ids;       // canonical (sorted) order
    std::vector<ComponentType> types;
    std::vector<std::vector<char>> cf;  // cf[u][v] != 0 iff (u, v) in X
    std::set<std::tuple<int, int, int>> meta;  // (u, v, label id)
    int system = -1;

    static IndexedGraph build(const Iccg& g, LabelTable& labels);

    int size() const { return static_cast<int>(ids.size()); }
    bool has_cf(int u, int v) const { return cf[u][v] != 0; }
    bool has_meta(int u, int v, int label) const { return meta.contains({u, v, label}); }
    int index_of(const std::string& id) const;
};

} // namespace sigsynth
