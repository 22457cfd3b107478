#include "sigsynth/graph_index.hpp"

#include <algorithm>

namespace sigsynth {

int LabelTable::intern(const MetadataLabel& label)
{
    auto [it, inserted] = ids_.emplace(label, static_cast<int>(labels_.size()));
    if (inserted)
        labels_.push_back(label);
    return it->second;
}

int LabelTable::find(const MetadataLabel& label) const
{
    auto it = ids_.find(label);
    return it == ids_.end() ? -1 : it->second;
}

IndexedGraph IndexedGraph::build(const Iccg& g, LabelTable& labels)
{
    IndexedGraph ix;
    std::map<std::string, int> index;
    for (const auto& [id, type] : g.vertices()) {
        index.emplace(id, static_cast<int>(ix.ids.size()));
        if (type == ComponentType::system)
            ix.system = static_cast<int>(ix.ids.size());
        ix.ids.push_back(id);
        ix.types.push_back(type);
    }
    const std::size_t n = ix.ids.size();
    ix.cf.assign(n, std::vector<char>(n, 0));
    for (const auto& [s, d] : g.cf_edges())
        ix.cf[index.at(s)][index.at(d)] = 1;
    for (const auto& e : g.meta_edges())
        ix.meta.emplace(index.at(e.src), index.at(e.dst), labels.intern(e.label));
    return ix;
}

int IndexedGraph::index_of(const std::string& id) const
{
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id)
        return -1;
    return static_cast<int>(it - ids.begin());
}

} // namespace sigsynth
