#include "sigsynth/weights.hpp"

#include "sigsynth/error.hpp"

namespace sigsynth {

using nlohmann::json;
using nlohmann::ordered_json;

WeightTable::WeightTable(std::int64_t benign_count, std::map<MetadataLabel, std::int64_t> app_counts)
    : benign_count_(benign_count), counts_(std::move(app_counts))
{
    if (benign_count_ < 0)
        throw InvariantError("negative benign corpus size");
    for (const auto& [label, count] : counts_)
        if (count < 0 || count > benign_count_)
            throw InvariantError("app count for " + to_string(label) + " outside [0, B]");
}

std::int64_t WeightTable::app_count(const MetadataLabel& label) const
{
    auto it = counts_.find(label);
    return it == counts_.end() ? 0 : it->second;
}

Rational WeightTable::weight(const MetadataLabel& label) const
{
    return make_rational(benign_count_ + 1, app_count(label) + 1);
}

WeightTable compute_weights(std::span<const Iccg> benign)
{
    std::map<MetadataLabel, std::int64_t> counts;
    for (const auto& app : benign) {
        std::set<MetadataLabel> present;
        for (const auto& e : app.meta_edges())
            present.insert(e.label);
        for (const auto& label : present)
            ++counts[label];
    }
    return WeightTable(static_cast<std::int64_t>(benign.size()), std::move(counts));
}

std::set<MetadataLabel> label_universe(std::span<const Iccg> graphs)
{
    std::set<MetadataLabel> out;
    for (const auto& g : graphs)
        for (const auto& e : g.meta_edges())
            out.insert(e.label);
    return out;
}

ordered_json weights_to_json(const WeightTable& table)
{
    ordered_json j;
    j["benign_count"] = table.benign_count();
    ordered_json entries = ordered_json::array();
    for (const auto& [label, count] : table.app_counts()) {
        const Rational w = table.weight(label);
        ordered_json e;
        e["label"] = label_to_json(label);
        const ordered_json r = rational_to_json(w);
        e["num"] = r["num"];
        e["den"] = r["den"];
        entries.push_back(std::move(e));
    }
    j["entries"] = std::move(entries);
    return j;
}

WeightTable weights_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("benign_count") || !j["benign_count"].is_number_integer())
        throw ParseError("weights: missing integer 'benign_count'");
    const std::int64_t benign = j["benign_count"].get<std::int64_t>();
    if (!j.contains("entries") || !j["entries"].is_array())
        throw ParseError("weights: missing array 'entries'");
    std::map<MetadataLabel, std::int64_t> counts;
    const json& entries = j["entries"];
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string ctx = "entries[" + std::to_string(i) + "]";
        if (!entries[i].is_object() || !entries[i].contains("label"))
            throw ParseError(ctx + ": missing 'label'");
        MetadataLabel label = label_from_json(entries[i]["label"], ctx + ".label");
        const Rational w = rational_from_json(entries[i]);
        // w = (B+1)/(b+1)  =>  b = (B+1)/w - 1, which must be an integer in [0, B].
        const Rational b = Rational(benign + 1) / w - 1;
        if (denominator(b) != 1 || b < 0 || b > benign)
            throw ParseError(ctx + ": weight is not of the form (B+1)/(b+1)");
        counts.emplace(std::move(label), numerator(b).convert_to<std::int64_t>());
    }
    return WeightTable(benign, std::move(counts));
}

std::string dump_weights(const WeightTable& table) { return weights_to_json(table).dump(2) + "\n"; }

WeightTable load_weights(const std::filesystem::path& path)
{
    const std::string text = read_text_file(path);
    try {
        return weights_from_json(json::parse(text));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void save_weights(const WeightTable& table, const std::filesystem::path& path)
{
    write_text_file(path, dump_weights(table));
}

} // namespace sigsynth
