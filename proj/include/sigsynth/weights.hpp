#pragma once

// Suspiciousness weights learned from a benign corpus:
//   w_y = (B + 1) / (b_y + 1)
// where B is the corpus size and b_y the number of benign apps whose metadata contains y.

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>

#include "sigsynth/iccg.hpp"
#include "sigsynth/rational.hpp"

namespace sigsynth {

class WeightTable {
public:
    WeightTable() = default;
    WeightTable(std::int64_t benign_count, std::map<MetadataLabel, std::int64_t> app_counts);

    std::int64_t benign_count() const { return benign_count_; }

    /// Exact weight; labels never seen in the corpus get (B + 1) / 1.
    Rational weight(const MetadataLabel& label) const;
    /// Number of benign apps containing the label (0 when absent).
    std::int64_t app_count(const MetadataLabel& label) const;

    const std::map<MetadataLabel, std::int64_t>& app_counts() const { return counts_; }

    friend bool operator==(const WeightTable&, const WeightTable&) = default;

private:
    std::int64_t benign_count_ = 0;
    std::map<MetadataLabel, std::int64_t> counts_;
};

WeightTable compute_weights(std::span<const Iccg> benign);

std::set<MetadataLabel> label_universe(std::span<const Iccg> graphs);

/// Weight-JSON: {"benign_count": B, "entries": [{"label": ..., "num": n, "den": d}]}.
nlohmann::ordered_json weights_to_json(const WeightTable& table);
WeightTable weights_from_json(const nlohmann::json& j);
std::string dump_weights(const WeightTable& table);
WeightTable load_weights(const std::filesystem::path& path);
void save_weights(const WeightTable& table, const std::filesystem::path& path);

} // namespace sigsynth
