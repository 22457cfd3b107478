#pragma once

// Seeded ICCG-level obfuscations: renaming, dummy components on call edges,
// metadata removal and noise edges.
//
// Random stream contract: a std::mt19937_64 seeded with the recipe seed; every draw
// of a value in [0, n) takes 64-bit outputs and rejects those at or above
// n * floor(2^64 / n), returning the accepted value mod n. Operations consume draws
// in recipe order and iterate graph elements in canonical (sorted) order, so output
// depends only on the input graph, the recipe and the seed.

#include <cstdint>
#include <filesystem>
#include <random>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "sigsynth/iccg.hpp"

namespace sigsynth {

struct RenameComponents {};
struct InsertDummyOnEdge {
    int count = 1;
};
struct RemoveMetadata {
    double fraction = 0.0;
    int tier = kTaintTier;
};
struct AddNoiseEdges {
    int count = 1;
};

using ObfuscationOp = std::variant<RenameComponents, InsertDummyOnEdge, RemoveMetadata, AddNoiseEdges>;

struct Recipe {
    std::uint64_t seed = 0;
    std::vector<ObfuscationOp> ops;
};

class Prng {
public:
    explicit Prng(std::uint64_t seed) : engine_(seed) {}
    /// Uniform in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

/// Throws InvariantError on a negative count or a fraction outside [0, 1].
Iccg obfuscate(const Iccg& g, const std::vector<ObfuscationOp>& ops, std::uint64_t seed);

/// {"seed": n, "ops": [{"op": "rename"} | {"op": "insert_dummy", "count": k}
///   | {"op": "remove_metadata", "fraction": x, "tier": "filter|api|taint"}
///   | {"op": "noise_edges", "count": k}]}
Recipe recipe_from_json(const nlohmann::json& j);
Recipe load_recipe(const std::filesystem::path& path);

} // namespace sigsynth
