#pragma once

// Brute-force maximally suspicious common subgraph, for validating the MaxSAT pipeline
// on small instances.

#include <cstdint>
#include <span>
#include <vector>

#include "sigsynth/encoder.hpp"
#include "sigsynth/iccg.hpp"
#include "sigsynth/weights.hpp"

namespace sigsynth {

inline constexpr int kOracleMaxVertices = 6;

struct OracleOptions {
    ObjectiveMode mode = ObjectiveMode::lexicographic;
    bool require_metadata_support = true;
};

struct OracleResult {
    Signature signature;  // vertex ids taken from the first sample
    /// Quantized tier vector of the optimum (same quantity as the solver objective).
    std::vector<std::int64_t> objective;
    /// f(S) of the optimum; the maximized quantity in weighted_size mode.
    Rational weighted_size;
};

/// Enumerates vertex subsets of the first sample and every injective type-preserving
/// map into the other samples. Throws TooLargeError when a sample has more than
/// kOracleMaxVertices non-SYSTEM vertices.
OracleResult oracle_mscs(std::span<const Iccg> samples, const WeightTable& weights, const OracleOptions& options = {});

} // namespace sigsynth
