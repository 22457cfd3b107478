#pragma once

// Signature inference: pool -> encode -> solve -> decode.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sigsynth/encoder.hpp"
#include "sigsynth/iccg.hpp"
#include "sigsynth/maxsat.hpp"
#include "sigsynth/weights.hpp"

namespace sigsynth {

struct SynthOptions {
    ObjectiveMode mode = ObjectiveMode::lexicographic;
    bool require_metadata_support = true;
    MaxSatOptions maxsat;
};

struct Synthesis {
    Signature signature;
    /// Solver objective per tier (quantized weights in lexicographic mode).
    std::vector<std::int64_t> objective;
    std::vector<std::string> warnings;
    WcnfProblem problem;
    MaxSatStats stats;
};

/// Maps a model back to a graph. Pool vertices get ids "<type><k>" numbered per type
/// in pool order; an anchored SYSTEM slot keeps the id SYSTEM.
Iccg decode(const Assignment& a, const VarMap& vm, const VertexPool& pool);

/// Throws HardUnsatError if the encoding is broken and InternalError if the result
/// does not embed into every sample.
Synthesis infer_signature(std::span<const Iccg> samples, const WeightTable& weights, const std::string& family,
                          const SynthOptions& options = {});

struct Suspiciousness {
    Rational total;                             // |X| + sum of w_y
    std::array<Rational, kTierCount> tiers{};   // filters, APIs/actions, flows, |X|
};

Suspiciousness signature_suspiciousness(const Iccg& g, const WeightTable& weights);

/// Quantized per-tier objective of a graph, the exact quantity the lexicographic
/// encoding optimizes.
std::vector<std::int64_t> objective_vector(const Iccg& g, const WeightTable& weights);

/// f(G) = |V| + |X| + sum of w_y.
Rational weighted_size(const Iccg& g, const WeightTable& weights);

/// No cf or metadata edges and no vertex other than SYSTEM.
bool is_empty_signature(const Iccg& g);

} // namespace sigsynth
