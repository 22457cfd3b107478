#pragma once

// Weighted sequential-counter CNF encoding of  sum(w_i * x_i) <= bound.
//
// Auxiliary variable s(i, j) states "the first i inputs contribute at least j".
// The encoding is pseudo-polynomial: it introduces (n - 1) * bound auxiliaries after
// weights are divided by their gcd, so callers should check `sequential_counter_size`
// against a budget before using it.

#include <cstdint>
#include <optional>
#include <span>

#include "sigsynth/sat.hpp"

namespace sigsynth::sat {

/// Number of auxiliary variables the encoding would introduce (after gcd normalization).
std::int64_t sequential_counter_size(std::span<const WeightedLit> terms, std::int64_t bound);

/// Adds clauses enforcing sum(w_i * x_i) <= bound. When `guard` is given, the constraint
/// only binds while `guard` is true; every other clause is definitional and always
/// satisfiable, so asserting ~guard disables the constraint.
void encode_at_most(Solver& solver, std::span<const WeightedLit> terms, std::int64_t bound,
                    std::optional<Lit> guard = std::nullopt);

/// sum(w_i * x_i) >= bound, rewritten as sum(w_i * ~x_i) <= sum(w) - bound.
void encode_at_least(Solver& solver, std::span<const WeightedLit> terms, std::int64_t bound,
                     std::optional<Lit> guard = std::nullopt);

} // namespace sigsynth::sat
