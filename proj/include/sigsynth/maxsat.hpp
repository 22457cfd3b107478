#pragma once

// Lexicographic weighted-partial MaxSAT by per-tier linear SAT-UNSAT search.
//
// For each tier (highest priority first) the solver repeatedly asks for a model whose
// satisfied weight in that tier exceeds the best found so far, until the bound is
// UNSAT. The achieved optimum is then frozen as a hard lower bound before moving to
// the next tier. Bounds are encoded with a weighted sequential counter when the
// encoding is small enough, otherwise with a native pseudo-Boolean constraint.

#include <cstdint>
#include <vector>

#include "sigsynth/sat.hpp"
#include "sigsynth/wcnf.hpp"

namespace sigsynth {

struct Assignment {
    /// values[v] for 1-based variable id v; values[0] is unused.
    std::vector<bool> values;
    /// Satisfied soft weight per tier.
    std::vector<std::int64_t> objective;

    bool value(int var) const { return values.at(static_cast<std::size_t>(var)); }

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

enum class BoundEncoding {
    automatic,          // sequential counter when within budget, else native PB
    sequential_counter,
    native,
};

struct MaxSatOptions {
    BoundEncoding encoding = BoundEncoding::automatic;
    /// Largest number of counter auxiliaries accepted by `automatic`.
    std::int64_t counter_budget = 20000;
};

struct MaxSatStats {
    int sat_calls = 0;
    int counter_bounds = 0;
    int native_bounds = 0;
    sat::SolverStats solver;
};

/// Tier-by-tier optimum. Throws HardUnsatError when the hard clauses are unsatisfiable.
Assignment maximize_lex(const WcnfProblem& p, const MaxSatOptions& options = {}, MaxSatStats* stats = nullptr);

/// Independent clause evaluator.
bool satisfies_hard(const WcnfProblem& p, const std::vector<bool>& values);
std::vector<std::int64_t> tier_values(const WcnfProblem& p, const std::vector<bool>& values);

} // namespace sigsynth
