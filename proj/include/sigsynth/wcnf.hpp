#pragma once

// Weighted partial MaxSAT problems with lexicographically ordered soft tiers, and the
// classic DIMACS WCNF interchange format ("p wcnf nvars nclauses top").

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sigsynth {

/// DIMACS-style clause: non-zero signed 1-based variable ids.
using Clause = std::vector<int>;

struct SoftClause {
    Clause clause;
    std::int64_t weight = 0;

    friend bool operator==(const SoftClause&, const SoftClause&) = default;
};

/// Hard clauses plus soft tiers; tiers[0] has the highest priority. Satisfied soft
/// weight is maximized tier by tier.
struct WcnfProblem {
    int num_vars = 0;
    std::vector<Clause> hard;
    std::vector<std::vector<SoftClause>> tiers;

    std::size_t soft_count() const;
    std::int64_t tier_total(std::size_t tier) const;

    friend bool operator==(const WcnfProblem&, const WcnfProblem&) = default;
};

/// Throws InvariantError if a literal is zero or references an undeclared variable,
/// or a soft weight is not positive.
void validate(const WcnfProblem& p);

/// Multipliers m_t such that a single unit of tier t outweighs all of tiers > t combined:
/// m_last = 1, m_t = 1 + sum_{u > t} total(u) * m_u. Throws WeightOverflowError.
std::vector<std::int64_t> tier_multipliers(const WcnfProblem& p);

/// Single-tier equivalent of a tiered problem (weights multiplied by tier_multipliers).
WcnfProblem flatten(const WcnfProblem& p);

/// Hard weight used in the WCNF header: 1 + total flattened soft weight.
std::int64_t top_weight(const WcnfProblem& p);

/// Classic weighted-partial WCNF text. Hard clauses first, then soft clauses tier by tier.
std::string to_wcnf(const WcnfProblem& p);
void export_wcnf(const WcnfProblem& p, const std::filesystem::path& path);

/// Parses classic WCNF text into a single-tier problem. Clauses with weight >= top are hard.
WcnfProblem parse_wcnf(std::string_view text);
WcnfProblem load_wcnf(const std::filesystem::path& path);

} // namespace sigsynth
