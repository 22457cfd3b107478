#include "sigsynth/seq_counter.hpp"

#include <numeric>
#include <vector>

namespace sigsynth::sat {

namespace {

struct Normalized {
    std::vector<WeightedLit> counted;  // weights divided by gcd, each <= bound
    std::vector<Lit> forced_false;     // inputs heavier than the bound on their own
    std::int64_t bound = 0;
    std::int64_t total = 0;
};

Normalized normalize(std::span<const WeightedLit> terms, std::int64_t bound)
{
    Normalized out;
    std::int64_t g = 0;
    for (const auto& t : terms)
        g = std::gcd(g, t.weight);
    if (g == 0)
        g = 1;
    out.bound = bound < 0 ? -1 : bound / g;
    for (const auto& t : terms) {
        const std::int64_t w = t.weight / g;
        if (out.bound >= 0 && w > out.bound) {
            out.forced_false.push_back(t.lit);
        } else {
            out.counted.push_back({t.lit, w});
            out.total += w;
        }
    }
    return out;
}

std::vector<Lit> guarded(std::optional<Lit> guard, std::vector<Lit> lits)
{
    if (guard)
        lits.push_back(~*guard);
    return lits;
}

} // namespace

std::int64_t sequential_counter_size(std::span<const WeightedLit> terms, std::int64_t bound)
{
    const Normalized n = normalize(terms, bound);
    if (n.bound < 0 || n.total <= n.bound || n.counted.size() <= 1)
        return 0;
    return static_cast<std::int64_t>(n.counted.size() - 1) * n.bound;
}

void encode_at_most(Solver& solver, std::span<const WeightedLit> terms, std::int64_t bound,
                    std::optional<Lit> guard)
{
    const Normalized norm = normalize(terms, bound);
    if (norm.bound < 0) {
        solver.add_clause(guarded(guard, {}));
        return;
    }
    for (Lit x : norm.forced_false)
        solver.add_clause(guarded(guard, {~x}));
    if (norm.total <= norm.bound || norm.counted.size() <= 1)
        return;

    const auto& xs = norm.counted;
    const std::size_t n = xs.size();
    const std::int64_t k = norm.bound;

    // s[i][j-1] for i in [0, n-2], j in [1, k]
    std::vector<std::vector<Lit>> s(n - 1, std::vector<Lit>(static_cast<std::size_t>(k)));
    for (auto& row : s)
        for (auto& lit : row)
            lit = make_lit(solver.new_var());
    auto S = [&](std::size_t i, std::int64_t j) { return s[i][static_cast<std::size_t>(j - 1)]; };

    for (std::int64_t j = 1; j <= xs[0].weight; ++j)
        solver.add_clause({~xs[0].lit, S(0, j)});

    for (std::size_t i = 1; i + 1 < n; ++i) {
        const Lit x = xs[i].lit;
        const std::int64_t w = xs[i].weight;
        for (std::int64_t j = 1; j <= w; ++j)
            solver.add_clause({~x, S(i, j)});
        for (std::int64_t j = 1; j <= k; ++j)
            solver.add_clause({~S(i - 1, j), S(i, j)});
        for (std::int64_t j = 1; j + w <= k; ++j)
            solver.add_clause({~x, ~S(i - 1, j), S(i, j + w)});
        solver.add_clause(guarded(guard, {~x, ~S(i - 1, k + 1 - w)}));
    }
    const WeightedLit& last = xs[n - 1];
    solver.add_clause(guarded(guard, {~last.lit, ~S(n - 2, k + 1 - last.weight)}));
}

void encode_at_least(Solver& solver, std::span<const WeightedLit> terms, std::int64_t bound,
                     std::optional<Lit> guard)
{
    std::int64_t total = 0;
    std::vector<WeightedLit> negated;
    negated.reserve(terms.size());
    for (const auto& t : terms) {
        total += t.weight;
        negated.push_back({~t.lit, t.weight});
    }
    encode_at_most(solver, negated, total - bound, guard);
}

} // namespace sigsynth::sat
