#include "sigsynth/maxsat.hpp"

#include <optional>

#include "sigsynth/error.hpp"
#include "sigsynth/seq_counter.hpp"

namespace sigsynth {

namespace {

std::int64_t satisfied_weight(const sat::Solver& s, const std::vector<sat::WeightedLit>& terms)
{
    std::int64_t sum = 0;
    for (const auto& t : terms)
        if (s.model_value(t.lit))
            sum += t.weight;
    return sum;
}

bool clause_true(const Clause& c, const std::vector<bool>& values)
{
    for (int lit : c) {
        const bool v = values.at(static_cast<std::size_t>(std::abs(lit)));
        if ((lit > 0) == v)
            return true;
    }
    return false;
}

class LexSearch {
public:
    LexSearch(const MaxSatOptions& options, MaxSatStats& stats) : options_(options), stats_(stats) {}

    void add_bound(sat::Solver& s, const std::vector<sat::WeightedLit>& terms, std::int64_t bound,
                   std::optional<sat::Lit> guard)
    {
        bool use_counter = options_.encoding == BoundEncoding::sequential_counter;
        if (options_.encoding == BoundEncoding::automatic) {
            std::int64_t total = 0;
            std::vector<sat::WeightedLit> negated;
            for (const auto& t : terms) {
                total += t.weight;
                negated.push_back({~t.lit, t.weight});
            }
            use_counter = sat::sequential_counter_size(negated, total - bound) <= options_.counter_budget;
        }
        if (use_counter) {
            ++stats_.counter_bounds;
            sat::encode_at_least(s, terms, bound, guard);
        } else {
            ++stats_.native_bounds;
            std::vector<sat::WeightedLit> pb = terms;
            if (guard)
                pb.push_back({~*guard, bound});
            s.add_at_least(std::move(pb), bound);
        }
    }

private:
    const MaxSatOptions& options_;
    MaxSatStats& stats_;
};

} // namespace

bool satisfies_hard(const WcnfProblem& p, const std::vector<bool>& values)
{
    for (const auto& c : p.hard)
        if (!clause_true(c, values))
            return false;
    return true;
}

std::vector<std::int64_t> tier_values(const WcnfProblem& p, const std::vector<bool>& values)
{
    std::vector<std::int64_t> out;
    for (const auto& tier : p.tiers) {
        std::int64_t sum = 0;
        for (const auto& s : tier)
            if (clause_true(s.clause, values))
                sum += s.weight;
        out.push_back(sum);
    }
    return out;
}

Assignment maximize_lex(const WcnfProblem& p, const MaxSatOptions& options, MaxSatStats* stats_out)
{
    validate(p);
    MaxSatStats stats;
    LexSearch search(options, stats);

    sat::Solver s;
    for (int v = 0; v < p.num_vars; ++v)
        s.new_var();
    for (const auto& c : p.hard) {
        std::vector<sat::Lit> lits;
        for (int lit : c)
            lits.push_back(sat::from_dimacs(lit));
        if (!s.add_clause(std::move(lits)))
            throw HardUnsatError("hard clauses are unsatisfiable");
    }

    // One literal per soft clause; non-unit soft clauses get a selector b with (~b v C).
    std::vector<std::vector<sat::WeightedLit>> objectives(p.tiers.size());
    for (std::size_t t = 0; t < p.tiers.size(); ++t) {
        for (const auto& soft : p.tiers[t]) {
            if (soft.clause.empty())
                continue;
            if (soft.clause.size() == 1) {
                objectives[t].push_back({sat::from_dimacs(soft.clause[0]), soft.weight});
                continue;
            }
            const sat::Lit b = sat::make_lit(s.new_var());
            std::vector<sat::Lit> lits{~b};
            for (int lit : soft.clause)
                lits.push_back(sat::from_dimacs(lit));
            s.add_clause(std::move(lits));
            objectives[t].push_back({b, soft.weight});
        }
    }

    ++stats.sat_calls;
    if (!s.solve())
        throw HardUnsatError("hard clauses are unsatisfiable");
    std::vector<bool> best_model = s.model();

    for (std::size_t t = 0; t < objectives.size(); ++t) {
        const auto& terms = objectives[t];
        std::int64_t total = 0;
        for (const auto& term : terms)
            total += term.weight;
        std::int64_t best = 0;
        for (const auto& term : terms)
            if (best_model[static_cast<std::size_t>(term.lit.var())] != term.lit.negated())
                best += term.weight;

        while (best < total) {
            const sat::Lit guard = sat::make_lit(s.new_var());
            search.add_bound(s, terms, best + 1, guard);
            ++stats.sat_calls;
            const sat::Lit assumption[] = {guard};
            if (!s.solve(assumption)) {
                s.add_clause({~guard});
                break;
            }
            best_model = s.model();
            const std::int64_t improved = satisfied_weight(s, terms);
            if (improved <= best)
                throw InternalError("bound constraint violated by solver model");
            best = improved;
        }
        if (best > 0)
            search.add_bound(s, terms, best, std::nullopt);
    }

    Assignment a;
    a.values.assign(static_cast<std::size_t>(p.num_vars) + 1, false);
    for (int v = 0; v < p.num_vars; ++v)
        a.values[static_cast<std::size_t>(v) + 1] = best_model[static_cast<std::size_t>(v)];
    if (!satisfies_hard(p, a.values))
        throw InternalError("solver model violates a hard clause");
    a.objective = tier_values(p, a.values);
    stats.solver = s.stats();
    if (stats_out)
        *stats_out = stats;
    return a;
}

} // namespace sigsynth
