#pragma once

// Small deterministic CDCL SAT solver.
//
// Two-watched-literal unit propagation, first-UIP clause learning with
// non-chronological backjumping, and native linear pseudo-Boolean constraints
// (sum w_i * l_i >= bound) whose propagations are explained by clauses.
// Branching is fixed: lowest unassigned variable first, positive phase first.
// There are no restarts and no randomness, so identical inputs give identical models.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace sigsynth::sat {

/// Literal over a 0-based variable index; x = 2 * var + (negated ? 1 : 0).
struct Lit {
    int x = -1;

    constexpr int var() const { return x >> 1; }
    constexpr bool negated() const { return (x & 1) != 0; }
    constexpr Lit operator~() const { return Lit{x ^ 1}; }
    friend constexpr bool operator==(Lit, Lit) = default;
    friend constexpr auto operator<=>(Lit, Lit) = default;
};

constexpr Lit make_lit(int var, bool negated = false) { return Lit{2 * var + (negated ? 1 : 0)}; }

/// Converts a DIMACS literal (+/- 1-based id) to an internal literal.
constexpr Lit from_dimacs(int lit) { return lit > 0 ? make_lit(lit - 1) : make_lit(-lit - 1, true); }
constexpr int to_dimacs(Lit p) { return p.negated() ? -(p.var() + 1) : p.var() + 1; }

struct WeightedLit {
    Lit lit;
    std::int64_t weight = 0;
};

struct SolverStats {
    std::uint64_t decisions = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t propagations = 0;
    std::uint64_t solves = 0;
};

class Solver {
public:
    int new_var();
    int num_vars() const { return static_cast<int>(assigns_.size()); }

    /// Adds a permanent clause. Returns false once the formula is known unsatisfiable.
    bool add_clause(std::vector<Lit> lits);

    /// Adds sum(weight_i * lit_i) >= bound with positive weights.
    bool add_at_least(std::vector<WeightedLit> terms, std::int64_t bound);

    /// Decides satisfiability under the given assumptions. On SAT the model is kept
    /// until the next call. The solver always returns to decision level 0.
    bool solve(std::span<const Lit> assumptions = {});

    bool okay() const { return ok_; }
    bool model_value(int var) const { return model_[static_cast<std::size_t>(var)]; }
    bool model_value(Lit p) const { return model_value(p.var()) != p.negated(); }
    const std::vector<bool>& model() const { return model_; }
    const SolverStats& stats() const { return stats_; }

private:
    enum class Value : std::int8_t { False = 0, True = 1, Undef = 2 };
    static constexpr int kNoReason = -1;

    struct Clause {
        std::vector<Lit> lits;
    };
    struct Watcher {
        int cref;
        Lit blocker;
    };
    struct PbConstraint {
        std::vector<WeightedLit> terms;  // sorted by weight, descending
        std::int64_t bound = 0;
        std::int64_t slack = 0;          // sum of weights of non-false lits minus bound
    };
    struct PbOccurrence {
        int pb;
        std::int64_t weight;
    };

    Value value(Lit p) const
    {
        const Value v = assigns_[static_cast<std::size_t>(p.var())];
        if (v == Value::Undef)
            return v;
        return (v == Value::True) != p.negated() ? Value::True : Value::False;
    }
    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    void enqueue(Lit p, int reason);
    int propagate();
    int check_pb(int pb_index);
    int store_clause(std::vector<Lit> lits);
    void attach(int cref);
    void analyze(int confl, std::vector<Lit>& learnt, int& backtrack_level);
    void cancel_until(int level);
    std::optional<int> pick_branch_var();

    bool ok_ = true;
    std::vector<Value> assigns_;
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<char> seen_;
    std::vector<Lit> trail_;
    std::vector<int> trail_lim_;
    std::size_t qhead_ = 0;
    int next_branch_ = 0;

    std::vector<Clause> clauses_;
    std::vector<std::vector<Watcher>> watches_;  // indexed by Lit::x; clauses watching ~lit
    std::vector<PbConstraint> pbs_;
    std::vector<std::vector<PbOccurrence>> pb_occurs_;  // indexed by Lit::x

    std::vector<bool> model_;
    SolverStats stats_;
};

/// One-shot satisfiability check over DIMACS clauses. Returns a model indexed by
/// 1-based variable id (index 0 unused) or nullopt on UNSAT.
std::optional<std::vector<bool>> sat_solve(int num_vars, std::span<const std::vector<int>> clauses,
                                           std::span<const int> assumptions = {});

} // namespace sigsynth::sat
