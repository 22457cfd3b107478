#include "sigsynth/sat.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "sigsynth/error.hpp"

namespace sigsynth::sat {

int Solver::new_var()
{
    const int v = num_vars();
    assigns_.push_back(Value::Undef);
    level_.push_back(0);
    reason_.push_back(kNoReason);
    seen_.push_back(0);
    watches_.emplace_back();
    watches_.emplace_back();
    pb_occurs_.emplace_back();
    pb_occurs_.emplace_back();
    next_branch_ = std::min(next_branch_, v);
    return v;
}

void Solver::enqueue(Lit p, int reason)
{
    const auto v = static_cast<std::size_t>(p.var());
    assigns_[v] = p.negated() ? Value::False : Value::True;
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(p);
    // Slack is maintained eagerly so that backtracking can undo it symmetrically.
    for (const auto& occ : pb_occurs_[static_cast<std::size_t>((~p).x)])
        pbs_[static_cast<std::size_t>(occ.pb)].slack -= occ.weight;
}

void Solver::cancel_until(int level)
{
    if (decision_level() <= level)
        return;
    const auto stop = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(level)]);
    for (std::size_t c = trail_.size(); c-- > stop;) {
        const Lit p = trail_[c];
        const auto v = static_cast<std::size_t>(p.var());
        for (const auto& occ : pb_occurs_[static_cast<std::size_t>((~p).x)])
            pbs_[static_cast<std::size_t>(occ.pb)].slack += occ.weight;
        assigns_[v] = Value::Undef;
        reason_[v] = kNoReason;
        next_branch_ = std::min(next_branch_, p.var());
    }
    trail_.resize(stop);
    trail_lim_.resize(static_cast<std::size_t>(level));
    qhead_ = trail_.size();
}

int Solver::store_clause(std::vector<Lit> lits)
{
    clauses_.push_back(Clause{std::move(lits)});
    return static_cast<int>(clauses_.size()) - 1;
}

void Solver::attach(int cref)
{
    const auto& c = clauses_[static_cast<std::size_t>(cref)].lits;
    watches_[static_cast<std::size_t>((~c[0]).x)].push_back({cref, c[1]});
    watches_[static_cast<std::size_t>((~c[1]).x)].push_back({cref, c[0]});
}

bool Solver::add_clause(std::vector<Lit> lits)
{
    if (!ok_)
        return false;
    cancel_until(0);
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    std::vector<Lit> kept;
    for (std::size_t i = 0; i < lits.size(); ++i) {
        if (i + 1 < lits.size() && lits[i + 1] == ~lits[i])
            return true;  // tautology
        const Value v = value(lits[i]);
        if (v == Value::True)
            return true;
        if (v == Value::Undef)
            kept.push_back(lits[i]);
    }
    if (kept.empty()) {
        ok_ = false;
        return false;
    }
    if (kept.size() == 1) {
        enqueue(kept[0], kNoReason);
        if (propagate() >= 0)
            ok_ = false;
        return ok_;
    }
    attach(store_clause(std::move(kept)));
    return true;
}

bool Solver::add_at_least(std::vector<WeightedLit> terms, std::int64_t bound)
{
    if (!ok_)
        return false;
    cancel_until(0);

    // Merge duplicate literals and complementary pairs: a*l + b*~l = min(a,b) + |a-b| * (heavier lit).
    std::map<int, std::pair<std::int64_t, std::int64_t>> by_var;  // var -> (pos, neg)
    for (const auto& t : terms) {
        if (t.weight <= 0)
            throw InvariantError("pseudo-Boolean weights must be positive");
        auto& slot = by_var[t.lit.var()];
        std::int64_t& w = t.lit.negated() ? slot.second : slot.first;
        if (w > std::numeric_limits<std::int64_t>::max() - t.weight)
            throw WeightOverflowError("pseudo-Boolean weight overflow");
        w += t.weight;
    }
    PbConstraint pb;
    std::int64_t total = 0;
    for (const auto& [var, ws] : by_var) {
        const std::int64_t common = std::min(ws.first, ws.second);
        bound -= common;
        if (ws.first > ws.second)
            pb.terms.push_back({make_lit(var), ws.first - ws.second});
        else if (ws.second > ws.first)
            pb.terms.push_back({make_lit(var, true), ws.second - ws.first});
    }
    if (bound <= 0)
        return true;
    for (const auto& t : pb.terms) {
        if (total > std::numeric_limits<std::int64_t>::max() - t.weight)
            throw WeightOverflowError("pseudo-Boolean weight sum overflow");
        total += t.weight;
    }
    if (total < bound) {
        ok_ = false;
        return false;
    }
    std::stable_sort(pb.terms.begin(), pb.terms.end(),
                     [](const WeightedLit& a, const WeightedLit& b) { return a.weight > b.weight; });
    pb.bound = bound;
    pb.slack = total - bound;
    for (const auto& t : pb.terms)
        if (value(t.lit) == Value::False)
            pb.slack -= t.weight;

    const int index = static_cast<int>(pbs_.size());
    for (const auto& t : pb.terms)
        pb_occurs_[static_cast<std::size_t>(t.lit.x)].push_back({index, t.weight});
    pbs_.push_back(std::move(pb));

    if (check_pb(index) >= 0 || propagate() >= 0)
        ok_ = false;
    return ok_;
}

int Solver::check_pb(int pb_index)
{
    const PbConstraint& pb = pbs_[static_cast<std::size_t>(pb_index)];
    auto false_lits = [&] {
        std::vector<Lit> out;
        for (const auto& t : pb.terms)
            if (value(t.lit) == Value::False)
                out.push_back(t.lit);
        return out;
    };
    if (pb.slack < 0)
        return store_clause(false_lits());
    for (std::size_t i = 0; i < pb.terms.size(); ++i) {
        const WeightedLit t = pbs_[static_cast<std::size_t>(pb_index)].terms[i];
        if (t.weight <= pbs_[static_cast<std::size_t>(pb_index)].slack)
            break;
        if (value(t.lit) != Value::Undef)
            continue;
        std::vector<Lit> reason{t.lit};
        for (Lit q : false_lits())
            reason.push_back(q);
        enqueue(t.lit, store_clause(std::move(reason)));
    }
    return kNoReason;
}

int Solver::propagate()
{
    while (qhead_ < trail_.size()) {
        const Lit p = trail_[qhead_++];
        ++stats_.propagations;

        const auto& occs = pb_occurs_[static_cast<std::size_t>((~p).x)];
        for (std::size_t k = 0; k < occs.size(); ++k) {
            const int confl = check_pb(occs[k].pb);
            if (confl >= 0) {
                qhead_ = trail_.size();
                return confl;
            }
        }

        auto& ws = watches_[static_cast<std::size_t>(p.x)];
        const Lit false_lit = ~p;
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < ws.size()) {
            const Watcher w = ws[i++];
            if (value(w.blocker) == Value::True) {
                ws[j++] = w;
                continue;
            }
            auto& c = clauses_[static_cast<std::size_t>(w.cref)].lits;
            if (c[0] == false_lit)
                std::swap(c[0], c[1]);
            const Lit first = c[0];
            if (first != w.blocker && value(first) == Value::True) {
                ws[j++] = Watcher{w.cref, first};
                continue;
            }
            bool moved = false;
            for (std::size_t k = 2; k < c.size(); ++k) {
                if (value(c[k]) != Value::False) {
                    std::swap(c[1], c[k]);
                    watches_[static_cast<std::size_t>((~c[1]).x)].push_back({w.cref, first});
                    moved = true;
                    break;
                }
            }
            if (moved)
                continue;
            ws[j++] = Watcher{w.cref, first};
            if (value(first) == Value::False) {
                while (i < ws.size())
                    ws[j++] = ws[i++];
                ws.resize(j);
                qhead_ = trail_.size();
                return w.cref;
            }
            enqueue(first, w.cref);
        }
        ws.resize(j);
    }
    return kNoReason;
}

void Solver::analyze(int confl, std::vector<Lit>& learnt, int& backtrack_level)
{
    int path_count = 0;
    Lit p{-1};
    learnt.clear();
    learnt.push_back(Lit{-1});
    std::size_t index = trail_.size();

    do {
        const auto& c = clauses_[static_cast<std::size_t>(confl)].lits;
        for (const Lit q : c) {
            if (p.x != -1 && q.var() == p.var())
                continue;
            const auto v = static_cast<std::size_t>(q.var());
            if (!seen_[v] && level_[v] > 0) {
                seen_[v] = 1;
                if (level_[v] >= decision_level())
                    ++path_count;
                else
                    learnt.push_back(q);
            }
        }
        do {
            --index;
        } while (!seen_[static_cast<std::size_t>(trail_[index].var())]);
        p = trail_[index];
        confl = reason_[static_cast<std::size_t>(p.var())];
        seen_[static_cast<std::size_t>(p.var())] = 0;
        --path_count;
    } while (path_count > 0);
    learnt[0] = ~p;

    backtrack_level = 0;
    if (learnt.size() > 1) {
        std::size_t max_i = 1;
        for (std::size_t k = 2; k < learnt.size(); ++k)
            if (level_[static_cast<std::size_t>(learnt[k].var())] >
                level_[static_cast<std::size_t>(learnt[max_i].var())])
                max_i = k;
        std::swap(learnt[1], learnt[max_i]);
        backtrack_level = level_[static_cast<std::size_t>(learnt[1].var())];
    }
    for (std::size_t k = 1; k < learnt.size(); ++k)
        seen_[static_cast<std::size_t>(learnt[k].var())] = 0;
}

std::optional<int> Solver::pick_branch_var()
{
    while (next_branch_ < num_vars() && assigns_[static_cast<std::size_t>(next_branch_)] != Value::Undef)
        ++next_branch_;
    if (next_branch_ >= num_vars())
        return std::nullopt;
    return next_branch_;
}

bool Solver::solve(std::span<const Lit> assumptions)
{
    ++stats_.solves;
    model_.clear();
    if (!ok_)
        return false;
    cancel_until(0);

    std::vector<Lit> learnt;
    for (;;) {
        const int confl = propagate();
        if (confl >= 0) {
            ++stats_.conflicts;
            if (decision_level() == 0) {
                ok_ = false;
                return false;
            }
            int backtrack_level = 0;
            analyze(confl, learnt, backtrack_level);
            cancel_until(backtrack_level);
            if (learnt.size() == 1) {
                enqueue(learnt[0], kNoReason);
            } else {
                const int cref = store_clause(learnt);
                attach(cref);
                enqueue(learnt[0], cref);
            }
            continue;
        }

        Lit next{-1};
        while (decision_level() < static_cast<int>(assumptions.size())) {
            const Lit a = assumptions[static_cast<std::size_t>(decision_level())];
            const Value v = value(a);
            if (v == Value::True) {
                trail_lim_.push_back(static_cast<int>(trail_.size()));
            } else if (v == Value::False) {
                cancel_until(0);
                return false;
            } else {
                next = a;
                break;
            }
        }
        if (next.x == -1) {
            const auto v = pick_branch_var();
            if (!v) {
                model_.resize(assigns_.size());
                for (std::size_t k = 0; k < assigns_.size(); ++k)
                    model_[k] = assigns_[k] == Value::True;
                cancel_until(0);
                return true;
            }
            next = make_lit(*v);
            ++stats_.decisions;
        }
        trail_lim_.push_back(static_cast<int>(trail_.size()));
        enqueue(next, kNoReason);
    }
}

std::optional<std::vector<bool>> sat_solve(int num_vars, std::span<const std::vector<int>> clauses,
                                           std::span<const int> assumptions)
{
    Solver s;
    for (int v = 0; v < num_vars; ++v)
        s.new_var();
    for (const auto& c : clauses) {
        std::vector<Lit> lits;
        for (int l : c) {
            if (l == 0 || std::abs(l) > num_vars)
                throw InvariantError("literal " + std::to_string(l) + " references an undeclared variable");
            lits.push_back(from_dimacs(l));
        }
        if (!s.add_clause(std::move(lits)))
            return std::nullopt;
    }
    std::vector<Lit> assume;
    for (int l : assumptions)
        assume.push_back(from_dimacs(l));
    if (!s.solve(assume))
        return std::nullopt;
    std::vector<bool> model(static_cast<std::size_t>(num_vars) + 1, false);
    for (int v = 0; v < num_vars; ++v)
        model[static_cast<std::size_t>(v) + 1] = s.model_value(v);
    return model;
}

} // namespace sigsynth::sat
