#include "sigsynth/matcher.hpp"

#include <algorithm>
#include <numeric>

#include "sigsynth/error.hpp"
#include "sigsynth/graph_index.hpp"
#include "sigsynth/parallel.hpp"
#include "sigsynth/synth.hpp"

namespace sigsynth {

namespace {

class EmbeddingSearch {
public:
    EmbeddingSearch(const Iccg& sig, const Iccg& app)
    {
        s_ = IndexedGraph::build(sig, labels_);
        a_ = IndexedGraph::build(app, labels_);
    }

    std::optional<Embedding> run()
    {
        const int n = s_.size();
        if (n > a_.size())
            return std::nullopt;
        map_.assign(static_cast<std::size_t>(n), -1);
        used_.assign(static_cast<std::size_t>(a_.size()), 0);

        std::vector<std::vector<int>> domains(static_cast<std::size_t>(n));
        for (int u = 0; u < n; ++u) {
            for (int w = 0; w < a_.size(); ++w)
                if (locally_compatible(u, w))
                    domains[u].push_back(w);
            if (domains[u].empty())
                return std::nullopt;
        }
        order_ = placement_order(domains);
        if (!extend(0, domains))
            return std::nullopt;
        Embedding f;
        for (int u = 0; u < n; ++u)
            f[s_.ids[u]] = a_.ids[map_[u]];
        return f;
    }

private:
    bool locally_compatible(int u, int w) const
    {
        if (s_.types[u] != a_.types[w])
            return false;
        if (s_.has_cf(u, u) && !a_.has_cf(w, w))
            return false;
        for (const auto& [x, y, d] : s_.meta)
            if (x == u && y == u && !a_.has_meta(w, w, d))
                return false;
        return true;
    }

    // Most constrained first: smallest domain, then most incident edges, then index.
    std::vector<int> placement_order(const std::vector<std::vector<int>>& domains) const
    {
        std::vector<int> degree(static_cast<std::size_t>(s_.size()), 0);
        for (int u = 0; u < s_.size(); ++u)
            for (int v = 0; v < s_.size(); ++v)
                if (s_.has_cf(u, v)) {
                    ++degree[u];
                    ++degree[v];
                }
        for (const auto& [x, y, d] : s_.meta) {
            ++degree[x];
            ++degree[y];
        }
        std::vector<int> order(static_cast<std::size_t>(s_.size()));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            if (domains[a].size() != domains[b].size())
                return domains[a].size() < domains[b].size();
            return degree[a] > degree[b];
        });
        return order;
    }

    // Pairwise consistency of u -> w with an already placed p -> map_[p].
    bool consistent(int u, int w, int p) const
    {
        const int q = map_[p];
        if (s_.has_cf(u, p) && !a_.has_cf(w, q))
            return false;
        if (s_.has_cf(p, u) && !a_.has_cf(q, w))
            return false;
        for (auto it = s_.meta.lower_bound({u, p, -1}); it != s_.meta.end() && std::get<0>(*it) == u &&
                                                        std::get<1>(*it) == p;
             ++it)
            if (!a_.has_meta(w, q, std::get<2>(*it)))
                return false;
        for (auto it = s_.meta.lower_bound({p, u, -1}); it != s_.meta.end() && std::get<0>(*it) == p &&
                                                        std::get<1>(*it) == u;
             ++it)
            if (!a_.has_meta(q, w, std::get<2>(*it)))
                return false;
        return true;
    }

    bool extend(std::size_t depth, const std::vector<std::vector<int>>& domains)
    {
        if (depth == order_.size())
            return true;
        const int u = order_[depth];
        for (int w : domains[u]) {
            if (used_[w])
                continue;
            map_[u] = w;
            used_[w] = 1;
            // Forward check: every unplaced vertex keeps a candidate consistent with u -> w.
            std::vector<std::vector<int>> next = domains;
            bool alive = true;
            for (std::size_t k = depth + 1; k < order_.size() && alive; ++k) {
                const int v = order_[k];
                auto& dom = next[v];
                std::erase_if(dom, [&](int x) { return x == w || !consistent(v, x, u); });
                alive = !dom.empty();
            }
            if (alive && extend(depth + 1, next))
                return true;
            used_[w] = 0;
            map_[u] = -1;
        }
        return false;
    }

    LabelTable labels_;
    IndexedGraph s_;
    IndexedGraph a_;
    std::vector<int> order_;
    std::vector<int> map_;
    std::vector<char> used_;
};

bool better(const MatchVerdict& a, const MatchVerdict& b)
{
    if (a.delta != b.delta)
        return a.delta > b.delta;
    const bool ea = a.kind == VerdictKind::exact;
    const bool eb = b.kind == VerdictKind::exact;
    if (ea != eb)
        return ea;
    return a.family < b.family;
}

} // namespace

std::optional<Embedding> exact_match(const Iccg& sig, const Iccg& app) { return EmbeddingSearch(sig, app).run(); }

bool is_embedding(const Iccg& sig, const Iccg& app, const Embedding& f)
{
    std::set<std::string> image;
    for (const auto& [id, type] : sig.vertices()) {
        const auto it = f.find(id);
        if (it == f.end() || app.type_of(it->second) != type || !image.insert(it->second).second)
            return false;
    }
    if (f.size() != sig.vertex_count())
        return false;
    for (const auto& [u, v] : sig.cf_edges())
        if (!app.has_cf_edge(f.at(u), f.at(v)))
            return false;
    for (const auto& e : sig.meta_edges())
        if (!app.has_meta_edge({f.at(e.src), f.at(e.dst), e.label}))
            return false;
    return true;
}

std::string_view to_string(VerdictKind k)
{
    switch (k) {
    case VerdictKind::exact: return "Exact";
    case VerdictKind::obfuscated: return "Obfuscated";
    case VerdictKind::zero_day_candidate: return "ZeroDayCandidate";
    case VerdictKind::no_match: return "NoMatch";
    }
    return "NoMatch";
}

VerdictKind classify(const Rational& delta, bool exact, const Cutoffs& cutoffs)
{
    if (exact)
        return VerdictKind::exact;
    if (delta > cutoffs.obfuscated)
        return VerdictKind::obfuscated;
    if (delta > cutoffs.zero_day)
        return VerdictKind::zero_day_candidate;
    return VerdictKind::no_match;
}

MatchVerdict approx_match(const Iccg& app, const Signature& sig, const WeightTable& weights, const Cutoffs& cutoffs)
{
    const Rational full = weighted_size(sig.graph, weights);
    if (full == 0)
        throw ZeroSignatureError("signature of family '" + sig.family + "' has zero weighted size");
    MatchVerdict v;
    v.family = sig.family;
    if (exact_match(sig.graph, app)) {
        v.kind = VerdictKind::exact;
        v.delta = 1;
        v.partial = sig.graph;
        return v;
    }
    const Iccg pair[] = {transitive_closure(app), sig.graph};
    SynthOptions options;
    options.mode = ObjectiveMode::weighted_size;
    options.require_metadata_support = false;
    Synthesis s = infer_signature(pair, weights, sig.family, options);
    v.delta = weighted_size(s.signature.graph, weights) / full;
    v.kind = classify(v.delta, false, cutoffs);
    v.partial = std::move(s.signature.graph);
    return v;
}

ScanResult scan(const Iccg& app, std::span<const Signature> db, const WeightTable& weights, const Cutoffs& cutoffs,
                int jobs)
{
    if (db.empty())
        throw InvariantError("signature database is empty");
    for (const auto& sig : db)
        if (weighted_size(sig.graph, weights) == 0)
            throw ZeroSignatureError("signature of family '" + sig.family + "' has zero weighted size");

    std::vector<char> exact(db.size(), 0);
    parallel_for(db.size(), jobs, [&](std::size_t i) { exact[i] = exact_match(db[i].graph, app).has_value(); });

    ScanResult r;
    if (std::find(exact.begin(), exact.end(), 1) != exact.end()) {
        for (std::size_t i = 0; i < db.size(); ++i)
            if (exact[i])
                r.per_family.push_back({db[i].family, VerdictKind::exact, Rational(1), db[i].graph});
    } else {
        r.per_family.resize(db.size());
        parallel_for(db.size(), jobs,
                     [&](std::size_t i) { r.per_family[i] = approx_match(app, db[i], weights, cutoffs); });
    }
    r.best = *std::min_element(r.per_family.begin(), r.per_family.end(), better);
    return r;
}

TuneResult tune_cutoff(std::span<const Family> families, const WeightTable& weights, std::span<const Iccg> benign,
                       std::span<const Rational> candidates, double target_tpr, int jobs)
{
    if (families.size() < 2)
        throw InsufficientFamiliesError("cutoff tuning needs at least two families, got " +
                                        std::to_string(families.size()));
    TuneResult out;

    std::vector<std::optional<Signature>> sigs(families.size());
    parallel_for(families.size(), jobs, [&](std::size_t i) {
        Synthesis s = infer_signature(families[i].samples, weights, families[i].name);
        if (!is_empty_signature(s.signature.graph))
            sigs[i] = std::move(s.signature);
    });
    for (std::size_t i = 0; i < families.size(); ++i)
        if (!sigs[i])
            out.warnings.push_back("family '" + families[i].name + "' has an empty signature; left out of the db");

    auto db_without = [&](std::optional<std::size_t> skip) {
        std::vector<Signature> db;
        for (std::size_t i = 0; i < families.size(); ++i)
            if (sigs[i] && (!skip || *skip != i))
                db.push_back(*sigs[i]);
        return db;
    };
    auto best_delta = [&](const Iccg& app, const std::vector<Signature>& db) {
        return db.empty() ? Rational(0) : scan(app, db, weights, {}, 1).best.delta;
    };

    // Best delta of every held-out sample and every benign app.
    std::vector<std::pair<std::size_t, std::size_t>> held_out;
    for (std::size_t f = 0; f < families.size(); ++f)
        for (std::size_t k = 0; k < families[f].samples.size(); ++k)
            held_out.emplace_back(f, k);
    std::vector<std::vector<Signature>> loo(families.size());
    for (std::size_t f = 0; f < families.size(); ++f)
        loo[f] = db_without(f);
    std::vector<Rational> positive_delta(held_out.size());
    parallel_for(held_out.size(), jobs, [&](std::size_t i) {
        const auto [f, k] = held_out[i];
        positive_delta[i] = best_delta(families[f].samples[k], loo[f]);
    });
    const std::vector<Signature> full = db_without(std::nullopt);
    std::vector<Rational> negative_delta(benign.size());
    parallel_for(benign.size(), jobs, [&](std::size_t i) { negative_delta[i] = best_delta(benign[i], full); });

    std::vector<Rational> sorted(candidates.begin(), candidates.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (const auto& c : sorted) {
        RocPoint p;
        p.cutoff = c;
        p.positives = static_cast<int>(positive_delta.size());
        p.negatives = static_cast<int>(negative_delta.size());
        p.true_positives = static_cast<int>(std::count_if(positive_delta.begin(), positive_delta.end(),
                                                          [&](const Rational& d) { return d > c; }));
        p.false_positives = static_cast<int>(std::count_if(negative_delta.begin(), negative_delta.end(),
                                                           [&](const Rational& d) { return d > c; }));
        if (!out.chosen && p.positives > 0 && p.tpr() >= target_tpr)
            out.chosen = c;
        out.roc.push_back(p);
    }
    return out;
}

} // namespace sigsynth
