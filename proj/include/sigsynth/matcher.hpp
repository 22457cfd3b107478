#pragma once

// Exact signature matching (subgraph embedding), approximate matching through
// re-synthesis, database scans and cutoff tuning.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sigsynth/iccg.hpp"
#include "sigsynth/weights.hpp"

namespace sigsynth {

/// Signature vertex id -> app vertex id.
using Embedding = std::map<std::string, std::string>;

/// Backtracking search with forward checking. SYSTEM maps only to SYSTEM.
std::optional<Embedding> exact_match(const Iccg& sig, const Iccg& app);

/// Checks injectivity, type, cf-edge and metadata preservation of a given map.
bool is_embedding(const Iccg& sig, const Iccg& app, const Embedding& f);

enum class VerdictKind { exact, obfuscated, zero_day_candidate, no_match };

std::string_view to_string(VerdictKind k);

struct Cutoffs {
    Rational zero_day = make_rational(1, 2);
    Rational obfuscated = make_rational(4, 5);
};

/// Strict thresholds: obfuscated iff delta > obfuscated, zero-day iff delta > zero_day.
VerdictKind classify(const Rational& delta, bool exact, const Cutoffs& cutoffs);

struct MatchVerdict {
    std::string family;
    VerdictKind kind = VerdictKind::no_match;
    Rational delta;
    /// Common signature of the app and the family signature.
    Iccg partial;
};

/// delta = f(S) / f(S_F) with S synthesized from {closure(app), S_F} maximizing f.
/// An exact embedding of S_F into the raw app short-circuits to delta = 1.
/// Throws ZeroSignatureError when f(S_F) = 0.
MatchVerdict approx_match(const Iccg& app, const Signature& sig, const WeightTable& weights,
                          const Cutoffs& cutoffs = {});

struct ScanResult {
    MatchVerdict best;
    /// Verdicts for every evaluated family, in database order.
    std::vector<MatchVerdict> per_family;
};

/// Exact matching against every family first; if any succeeds the first exact family
/// (by name) is returned without approximate matching. Otherwise the best approximate
/// verdict wins; ties go to the smaller family name. `jobs` worker threads evaluate
/// families concurrently with a deterministic merge.
ScanResult scan(const Iccg& app, std::span<const Signature> db, const WeightTable& weights,
                const Cutoffs& cutoffs = {}, int jobs = 1);

struct Family {
    std::string name;
    std::vector<Iccg> samples;
};

struct RocPoint {
    Rational cutoff;
    int true_positives = 0;
    int positives = 0;
    int false_positives = 0;
    int negatives = 0;

    double tpr() const { return positives == 0 ? 0.0 : static_cast<double>(true_positives) / positives; }
    double fpr() const { return negatives == 0 ? 0.0 : static_cast<double>(false_positives) / negatives; }
};

struct TuneResult {
    /// Largest candidate with TPR >= target, if any.
    std::optional<Rational> chosen;
    /// One point per candidate, in descending cutoff order.
    std::vector<RocPoint> roc;
    std::vector<std::string> warnings;
};

/// Leave-one-family-out: every family's samples are scanned against signatures of the
/// other families and detected when the best delta exceeds the cutoff. TPR pools all
/// samples; FPR scans the benign apps against every family signature.
/// Throws InsufficientFamiliesError for fewer than two families.
TuneResult tune_cutoff(std::span<const Family> families, const WeightTable& weights, std::span<const Iccg> benign,
                       std::span<const Rational> candidates, double target_tpr = 0.9, int jobs = 1);

} // namespace sigsynth
