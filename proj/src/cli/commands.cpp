#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sigsynth/error.hpp"
#include "sigsynth/matcher.hpp"
#include "sigsynth/obfuscator.hpp"
#include "sigsynth/oracle.hpp"
#include "sigsynth/synth.hpp"
#include "sigsynth/wcnf.hpp"
#include "sigsynth/weights.hpp"

namespace sigsynth::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

const std::vector<std::string> kDefaultTuneCutoffs = {"0.6382", "0.5834", "0.5832", "0.4927", "0.4505"};

std::vector<Iccg> load_all(const std::vector<std::string>& paths)
{
    std::vector<Iccg> out;
    for (const auto& p : paths)
        out.push_back(load_iccg(p));
    return out;
}

ObjectiveMode parse_mode(const std::string& s)
{
    if (s == "lexicographic")
        return ObjectiveMode::lexicographic;
    if (s == "weighted-size")
        return ObjectiveMode::weighted_size;
    throw ParseError("unknown objective '" + s + "' (expected lexicographic or weighted-size)");
}

ordered_json rational_value(const Rational& r)
{
    ordered_json j = rational_to_json(r);
    j["value"] = to_double(r);
    return j;
}

// A signature file, or a bare ICCG used as a signature.
Iccg load_signature_graph(const fs::path& path)
{
    const nlohmann::json j = [&] {
        try {
            return nlohmann::json::parse(read_text_file(path));
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(path.string() + ": " + e.what());
        }
    }();
    try {
        return j.contains("family") ? signature_from_json(j).graph : iccg_from_json(j);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const InvariantError& e) {
        throw InvariantError(path.string() + ": " + e.what());
    }
}

std::vector<Signature> load_db(const fs::path& dir)
{
    if (!fs::is_directory(dir))
        throw Error("signature database " + dir.string() + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<Signature> db;
    for (const auto& f : files)
        db.push_back(load_signature(f));
    if (db.empty())
        throw Error("signature database " + dir.string() + " contains no .json files");
    return db;
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err)
{
    for (const auto& w : warnings)
        err << "warning: " << w << "\n";
}

struct Context {
    std::ostream& out;
    std::ostream& err;
};

// ---- subcommands ----

struct WeightsArgs {
    std::vector<std::string> benign;
    std::string out;
};

int cmd_weights(const WeightsArgs& a, Context& c)
{
    const WeightTable t = compute_weights(load_all(a.benign));
    save_weights(t, a.out);
    c.err << "learned weights for " << t.app_counts().size() << " labels from " << t.benign_count()
          << " benign apps\n";
    return kSuccess;
}

struct SynthArgs {
    std::vector<std::string> samples;
    std::string weights;
    std::string family = "family";
    std::string out;
    std::string emit_wcnf;
    std::string objective = "lexicographic";
    bool no_support = false;
};

int cmd_synth(const SynthArgs& a, Context& c)
{
    const std::vector<Iccg> samples = load_all(a.samples);
    const WeightTable weights = load_weights(a.weights);
    SynthOptions options;
    options.mode = parse_mode(a.objective);
    options.require_metadata_support = !a.no_support;
    const Synthesis s = infer_signature(samples, weights, a.family, options);
    print_warnings(s.warnings, c.err);
    if (!a.emit_wcnf.empty())
        export_wcnf(s.problem, a.emit_wcnf);
    if (is_empty_signature(s.signature.graph)) {
        c.err << "error: no shared suspicious structure\n";
        return kEmptySignature;
    }
    save_signature(s.signature, a.out);
    ordered_json j;
    j["family"] = a.family;
    j["objective"] = s.objective;
    j["suspiciousness"] = rational_value(s.signature.suspiciousness);
    j["vertices"] = s.signature.graph.vertex_count();
    j["out"] = a.out;
    c.out << j.dump() << "\n";
    return kSuccess;
}

struct ScanArgs {
    std::string app;
    std::string db;
    std::string weights;
    std::string zero_day = "0.5";
    std::string obf = "0.8";
    int jobs = 1;
    std::string partial_dir;
};

int cmd_scan(const ScanArgs& a, Context& c)
{
    const Iccg app = load_iccg(a.app);
    const std::vector<Signature> db = load_db(a.db);
    const WeightTable weights = load_weights(a.weights);
    const Cutoffs cutoffs{parse_decimal(a.zero_day), parse_decimal(a.obf)};
    const ScanResult r = scan(app, db, weights, cutoffs, a.jobs);

    if (!a.partial_dir.empty())
        fs::create_directories(a.partial_dir);
    std::vector<const MatchVerdict*> order;
    for (const auto& v : r.per_family)
        order.push_back(&v);
    std::sort(order.begin(), order.end(), [](auto* x, auto* y) { return x->family < y->family; });
    for (const MatchVerdict* v : order) {
        ordered_json j;
        j["family"] = v->family;
        j["kind"] = to_string(v->kind);
        j["delta"] = to_double(v->delta);
        j["delta_exact"] = rational_to_json(v->delta);
        if (a.partial_dir.empty()) {
            j["partial_path"] = nullptr;
        } else {
            const fs::path p =
                fs::path(a.partial_dir) / (fs::path(a.app).stem().string() + "." + v->family + ".partial.json");
            save_iccg(v->partial, p);
            j["partial_path"] = p.string();
        }
        j["best"] = v->family == r.best.family;
        c.out << j.dump() << "\n";
    }
    c.err << a.app << ": " << to_string(r.best.kind) << " (family " << r.best.family << ", delta "
          << to_double(r.best.delta) << ")\n";
    return r.best.kind == VerdictKind::no_match ? kClean : kSuccess;
}

struct MatchArgs {
    std::string signature;
    std::string app;
};

int cmd_match(const MatchArgs& a, Context& c)
{
    const Iccg sig = load_signature_graph(a.signature);
    const Iccg app = load_iccg(a.app);
    const auto f = exact_match(sig, app);
    ordered_json j;
    j["match"] = f.has_value();
    if (f) {
        ordered_json m = ordered_json::object();
        for (const auto& [k, v] : *f)
            m[k] = v;
        j["embedding"] = std::move(m);
    }
    c.out << j.dump() << "\n";
    return f ? kSuccess : kClean;
}

struct OracleArgs {
    std::vector<std::string> samples;
    std::string weights;
    std::string objective = "lexicographic";
    bool no_support = false;
    std::string out;
};

int cmd_oracle(const OracleArgs& a, Context& c)
{
    const std::vector<Iccg> samples = load_all(a.samples);
    const WeightTable weights = load_weights(a.weights);
    OracleOptions options{parse_mode(a.objective), !a.no_support};
    const OracleResult r = oracle_mscs(samples, weights, options);
    if (!a.out.empty())
        save_signature(r.signature, a.out);
    ordered_json j;
    j["objective"] = r.objective;
    j["weighted_size"] = rational_value(r.weighted_size);
    j["vertices"] = r.signature.graph.vertex_count();
    c.out << j.dump() << "\n";
    return kSuccess;
}

struct ObfuscateArgs {
    std::string input;
    std::string recipe;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int cmd_obfuscate(const ObfuscateArgs& a, Context& c)
{
    const Iccg g = load_iccg(a.input);
    const Recipe r = load_recipe(a.recipe);
    const std::uint64_t seed = a.seed.value_or(r.seed);
    save_iccg(obfuscate(g, r.ops, seed), a.out);
    c.err << "wrote " << a.out << " (seed " << seed << ", " << r.ops.size() << " ops)\n";
    return kSuccess;
}

struct TuneArgs {
    std::vector<std::string> families;  // NAME=DIR
    std::vector<std::string> benign;
    std::string weights;
    std::vector<std::string> cutoffs = kDefaultTuneCutoffs;
    double target_tpr = 0.9;
    int jobs = 1;
};

int cmd_tune(const TuneArgs& a, Context& c)
{
    std::vector<Family> families;
    for (const auto& spec : a.families) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ParseError("--family expects NAME=DIR, got '" + spec + "'");
        Family f{spec.substr(0, eq), {}};
        const fs::path dir = spec.substr(eq + 1);
        if (!fs::is_directory(dir))
            throw Error("family directory " + dir.string() + " does not exist");
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".json")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& p : files)
            f.samples.push_back(load_iccg(p));
        families.push_back(std::move(f));
    }
    const std::vector<Iccg> benign = load_all(a.benign);
    const WeightTable weights = load_weights(a.weights);
    std::vector<Rational> candidates;
    for (const auto& s : a.cutoffs)
        candidates.push_back(parse_decimal(s));

    const TuneResult r = tune_cutoff(families, weights, benign, candidates, a.target_tpr, a.jobs);
    print_warnings(r.warnings, c.err);
    for (const auto& p : r.roc) {
        ordered_json j;
        j["cutoff"] = to_double(p.cutoff);
        j["tpr"] = p.tpr();
        j["fpr"] = p.fpr();
        j["true_positives"] = p.true_positives;
        j["positives"] = p.positives;
        j["false_positives"] = p.false_positives;
        j["negatives"] = p.negatives;
        c.out << j.dump() << "\n";
    }
    ordered_json j;
    j["chosen"] = r.chosen ? ordered_json(to_double(*r.chosen)) : ordered_json(nullptr);
    c.out << j.dump() << "\n";
    return r.chosen ? kSuccess : kClean;
}

struct SolveArgs {
    std::string wcnf;
};

int cmd_solve_wcnf(const SolveArgs& a, Context& c)
{
    const WcnfProblem p = load_wcnf(a.wcnf);
    const Assignment sol = maximize_lex(p);
    std::int64_t total = 0;
    std::int64_t satisfied = 0;
    for (std::size_t t = 0; t < p.tiers.size(); ++t) {
        total += p.tier_total(t);
        satisfied += sol.objective[t];
    }
    ordered_json j;
    j["satisfied"] = satisfied;
    j["falsified"] = total - satisfied;
    c.out << j.dump() << "\n";
    return kSuccess;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Malware signature synthesis from inter-component call graphs", "sigsynth"};
    app.require_subcommand(1);
    Context ctx{out, err};
    std::function<int()> action;

    WeightsArgs wa;
    auto* weights = app.add_subcommand("weights", "learn metadata weights from benign apps");
    weights->add_option("benign", wa.benign, "benign ICCG-JSON files");
    weights->add_option("--out", wa.out, "Weight-JSON output")->required();
    weights->callback([&] { action = [&] { return cmd_weights(wa, ctx); }; });

    SynthArgs sa;
    auto* synth = app.add_subcommand("synth", "synthesize a family signature");
    synth->add_option("samples", sa.samples, "sample ICCG-JSON files")->required();
    synth->add_option("--weights", sa.weights, "Weight-JSON file")->required();
    synth->add_option("--family", sa.family, "family name");
    synth->add_option("--out", sa.out, "Signature-JSON output")->required();
    synth->add_option("--emit-wcnf", sa.emit_wcnf, "also write the MaxSAT instance as WCNF");
    synth->add_option("--objective", sa.objective, "lexicographic or weighted-size");
    synth->add_flag("--no-support", sa.no_support, "allow signature vertices without metadata");
    synth->callback([&] { action = [&] { return cmd_synth(sa, ctx); }; });

    ScanArgs sc;
    auto* scan_cmd = app.add_subcommand("scan", "classify an app against a signature database");
    scan_cmd->add_option("app", sc.app, "app ICCG-JSON file")->required();
    scan_cmd->add_option("--db", sc.db, "directory of Signature-JSON files")->required();
    scan_cmd->add_option("--weights", sc.weights, "Weight-JSON file")->required();
    scan_cmd->add_option("--zero-day-cutoff", sc.zero_day, "zero-day similarity cutoff");
    scan_cmd->add_option("--obf-cutoff", sc.obf, "obfuscated-variant similarity cutoff");
    scan_cmd->add_option("--jobs", sc.jobs, "worker threads")->check(CLI::PositiveNumber);
    scan_cmd->add_option("--partial-dir", sc.partial_dir, "write partial matches here");
    scan_cmd->callback([&] { action = [&] { return cmd_scan(sc, ctx); }; });

    MatchArgs ma;
    auto* match = app.add_subcommand("match", "exact signature match");
    match->add_option("signature", ma.signature, "Signature-JSON or ICCG-JSON file")->required();
    match->add_option("app", ma.app, "app ICCG-JSON file")->required();
    match->callback([&] { action = [&] { return cmd_match(ma, ctx); }; });

    OracleArgs oa;
    auto* oracle = app.add_subcommand("oracle", "brute-force signature for small samples");
    oracle->add_option("samples", oa.samples, "sample ICCG-JSON files")->required();
    oracle->add_option("--weights", oa.weights, "Weight-JSON file")->required();
    oracle->add_option("--objective", oa.objective, "lexicographic or weighted-size");
    oracle->add_flag("--no-support", oa.no_support, "allow signature vertices without metadata");
    oracle->add_option("--out", oa.out, "Signature-JSON output");
    oracle->callback([&] { action = [&] { return cmd_oracle(oa, ctx); }; });

    ObfuscateArgs ob;
    auto* obf = app.add_subcommand("obfuscate", "apply an obfuscation recipe");
    obf->add_option("input", ob.input, "ICCG-JSON file")->required();
    obf->add_option("--recipe", ob.recipe, "recipe JSON file")->required();
    obf->add_option("--seed", ob.seed, "overrides the recipe seed");
    obf->add_option("--out", ob.out, "ICCG-JSON output")->required();
    obf->callback([&] { action = [&] { return cmd_obfuscate(ob, ctx); }; });

    TuneArgs ta;
    auto* tune = app.add_subcommand("tune", "leave-one-family-out cutoff tuning");
    tune->add_option("--family", ta.families, "NAME=DIR of sample ICCGs (repeatable)")->required();
    tune->add_option("--benign", ta.benign, "benign ICCG-JSON files");
    tune->add_option("--weights", ta.weights, "Weight-JSON file")->required();
    tune->add_option("--cutoffs", ta.cutoffs, "candidate cutoffs");
    tune->add_option("--target-tpr", ta.target_tpr, "required true positive rate");
    tune->add_option("--jobs", ta.jobs, "worker threads")->check(CLI::PositiveNumber);
    tune->callback([&] { action = [&] { return cmd_tune(ta, ctx); }; });

    SolveArgs so;
    auto* solve = app.add_subcommand("solve-wcnf", "solve a WCNF file with the built-in solver");
    solve->add_option("wcnf", so.wcnf, "WCNF file")->required();
    solve->callback([&] { action = [&] { return cmd_solve_wcnf(so, ctx); }; });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kInputError;
    }

    try {
        return action();
    } catch (const HardUnsatError& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    } catch (const InternalError& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
}

} // namespace sigsynth::cli
