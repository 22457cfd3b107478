#include <doctest.h>

#include <sstream>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "sigsynth/matcher.hpp"
#include "sigsynth/obfuscator.hpp"
#include "sigsynth/synth.hpp"
#include "testutil.hpp"

using namespace sigsynth;
using namespace sigsynth::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(const std::vector<std::string>& args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string fx(const std::string& rel) { return fixture(rel).string(); }

std::vector<std::string> benign_files()
{
    std::vector<std::string> out;
    for (int i = 1; i <= 9; ++i)
        out.push_back(fx("benign/benign" + std::to_string(i) + ".json"));
    return out;
}

// Weights file over the benign corpus, written once per directory.
std::string weights_file(const fs::path& dir)
{
    const fs::path p = dir / "weights.json";
    save_weights(compute_weights(benign_corpus()), p);
    return p.string();
}

} // namespace

TEST_CASE("usage errors exit 2")
{
    CHECK(run_cli({}).code == cli::kInputError);
    CHECK(run_cli({"frobnicate"}).code == cli::kInputError);
    CHECK(run_cli({"synth", "a.json"}).code == cli::kInputError);  // missing required options
    CHECK(run_cli({"--help"}).code == cli::kSuccess);
}

TEST_CASE("weights")
{
    const auto dir = scratch_dir("cli-weights");
    std::vector<std::string> args{"weights"};
    for (const auto& f : benign_files())
        args.push_back(f);
    args.push_back("--out");
    args.push_back((dir / "w.json").string());
    CHECK(run_cli(args).code == cli::kSuccess);
    CHECK(load_weights(dir / "w.json") == compute_weights(benign_corpus()));
}

TEST_CASE("synth writes the library's signature and WCNF")
{
    const auto dir = scratch_dir("cli-synth");
    const std::string w = weights_file(dir);
    const Outcome o = run_cli({"synth", fx("golddream/sample1.json"), fx("golddream/sample2.json"), "--weights", w,
                               "--family", "GoldDream", "--out", (dir / "sig.json").string(), "--emit-wcnf",
                               (dir / "p.wcnf").string()});
    REQUIRE(o.code == cli::kSuccess);
    const Synthesis s = infer_signature(golddream_samples(), compute_weights(benign_corpus()), "GoldDream");
    CHECK(load_signature(dir / "sig.json") == s.signature);
    CHECK(read_text_file(dir / "p.wcnf") == to_wcnf(s.problem));
    const auto j = nlohmann::json::parse(o.out);
    CHECK(j.at("family") == "GoldDream");
    CHECK(j.at("objective").get<std::vector<std::int64_t>>() == s.objective);
}

TEST_CASE("synth with nothing in common exits 3")
{
    const auto dir = scratch_dir("cli-empty");
    const std::string w = weights_file(dir);
    const Outcome o = run_cli({"synth", fx("benign/benign1.json"), fx("golddream/sample1.json"), "--weights", w,
                               "--out", (dir / "sig.json").string()});
    const Synthesis s = infer_signature(
        std::vector<Iccg>{load_iccg(fixture("benign/benign1.json")), load_iccg(fixture("golddream/sample1.json"))},
        compute_weights(benign_corpus()), "family");
    if (is_empty_signature(s.signature.graph)) {
        CHECK(o.code == cli::kEmptySignature);
        CHECK(o.err.find("no shared suspicious structure") != std::string::npos);
        CHECK(!fs::exists(dir / "sig.json"));
    } else {
        CHECK(o.code == cli::kSuccess);
    }

    Iccg a;
    a.add_vertex("r", ComponentType::receiver);
    a.add_meta_edge("r", "r", intent_filter("A"));
    Iccg b;
    b.add_vertex("s", ComponentType::service);
    save_iccg(a, dir / "a.json");
    save_iccg(b, dir / "b.json");
    const Outcome e = run_cli({"synth", (dir / "a.json").string(), (dir / "b.json").string(), "--weights", w,
                               "--out", (dir / "sig.json").string()});
    CHECK(e.code == cli::kEmptySignature);
}

TEST_CASE("malformed input names the file and exits 2")
{
    const auto dir = scratch_dir("cli-bad");
    const std::string w = weights_file(dir);
    write_text_file(dir / "broken.json", "{\"vertices\": [");
    const Outcome o = run_cli({"synth", (dir / "broken.json").string(), fx("golddream/sample1.json"), "--weights", w,
                               "--out", (dir / "sig.json").string()});
    CHECK(o.code == cli::kInputError);
    CHECK(o.err.find("broken.json") != std::string::npos);

    const Outcome missing = run_cli({"match", (dir / "nope.json").string(), fx("golddream/sample1.json")});
    CHECK(missing.code == cli::kInputError);
    CHECK(missing.err.find("nope.json") != std::string::npos);

    CHECK(run_cli({"synth", fx("golddream/sample1.json"), "--weights", w, "--objective", "size", "--out",
                   (dir / "sig.json").string()})
              .code == cli::kInputError);
}

TEST_CASE("match, scan and oracle")
{
    const auto dir = scratch_dir("cli-scan");
    const std::string w = weights_file(dir);
    fs::create_directories(dir / "db");
    const Synthesis s = infer_signature(golddream_samples(), compute_weights(benign_corpus()), "GoldDream");
    save_signature(s.signature, dir / "db" / "GoldDream.json");

    const Outcome m = run_cli({"match", (dir / "db" / "GoldDream.json").string(), fx("golddream/sample1.json")});
    CHECK(m.code == cli::kSuccess);
    const auto mj = nlohmann::json::parse(m.out);
    CHECK(mj.at("match") == true);
    CHECK(mj.at("embedding").at("receiver0") == "zjReceiver");

    const Outcome hit = run_cli({"scan", fx("golddream/sample2.json"), "--db", (dir / "db").string(), "--weights", w,
                                 "--partial-dir", (dir / "partial").string()});
    CHECK(hit.code == cli::kSuccess);
    const auto hj = nlohmann::json::parse(hit.out);
    CHECK(hj.at("kind") == "Exact");
    CHECK(hj.at("best") == true);
    CHECK(fs::exists(hj.at("partial_path").get<std::string>()));

    for (int i = 1; i <= 9; ++i) {
        const std::string app = fx("benign/benign" + std::to_string(i) + ".json");
        const Outcome o = run_cli({"scan", app, "--db", (dir / "db").string(), "--weights", w, "--jobs", "2"});
        const ScanResult r = scan(load_iccg(app), std::vector<Signature>{s.signature}, compute_weights(benign_corpus()));
        CHECK(o.code == (r.best.kind == VerdictKind::no_match ? cli::kClean : cli::kSuccess));
        CHECK(nlohmann::json::parse(o.out).at("kind") == std::string(to_string(r.best.kind)));
    }

    const Outcome big = run_cli({"oracle", fx("golddream/sample1.json"), fx("golddream/sample2.json"), "--weights", w});
    CHECK(big.code == cli::kInputError);
}

TEST_CASE("obfuscate follows the library")
{
    const auto dir = scratch_dir("cli-obf");
    write_text_file(dir / "recipe.json", R"({"seed": 3, "ops": [{"op": "rename"}, {"op": "insert_dummy", "count": 2}]})");
    CHECK(run_cli({"obfuscate", fx("golddream/sample1.json"), "--recipe", (dir / "recipe.json").string(), "--out",
                   (dir / "o.json").string()})
              .code == cli::kSuccess);
    const Recipe r = load_recipe(dir / "recipe.json");
    CHECK(load_iccg(dir / "o.json") == obfuscate(load_iccg(fixture("golddream/sample1.json")), r.ops, 3));
    CHECK(run_cli({"obfuscate", fx("golddream/sample1.json"), "--recipe", (dir / "recipe.json").string(), "--seed",
                   "4", "--out", (dir / "o4.json").string()})
              .code == cli::kSuccess);
    CHECK(load_iccg(dir / "o4.json") == obfuscate(load_iccg(fixture("golddream/sample1.json")), r.ops, 4));
}

TEST_CASE("tune needs two families")
{
    const auto dir = scratch_dir("cli-tune");
    const std::string w = weights_file(dir);
    const Outcome o = run_cli({"tune", "--family", "GoldDream=" + fx("golddream"), "--weights", w});
    CHECK(o.code == cli::kInputError);
    CHECK(run_cli({"tune", "--family", "bad", "--weights", w}).code == cli::kInputError);
}

TEST_CASE("solve-wcnf")
{
    const auto dir = scratch_dir("cli-wcnf");
    write_text_file(dir / "p.wcnf", "p wcnf 2 4 100\n100 -1 -2 0\n3 1 0\n5 2 0\n1 -2 0\n");
    const Outcome o = run_cli({"solve-wcnf", (dir / "p.wcnf").string()});
    CHECK(o.code == cli::kSuccess);
    const auto j = nlohmann::json::parse(o.out);
    // Best is x2 alone: 5 satisfied, 3 + 1 falsified.
    CHECK(j.at("satisfied") == 5);
    CHECK(j.at("falsified") == 4);
    write_text_file(dir / "unsat.wcnf", "p wcnf 1 2 10\n10 1 0\n10 -1 0\n");
    CHECK(run_cli({"solve-wcnf", (dir / "unsat.wcnf").string()}).code == cli::kInternalError);
}

TEST_CASE("installed binary reports the same exit codes")
{
    const auto dir = scratch_dir("cli-process");
    write_text_file(dir / "broken.json", "not json");
    const std::string cmd = std::string(SIGSYNTH_CLI) + " match " + (dir / "broken.json").string() + " " +
                            fx("golddream/sample1.json") + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == cli::kInputError);
}
