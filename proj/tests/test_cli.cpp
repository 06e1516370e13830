#include <doctest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "clear/cli.hpp"
#include "support.hpp"

using clear::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "clear");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = clear::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"generate", "--bogus"}).code == 2);
    CHECK(run({"verify"}).code == 2);
    CHECK(run({"questions", "--scenes", "20", "--split", "0.5,0.5"}).code == 2);
    CHECK(run({"questions", "--scenes", "20", "--split", "0.7,0.2,0.2"}).code == 2);
    CHECK(run({"questions", "--scenes", "3"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("generate, verify, evaluate and baselines") {
    TempDir dir("cli");
    const std::string out = (dir.path() / "ds").string();
    auto gen = run({"questions", "--scenes", "20", "--questions-per-scene", "5", "--seed", "3", "--out", out,
                    "--workers", "2"});
    REQUIRE(gen.code == 0);
    CHECK(fs::exists(fs::path(out) / "manifest.json"));
    CHECK_FALSE(fs::exists(fs::path(out) / "audio"));

    auto ver = run({"verify", out, "--report", (dir.path() / "v.json").string()});
    CHECK(ver.code == 0);
    CHECK(fs::exists(dir.path() / "v.json"));

    // Perfect predictions for the test split.
    const auto gold = (fs::path(out) / "questions_test.jsonl").string();
    {
        std::ifstream in(gold);
        std::ofstream pred(dir.path() / "pred.jsonl");
        for (std::string line; std::getline(in, line);) {
            auto j = nlohmann::json::parse(line);
            pred << nlohmann::json{{"question_id", j["question_id"]}, {"answer", j["answer"]}}.dump() << '\n';
        }
    }
    auto ev = run({"evaluate", "--gold", gold, "--pred", (dir.path() / "pred.jsonl").string(), "--json"});
    REQUIRE(ev.code == 0);
    CHECK(nlohmann::json::parse(ev.out).at("overall_accuracy") == 1.0);

    auto base = run({"baselines", "--gold", gold, "--trials", "3"});
    CHECK(base.code == 0);
    CHECK(base.out.find("majority") != std::string::npos);

    // Missing prediction file is a runtime failure.
    CHECK(run({"evaluate", "--gold", gold, "--pred", (dir.path() / "none.jsonl").string()}).code == 1);

    // Corrupt one answer: verify exits 1.
    const auto train = fs::path(out) / "questions_train.jsonl";
    std::vector<std::string> lines;
    {
        std::ifstream in(train);
        for (std::string line; std::getline(in, line);) lines.push_back(line);
    }
    auto j = nlohmann::json::parse(lines[0]);
    j["answer"] = j["answer"] == "yes" ? "no" : "yes";
    lines[0] = j.dump();
    {
        std::ofstream o(train, std::ios::trunc);
        for (const auto& l : lines) o << l << '\n';
    }
    CHECK(run({"verify", out}).code == 1);
}

TEST_CASE("config file values are overridden by flags") {
    TempDir dir("cfg");
    const auto cfg = dir.path() / "c.json";
    std::ofstream(cfg) << nlohmann::json{{"n_scenes", 12}, {"questions_per_scene", 2}, {"master_seed", 4}}.dump();
    const std::string out = (dir.path() / "ds").string();
    REQUIRE(run({"questions", "--config", cfg.string(), "--scenes", "15", "--out", out}).code == 0);
    std::ifstream in(fs::path(out) / "manifest.json");
    auto m = nlohmann::json::parse(in);
    CHECK(m["config"]["n_scenes"] == 15);
    CHECK(m["config"]["questions_per_scene"] == 2);
    CHECK(run({"questions", "--config", (dir.path() / "none.json").string()}).code != 0);
}
