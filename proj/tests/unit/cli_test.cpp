// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "recap/subtitles.hpp"
#include "support/sessions.hpp"
#include "support/tmpdir.hpp"

#ifndef RECAP_BIN
#define RECAP_BIN "recap"
#endif

using namespace recap::testing;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const TempDir& dir) {
    const std::string cmd = std::string("'") + RECAP_BIN + "' " + args + " > '" + (dir / "stdout.txt").string() +
                            "' 2> '" + (dir / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("generate, caption and evaluate a recording") {
    TempDir dir("cli");
    const auto rec = dir / "rec";
    REQUIRE(run("gen --script " + q(data_path("four_actions.json")) + " --out " + q(rec), dir) == 0);
    CHECK(fs::exists(rec / "manifest.json"));
    CHECK(fs::exists(rec / "trace.json"));

    REQUIRE(run("caption --input " + q(rec) + " --out " + q(dir / "out") + " --dump-signal", dir) == 0);
    for (const char* f : {"steps.json", "captions.srt", "diagnostics.json", "signal.csv"})
        CHECK_MESSAGE(fs::exists(dir / "out" / f), f);
    const auto steps = nlohmann::json::parse(slurp(dir / "out" / "steps.json"));
    REQUIRE(steps.size() == 4);
    CHECK(steps[0]["kind"] == "TAP");
    CHECK(steps[2]["text"] == "Input \"John\" in the edittext above \"Storage\"");
    CHECK(recap::parse_srt(slurp(dir / "out" / "captions.srt")).size() == 4);

    REQUIRE(run("eval --input " + q(rec) + " --json", dir) == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "stdout.txt"));
    CHECK(report["total"]["vs_f1"]["overall"] == 1.0);
    CHECK(report["total"]["classification_accuracy"] == 1.0);

    REQUIRE(run("dump-signal --input " + q(rec), dir) == 0);
    CHECK(slurp(dir / "stdout.txt").rfind("frame_index,score\n", 0) == 0);
}

TEST_CASE("exit codes") {
    TempDir dir("cli-exit");
    const auto rec = dir / "rec";
    REQUIRE(run("gen --script " + q(data_path("four_actions.json")) + " --out " + q(rec), dir) == 0);

    SUBCASE("usage") {
        CHECK(run("", dir) == 1);
        CHECK(run("caption --input " + q(rec), dir) == 1);
        CHECK(run("caption --input " + q(rec) + " --out " + q(rec / "captions"), dir) == 1);
        CHECK(run("gen --out " + q(dir / "x"), dir) == 1);
    }
    SUBCASE("input errors") {
        fs::create_directories(dir / "empty");
        CHECK(run("caption --input " + q(dir / "empty") + " --out " + q(dir / "o1"), dir) == 2);
        spit(dir / "bad.json", R"({"screens": []})");
        CHECK(run("gen --script " + q(dir / "bad.json") + " --out " + q(dir / "o2"), dir) == 2);
        spit(dir / "cfg.json", R"({"caption": {"alpha": 2}})");
        CHECK(run("caption --input " + q(rec) + " --out " + q(dir / "o3") + " --config " + q(dir / "cfg.json"), dir) == 2);

        TempDir other("cli-other");
        REQUIRE(run("gen --batch 1 --out " + q(other.path()), dir) == 0);
        CHECK(run("eval --input " + q(rec) + " --trace " + q(other / "rec_000" / "trace.json"), dir) == 2);
        CHECK(slurp(dir / "stderr.txt").find("does not describe this recording") != std::string::npos);
    }
    SUBCASE("missing adapter") {
        spit(dir / "cfg.json", R"({"ocr": {"command": "/nonexistent/ocr-model"}})");
        CHECK(run("caption --input " + q(rec) + " --out " + q(dir / "o4") + " --config " + q(dir / "cfg.json"), dir) == 3);
        CHECK(slurp(dir / "stderr.txt").find("ocr") != std::string::npos);
    }
    SUBCASE("config from the environment") {
        spit(dir / "cfg.json", R"({"ocr": {"command": "/nonexistent/ocr-model"}})");
        const std::string env = "RECAP_CONFIG=" + q(dir / "cfg.json") + " ";
        const std::string cmd = env + "'" + RECAP_BIN + "' caption --input " + q(rec) + " --out " + q(dir / "o5") +
                                " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        CHECK(WEXITSTATUS(status) == 3);
    }
}

TEST_CASE("config echo replays to identical outputs") {
    TempDir dir("cli-echo");
    const auto rec = dir / "rec";
    REQUIRE(run("gen --script " + q(data_path("four_actions.json")) + " --out " + q(rec), dir) == 0);
    {
        std::ofstream cfg(dir / "tuned.json");
        cfg << R"({"caption": {"alpha": 0.95, "beta": 0.4}, "tap": {"change_threshold": 20}})";
    }
    REQUIRE(run("caption --input " + q(rec) + " --out " + q(dir / "a") + " --config " + q(dir / "tuned.json"), dir) == 0);
    const auto steps = nlohmann::json::parse(slurp(dir / "a" / "steps.json"));
    REQUIRE_FALSE(steps.empty());
    CHECK(steps[0]["config_echo"]["caption"]["alpha"] == 0.95);
    {
        std::ofstream echo(dir / "echo.json");
        echo << steps[0]["config_echo"].dump();
    }
    REQUIRE(run("caption --input " + q(rec) + " --out " + q(dir / "b") + " --config " + q(dir / "echo.json"), dir) == 0);
    for (const char* f : {"steps.json", "captions.srt", "diagnostics.json"})
        CHECK_MESSAGE(slurp(dir / "a" / f) == slurp(dir / "b" / f), f);
}
