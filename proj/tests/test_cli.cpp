// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0
//
// Integration tests that drive the installed binary the way a user would.
// CREASCORE_BIN and CREASCORE_DATA are injected by CTest.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>

#include <sys/wait.h>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

std::string bin() {
    const char* path = std::getenv("CREASCORE_BIN");
    REQUIRE_MESSAGE(path != nullptr, "CREASCORE_BIN must point at the creascore binary");
    return path;
}

fs::path data_dir() {
    const char* path = std::getenv("CREASCORE_DATA");
    REQUIRE_MESSAGE(path != nullptr, "CREASCORE_DATA must point at the toy dataset");
    return path;
}

int run(const std::string& args) {
    const std::string cmd = bin() + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.is_open());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct Workspace {
    fs::path root;
    Workspace() {
        root = fs::temp_directory_path() /
               ("creascore-cli-" + std::to_string(::getpid()) + "-" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(root);
    }
    ~Workspace() { fs::remove_all(root); }

    fs::path write(const std::string& name, const std::string& content) const {
        const auto path = root / name;
        std::ofstream out(path);
        out << content;
        return path;
    }
};

const char* kConfig = R"({
  "embedding": {"kind": "deterministic-test", "model_id": "toy-model", "dim": 24},
  "meta": {"alpha": 0.5, "beta": 0.5, "granularity": "element", "subscore_aggregation": "mean"},
  "parallelism": 2,
  "seed": 7
})";

std::string common_args(const Workspace& ws, const fs::path& config, const std::string& out) {
    return "--config " + config.string() + " --activities " +
           (data_dir() / "activities.json").string() + " --responses " +
           (data_dir() / "responses.jsonl").string() + " --out " + (ws.root / out).string();
}

}  // namespace

TEST_CASE("evaluate on the toy dataset emits a schema-valid report") {
    Workspace ws;
    const auto config = ws.write("config.json", kConfig);
    CHECK(run("evaluate " + common_args(ws, config, "out")) == 0);

    const auto report = nlohmann::json::parse(slurp(ws.root / "out" / "report.json"));
    CHECK(report["n_activities"] == 2);
    CHECK(report["n_responses"] == 10);
    CHECK(report["mean_mae"].is_number());
    CHECK(report["per_activity"].is_array());
    CHECK(report["per_activity"].size() == 2);
    CHECK(report["buckets"].is_array());
    for (const auto& bucket : report["buckets"]) {
        CHECK(bucket["n"].is_number_unsigned());
        CHECK(bucket["median"].is_number());
    }

    const auto csv = slurp(ws.root / "out" / "buckets.csv");
    CHECK(csv.rfind("activity_id,label,n,min,q1,median,q3,max\n", 0) == 0);
}

TEST_CASE("missing required flags exit with code 1") {
    Workspace ws;
    const auto config = ws.write("config.json", kConfig);
    CHECK(run("score --config " + config.string() + " --responses " +
              (data_dir() / "responses.jsonl").string() + " --out " +
              (ws.root / "out").string()) == 1);
    CHECK(run("definitely-not-a-subcommand") == 1);
    CHECK(run("") == 1);
}

TEST_CASE("config files with unknown keys are rejected") {
    Workspace ws;
    const auto config = ws.write("config.json", R"({
      "embedding": {"kind": "deterministic-test", "model_id": "m", "dim": 8},
      "temperature": 0.7
    })");
    CHECK(run("evaluate " + common_args(ws, config, "out")) == 1);
}

TEST_CASE("datasets violating the schema exit with code 1") {
    Workspace ws;
    const auto config = ws.write("config.json", kConfig);
    const auto activities = ws.write("activities.json", R"([
      {"activity_id": "act-01", "premises": [
        {"id": "p1", "text": "one."}, {"id": "p2", "text": "two."}]}
    ])");

    SUBCASE("label out of range") {
        const auto responses = ws.write(
            "responses.jsonl",
            R"({"activity_id": "act-01", "response_id": "r", "text": "x.", "label": 7})" "\n");
        CHECK(run("evaluate --config " + config.string() + " --activities " +
                  activities.string() + " --responses " + responses.string() + " --out " +
                  (ws.root / "out").string()) == 1);
    }
    SUBCASE("unknown activity reference") {
        const auto responses = ws.write(
            "responses.jsonl",
            R"({"activity_id": "act-99", "response_id": "r", "text": "x.", "label": 1})" "\n");
        CHECK(run("evaluate --config " + config.string() + " --activities " +
                  activities.string() + " --responses " + responses.string() + " --out " +
                  (ws.root / "out").string()) == 1);
    }
}

TEST_CASE("score runs are byte-identical and independent of parallelism") {
    Workspace ws;
    const auto config = ws.write("config.json", kConfig);
    CHECK(run("score " + common_args(ws, config, "run1")) == 0);
    CHECK(run("score " + common_args(ws, config, "run2")) == 0);
    CHECK(run("score " + common_args(ws, config, "run3") + " --parallelism 1") == 0);
    CHECK(run("score " + common_args(ws, config, "run4") + " --parallelism 8") == 0);

    const auto first = slurp(ws.root / "run1" / "scores.jsonl");
    CHECK(first == slurp(ws.root / "run2" / "scores.jsonl"));
    CHECK(first == slurp(ws.root / "run3" / "scores.jsonl"));
    CHECK(first == slurp(ws.root / "run4" / "scores.jsonl"));
    CHECK(slurp(ws.root / "run1" / "summary.json") == slurp(ws.root / "run2" / "summary.json"));
}

TEST_CASE("distribution consumes score output") {
    Workspace ws;
    const auto config = ws.write("config.json", kConfig);
    REQUIRE(run("score " + common_args(ws, config, "scored")) == 0);
    CHECK(run("distribution --scores " + (ws.root / "scored" / "scores.jsonl").string() +
              " --out " + (ws.root / "dist").string()) == 0);

    const auto dist = nlohmann::json::parse(slurp(ws.root / "dist" / "distribution.json"));
    CHECK(dist["n"] == 10);
    CHECK(dist["activities"].size() == 2);
    CHECK(dist["distinctiveness"].size() == 10);
    CHECK(dist["distinctiveness"][0]["divergence"].is_number());
    const auto csv = slurp(ws.root / "dist" / "distinctiveness.csv");
    CHECK(csv.rfind("response_id,divergence,percentile\n", 0) == 0);
    // header + one row per response
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
}

TEST_CASE("embed warms the cache exactly once") {
    Workspace ws;
    const auto config = ws.write("config.json", R"({
      "embedding": {"kind": "deterministic-test", "model_id": "m", "dim": 16},
      "cache_path": ")" + (ws.root / "cache.jsonl").string() + R"("
    })");
    const auto texts = ws.write("texts.jsonl",
                                R"({"text": "warm me up"})" "\n"
                                R"({"text": "me too"})" "\n");
    CHECK(run("embed --config " + config.string() + " --texts " + texts.string()) == 0);
    const auto cache_first = slurp(ws.root / "cache.jsonl");
    CHECK(std::count(cache_first.begin(), cache_first.end(), '\n') == 2);

    CHECK(run("embed --config " + config.string() + " --texts " + texts.string()) == 0);
    CHECK(slurp(ws.root / "cache.jsonl") == cache_first);  // all hits, no appends
}

TEST_CASE("a cached run and an uncached run score identically") {
    Workspace ws;
    std::string cached_config = std::string(kConfig);
    cached_config.insert(cached_config.rfind('}'),
                         R"(, "cache_path": ")" + (ws.root / "cache.jsonl").string() + "\"");
    const auto with_cache = ws.write("cached.json", cached_config);
    const auto without_cache = ws.write("plain.json", kConfig);

    CHECK(run("score " + common_args(ws, with_cache, "cold")) == 0);   // fills the cache
    CHECK(run("score " + common_args(ws, with_cache, "warm")) == 0);   // reads it back
    CHECK(run("score " + common_args(ws, without_cache, "direct")) == 0);

    const auto direct = slurp(ws.root / "direct" / "scores.jsonl");
    CHECK(slurp(ws.root / "cold" / "scores.jsonl") == direct);
    CHECK(slurp(ws.root / "warm" / "scores.jsonl") == direct);
}

TEST_CASE("a remote source works through the CLI and the cache outlives the server") {
    Workspace ws;

    // Local embedding endpoint: vectors derived from the text bytes, auth
    // required so the EMBED_API_KEY path is exercised.
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
        if (req.get_header_value("Authorization") != "Bearer cli-test-key") {
            res.status = 401;
            return;
        }
        hits.fetch_add(1);
        const auto body = nlohmann::json::parse(req.body);
        nlohmann::json data = nlohmann::json::array();
        for (const auto& text : body["input"]) {
            const auto payload = text.get<std::string>();
            nlohmann::json item;
            nlohmann::json vec = nlohmann::json::array();
            for (int j = 0; j < 6; ++j) {
                double component = 0.1;
                for (std::size_t i = j; i < payload.size(); i += 6) {
                    component += static_cast<double>(static_cast<unsigned char>(payload[i]));
                }
                vec.push_back(component);
            }
            item["embedding"] = vec;
            data.push_back(item);
        }
        nlohmann::json out;
        out["data"] = data;
        res.set_content(out.dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    const auto config = ws.write("config.json", R"({
      "embedding": {"kind": "remote-http", "model_id": "cli-remote", "dim": 6,
                    "endpoint": "http://127.0.0.1:)" + std::to_string(port) +
                                                R"(/v1/embeddings"},
      "cache_path": ")" + (ws.root / "cache.jsonl").string() + R"("
    })");

    auto run_with_key = [&](const std::string& args) {
        const std::string cmd = "EMBED_API_KEY=cli-test-key " + bin() + " " + args +
                                " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        REQUIRE(status != -1);
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };

    CHECK(run_with_key("score " + common_args(ws, config, "remote1")) == 0);
    CHECK(hits.load() >= 1);

    server.stop();
    server_thread.join();

    // Every text is cached now, so a rerun succeeds without the server and
    // reproduces the artifact byte for byte.
    CHECK(run_with_key("score " + common_args(ws, config, "remote2")) == 0);
    CHECK(slurp(ws.root / "remote1" / "scores.jsonl") ==
          slurp(ws.root / "remote2" / "scores.jsonl"));
}

TEST_CASE("an unreachable remote endpoint exits with code 2 after bounded retries") {
    Workspace ws;
    const auto config = ws.write("config.json", R"({
      "embedding": {"kind": "remote-http", "model_id": "m", "dim": 8,
                    "endpoint": "http://127.0.0.1:1/v1/embeddings"}
    })");
    // Connection refused is retried on the pinned schedule (1s base, factor
    // 2, 5 attempts), so this spends ~15s in backoff sleep.
    CHECK(run("evaluate " + common_args(ws, config, "out")) == 2);
}
