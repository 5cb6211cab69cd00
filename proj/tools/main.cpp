// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0
//
// creascore command-line entry point: score, evaluate, distribution, embed.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "creascore/embed_cache.hpp"
#include "creascore/embedding.hpp"
#include "creascore/errors.hpp"
#include "creascore/evaluation.hpp"
#include "creascore/parallel.hpp"
#include "creascore/reports.hpp"
#include "creascore/scoring.hpp"

namespace {

using namespace creascore;

struct RunConfig {
    EmbeddingSource source;
    MetaParameters meta;
    std::string cache_path;
    std::size_t parallelism = std::max(1u, std::thread::hardware_concurrency());
    std::uint64_t seed = 0;
};

void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                    const std::string& context) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) {
            if (key == a) {
                known = true;
                break;
            }
        }
        if (!known) throw SchemaError(context + ": unknown key '" + key + "'");
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw SchemaError("config: cannot open " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto parsed = nlohmann::json::parse(content, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        throw SchemaError("config: " + path.string() + " is not a JSON object");
    }
    reject_unknown(parsed, {"embedding", "meta", "cache_path", "parallelism", "seed"}, "config");

    RunConfig cfg;
    if (!parsed.contains("embedding") || !parsed["embedding"].is_object()) {
        throw SchemaError("config: missing 'embedding' object");
    }
    const auto& emb = parsed["embedding"];
    reject_unknown(emb, {"kind", "model_id", "dim", "endpoint"}, "config.embedding");
    if (!emb.contains("kind") || !emb["kind"].is_string()) {
        throw SchemaError("config.embedding: missing 'kind'");
    }
    const auto kind = emb["kind"].get<std::string>();
    if (kind == "deterministic-test") {
        cfg.source.kind = SourceKind::DeterministicTest;
    } else if (kind == "remote-http") {
        cfg.source.kind = SourceKind::RemoteHttp;
    } else {
        throw SchemaError("config.embedding: kind must be 'deterministic-test' or 'remote-http'");
    }
    if (!emb.contains("model_id") || !emb["model_id"].is_string() ||
        emb["model_id"].get<std::string>().empty()) {
        throw SchemaError("config.embedding: 'model_id' is required");
    }
    cfg.source.model_id = emb["model_id"].get<std::string>();
    if (!emb.contains("dim") || !emb["dim"].is_number_unsigned() ||
        emb["dim"].get<std::size_t>() < 2) {
        throw SchemaError("config.embedding: 'dim' must be an integer >= 2");
    }
    cfg.source.dim = emb["dim"].get<std::size_t>();
    if (emb.contains("endpoint")) {
        if (!emb["endpoint"].is_string()) throw SchemaError("config.embedding: bad 'endpoint'");
        cfg.source.endpoint = emb["endpoint"].get<std::string>();
    }
    if (cfg.source.kind == SourceKind::RemoteHttp && cfg.source.endpoint.empty()) {
        throw SchemaError("config.embedding: remote-http requires 'endpoint'");
    }

    if (parsed.contains("meta")) {
        const auto& meta = parsed["meta"];
        if (!meta.is_object()) throw SchemaError("config: 'meta' must be an object");
        reject_unknown(meta, {"alpha", "beta", "granularity", "subscore_aggregation"},
                       "config.meta");
        if (meta.contains("alpha")) {
            if (!meta["alpha"].is_number()) throw SchemaError("config.meta: bad 'alpha'");
            cfg.meta.alpha = meta["alpha"].get<double>();
        }
        if (meta.contains("beta")) {
            if (!meta["beta"].is_number()) throw SchemaError("config.meta: bad 'beta'");
            cfg.meta.beta = meta["beta"].get<double>();
        }
        if (meta.contains("granularity")) {
            if (!meta["granularity"].is_string()) {
                throw SchemaError("config.meta: bad 'granularity'");
            }
            cfg.meta.granularity = granularity_from_name(meta["granularity"].get<std::string>());
        }
        if (meta.contains("subscore_aggregation")) {
            if (!meta["subscore_aggregation"].is_string()) {
                throw SchemaError("config.meta: bad 'subscore_aggregation'");
            }
            cfg.meta.subscore_aggregation =
                aggregation_from_name(meta["subscore_aggregation"].get<std::string>());
        }
        if (!(cfg.meta.alpha > 0.0) || !(cfg.meta.beta > 0.0)) {
            throw SchemaError("config.meta: alpha and beta must be positive");
        }
    }
    if (parsed.contains("cache_path")) {
        if (!parsed["cache_path"].is_string()) throw SchemaError("config: bad 'cache_path'");
        cfg.cache_path = parsed["cache_path"].get<std::string>();
    }
    if (parsed.contains("parallelism")) {
        if (!parsed["parallelism"].is_number_unsigned() ||
            parsed["parallelism"].get<std::size_t>() == 0) {
            throw SchemaError("config: 'parallelism' must be a positive integer");
        }
        cfg.parallelism = parsed["parallelism"].get<std::size_t>();
    }
    if (parsed.contains("seed")) {
        if (!parsed["seed"].is_number_unsigned()) {
            throw SchemaError("config: 'seed' must be an unsigned integer");
        }
        cfg.seed = parsed["seed"].get<std::uint64_t>();
    }
    return cfg;
}

// Flags shared by score and evaluate; flags win over the config file.
struct ScoreFlags {
    std::string config_path;
    std::string activities_path;
    std::string responses_path;
    std::string out_dir;
    std::optional<std::size_t> parallelism;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> cache_path;
    std::optional<std::string> granularity;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<std::string> aggregation;
};

void add_score_flags(CLI::App& cmd, ScoreFlags& flags) {
    cmd.add_option("--config", flags.config_path, "Run config JSON file")->required();
    cmd.add_option("--activities", flags.activities_path, "Activities JSON file")->required();
    cmd.add_option("--responses", flags.responses_path, "Responses JSONL file")->required();
    cmd.add_option("--out", flags.out_dir, "Output directory")->required();
    cmd.add_option("--parallelism", flags.parallelism, "Worker count override");
    cmd.add_option("--seed", flags.seed, "Seed override");
    cmd.add_option("--cache", flags.cache_path, "Cache path override");
    cmd.add_option("--granularity", flags.granularity, "element | subelement");
    cmd.add_option("--alpha", flags.alpha, "Novelty exponent override");
    cmd.add_option("--beta", flags.beta, "Transformation exponent override");
    cmd.add_option("--aggregation", flags.aggregation, "mean | max");
}

RunConfig resolve_config(const ScoreFlags& flags) {
    RunConfig cfg = load_config(flags.config_path);
    if (flags.parallelism) {
        if (*flags.parallelism == 0) throw SchemaError("parallelism must be positive");
        cfg.parallelism = *flags.parallelism;
    }
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.cache_path) cfg.cache_path = *flags.cache_path;
    if (flags.granularity) cfg.meta.granularity = granularity_from_name(*flags.granularity);
    if (flags.alpha) cfg.meta.alpha = *flags.alpha;
    if (flags.beta) cfg.meta.beta = *flags.beta;
    if (flags.aggregation) {
        cfg.meta.subscore_aggregation = aggregation_from_name(*flags.aggregation);
    }
    if (!(cfg.meta.alpha > 0.0) || !(cfg.meta.beta > 0.0)) {
        throw SchemaError("alpha and beta must be positive");
    }
    return cfg;
}

// Owns the embedder plus the optional cache layer in front of it.
struct EmbedderStack {
    std::unique_ptr<Embedder> base;
    std::unique_ptr<EmbeddingCache> cache;
    std::unique_ptr<CachingEmbedder> caching;

    Embedder& effective() { return caching ? static_cast<Embedder&>(*caching) : *base; }
};

EmbedderStack make_stack(const RunConfig& cfg) {
    EmbedderStack stack;
    stack.base = make_embedder(cfg.source);
    if (!cfg.cache_path.empty()) {
        stack.cache = std::make_unique<EmbeddingCache>(cfg.cache_path);
        stack.caching = std::make_unique<CachingEmbedder>(*stack.base, *stack.cache);
    }
    return stack;
}

int run_score(const ScoreFlags& flags) {
    const RunConfig cfg = resolve_config(flags);
    const LabeledDataset dataset =
        load_dataset(flags.activities_path, flags.responses_path, false);
    EmbedderStack stack = make_stack(cfg);

    std::unordered_map<std::string, const Activity*> by_id;
    for (const auto& activity : dataset.activities) by_id[activity.activity_id] = &activity;

    // One batched embedding pass over every unique text, so workers never
    // touch the remote endpoint.
    std::vector<std::string> unique_texts;
    std::unordered_set<std::string> seen;
    auto want = [&](const std::string& text) {
        if (seen.insert(text).second) unique_texts.push_back(text);
    };
    for (const auto& activity : dataset.activities) {
        for (const auto& premise : activity.premises) {
            if (cfg.meta.granularity == Granularity::Element) {
                want(premise.text);
            } else {
                for (const auto& sub : split_subelements(premise.text)) want(sub);
            }
        }
    }
    for (const auto& labeled : dataset.responses) {
        want(labeled.response.text);  // whole-response embedding for the record
        if (cfg.meta.granularity == Granularity::Subelement) {
            for (const auto& sub : labeled.response.subelements) want(sub);
        }
    }

    std::unordered_map<std::string, EmbeddingVector> table;
    if (!unique_texts.empty()) {
        const auto vectors = stack.effective().embed(unique_texts);
        for (std::size_t i = 0; i < unique_texts.size(); ++i) {
            table[unique_texts[i]] = vectors[i];
        }
    }
    FixedEmbedder memo(cfg.source, std::move(table));

    std::vector<ScoredResponseRecord> records(dataset.responses.size());
    parallel_for(dataset.responses.size(), cfg.parallelism, [&](std::size_t i) {
        const auto& labeled = dataset.responses[i];
        const Activity* activity = by_id.at(labeled.response.activity_id);
        ScoredResponseRecord record;
        record.response_id = labeled.response.response_id;
        record.activity_id = labeled.response.activity_id;
        record.breakdown = score_response(*activity, labeled.response, memo, cfg.meta);
        record.embedding = memo.embed({labeled.response.text}).front().values;
        records[i] = std::move(record);
    });

    std::string jsonl;
    for (const auto& record : records) {
        jsonl += to_jsonl_line(record);
        jsonl += '\n';
    }

    ScoreSummary summary;
    summary.n_responses = records.size();
    summary.model_id = cfg.source.model_id;
    summary.dim = cfg.source.dim;
    summary.meta = cfg.meta;
    summary.seed = cfg.seed;
    double n_sum = 0.0, t_sum = 0.0, c_sum = 0.0;
    std::unordered_map<std::string, std::pair<std::size_t, double>> per_activity;
    for (const auto& record : records) {
        n_sum += record.breakdown.novelty;
        t_sum += record.breakdown.transformation;
        c_sum += record.breakdown.creativity;
        auto& slot = per_activity[record.activity_id];
        slot.first += 1;
        slot.second += record.breakdown.creativity;
    }
    if (!records.empty()) {
        const auto n = static_cast<double>(records.size());
        summary.mean_novelty = n_sum / n;
        summary.mean_transformation = t_sum / n;
        summary.mean_creativity = c_sum / n;
    }
    for (const auto& activity : dataset.activities) {
        auto it = per_activity.find(activity.activity_id);
        if (it == per_activity.end()) continue;
        summary.per_activity.emplace_back(
            activity.activity_id,
            std::make_pair(it->second.first,
                           it->second.second / static_cast<double>(it->second.first)));
        ++summary.n_activities;
    }

    const std::filesystem::path out(flags.out_dir);
    write_text_file(out / "scores.jsonl", jsonl);
    write_text_file(out / "summary.json", summary_to_json(summary));
    return 0;
}

int run_evaluate(const ScoreFlags& flags) {
    const RunConfig cfg = resolve_config(flags);
    const LabeledDataset dataset =
        load_dataset(flags.activities_path, flags.responses_path, true);
    EmbedderStack stack = make_stack(cfg);

    const EvaluationReport report =
        evaluate(dataset, stack.effective(), cfg.meta, cfg.parallelism);

    std::size_t n_responses = 0;
    for (const auto& m : report.per_activity) n_responses += m.n;

    const std::filesystem::path out(flags.out_dir);
    write_text_file(out / "report.json", report_to_json(report, n_responses));
    write_text_file(out / "buckets.csv", buckets_to_csv(report.buckets));
    return 0;
}

int run_distribution(const std::string& scores_path, const std::string& out_dir) {
    const auto records = read_scores_jsonl(scores_path);
    const DistributionReport report = build_distribution_report(records);

    const std::filesystem::path out(out_dir);
    write_text_file(out / "distribution.json", distribution_to_json(report));
    write_text_file(out / "distinctiveness.csv", distinctiveness_to_csv(report.distinctiveness));
    return 0;
}

int run_embed(const std::string& config_path, const std::string& texts_path) {
    const RunConfig cfg = load_config(config_path);
    if (cfg.cache_path.empty()) {
        throw SchemaError("embed: config has no cache_path to warm");
    }
    EmbedderStack stack = make_stack(cfg);

    std::ifstream in(texts_path);
    if (!in.is_open()) throw SchemaError("texts: cannot open " + texts_path);
    std::vector<std::string> texts;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto parsed = nlohmann::json::parse(line, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("text") ||
            !parsed["text"].is_string()) {
            throw SchemaError("texts line " + std::to_string(lineno) +
                              ": expected {\"text\": ...}");
        }
        auto text = parsed["text"].get<std::string>();
        if (seen.insert(text).second) texts.push_back(std::move(text));
    }

    const std::size_t before = stack.cache->size();
    if (!texts.empty()) stack.effective().embed(texts);
    const std::size_t after = stack.cache->size();
    std::cout << "embedded " << (after - before) << " new texts, " << (texts.size() - (after - before))
              << " already cached (" << stack.cache->path().string() << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Embedding-space creativity scoring and evaluation"};
    app.require_subcommand(1);

    ScoreFlags score_flags;
    auto* score_cmd = app.add_subcommand("score", "Score responses against their activities");
    add_score_flags(*score_cmd, score_flags);

    ScoreFlags eval_flags;
    auto* eval_cmd =
        app.add_subcommand("evaluate", "Score labeled responses and report agreement metrics");
    add_score_flags(*eval_cmd, eval_flags);

    std::string dist_scores, dist_out;
    auto* dist_cmd =
        app.add_subcommand("distribution", "Analyze a scores.jsonl population");
    dist_cmd->add_option("--scores", dist_scores, "scores.jsonl produced by `score`")->required();
    dist_cmd->add_option("--out", dist_out, "Output directory")->required();

    std::string embed_config, embed_texts;
    auto* embed_cmd = app.add_subcommand("embed", "Warm the embedding cache");
    embed_cmd->add_option("--config", embed_config, "Run config JSON file")->required();
    embed_cmd->add_option("--texts", embed_texts, "JSONL file of {\"text\": ...}")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (score_cmd->parsed()) return run_score(score_flags);
        if (eval_cmd->parsed()) return run_evaluate(eval_flags);
        if (dist_cmd->parsed()) return run_distribution(dist_scores, dist_out);
        if (embed_cmd->parsed()) return run_embed(embed_config, embed_texts);
    } catch (const AuthError& e) {
        std::cerr << "creascore: " << e.what() << '\n';
        return 2;
    } catch (const TransportError& e) {
        std::cerr << "creascore: " << e.what() << '\n';
        return 2;
    } catch (const ProtocolError& e) {
        std::cerr << "creascore: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "creascore: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
