// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#include "creascore/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "creascore/errors.hpp"
#include "creascore/parallel.hpp"

namespace creascore {

namespace {

nlohmann::json parse_json_file(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in.is_open()) {
        throw SchemaError(std::string(what) + ": cannot open " + path.string());
    }
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto parsed = nlohmann::json::parse(content, nullptr, false);
    if (parsed.is_discarded()) {
        throw SchemaError(std::string(what) + ": " + path.string() + " is not valid JSON");
    }
    return parsed;
}

void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                         const std::string& context) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end()) {
            throw SchemaError(context + ": unknown key '" + key + "'");
        }
    }
}

std::string require_string(const nlohmann::json& obj, const char* key,
                           const std::string& context) {
    if (!obj.contains(key) || !obj[key].is_string()) {
        throw SchemaError(context + ": missing or non-string '" + std::string(key) + "'");
    }
    auto value = obj[key].get<std::string>();
    if (value.empty()) throw SchemaError(context + ": '" + std::string(key) + "' is empty");
    return value;
}

}  // namespace

LabeledDataset load_dataset(const std::filesystem::path& activities_path,
                            const std::filesystem::path& responses_path, bool require_labels) {
    LabeledDataset dataset;

    const auto activities_json = parse_json_file(activities_path, "activities");
    if (!activities_json.is_array()) {
        throw SchemaError("activities: top-level value must be an array");
    }
    std::unordered_set<std::string> activity_ids;
    for (const auto& item : activities_json) {
        if (!item.is_object()) throw SchemaError("activities: entries must be objects");
        reject_unknown_keys(item, {"activity_id", "premises"}, "activities");
        Activity activity;
        activity.activity_id = require_string(item, "activity_id", "activities");
        if (!activity_ids.insert(activity.activity_id).second) {
            throw SchemaError("activities: duplicate activity_id '" + activity.activity_id + "'");
        }
        if (!item.contains("premises") || !item["premises"].is_array()) {
            throw SchemaError("activities: '" + activity.activity_id + "' has no premises array");
        }
        std::unordered_set<std::string> premise_ids;
        for (const auto& p : item["premises"]) {
            if (!p.is_object()) {
                throw SchemaError("activities: '" + activity.activity_id +
                                  "' premise entries must be objects");
            }
            reject_unknown_keys(p, {"id", "text"}, "activities premise");
            PremiseText premise;
            premise.id = require_string(p, "id", "activities premise");
            premise.text = require_string(p, "text", "activities premise");
            if (!premise_ids.insert(premise.id).second) {
                throw SchemaError("activities: '" + activity.activity_id +
                                  "' has duplicate premise id '" + premise.id + "'");
            }
            activity.premises.push_back(std::move(premise));
        }
        if (activity.premises.size() < 2) {
            throw SchemaError("activities: '" + activity.activity_id +
                              "' needs at least 2 premises");
        }
        dataset.activities.push_back(std::move(activity));
    }

    std::ifstream in(responses_path);
    if (!in.is_open()) {
        throw SchemaError("responses: cannot open " + responses_path.string());
    }
    std::unordered_set<std::string> response_ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto parsed = nlohmann::json::parse(line, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object()) {
            throw SchemaError("responses line " + std::to_string(lineno) +
                              ": not a JSON object");
        }
        const std::string context = "responses line " + std::to_string(lineno);
        reject_unknown_keys(parsed, {"activity_id", "response_id", "text", "label"}, context);

        LabeledResponse labeled;
        labeled.response.activity_id = require_string(parsed, "activity_id", context);
        labeled.response.response_id = require_string(parsed, "response_id", context);
        labeled.response.text = require_string(parsed, "text", context);
        if (parsed.contains("label")) {
            if (!parsed["label"].is_number_integer()) {
                throw SchemaError(context + ": label must be an integer");
            }
            const auto label = parsed["label"].get<long long>();
            if (label < 0 || label > 4) {
                throw SchemaError(context + ": label " + std::to_string(label) +
                                  " outside 0..4");
            }
            labeled.label = static_cast<int>(label);
        }
        if (!activity_ids.count(labeled.response.activity_id)) {
            throw IntegrityError(context + ": response '" + labeled.response.response_id +
                                 "' references unknown activity '" +
                                 labeled.response.activity_id + "'");
        }
        if (!response_ids.insert(labeled.response.response_id).second) {
            throw SchemaError(context + ": duplicate response_id '" +
                              labeled.response.response_id + "'");
        }
        labeled.response.subelements = split_subelements(labeled.response.text);
        dataset.responses.push_back(std::move(labeled));
    }

    if (require_labels) {
        std::unordered_map<std::string, std::size_t> labeled_count;
        for (const auto& r : dataset.responses) {
            if (r.label) ++labeled_count[r.response.activity_id];
        }
        for (const auto& activity : dataset.activities) {
            if (labeled_count[activity.activity_id] == 0) {
                throw SchemaError("dataset: activity '" + activity.activity_id +
                                  "' has no labeled responses");
            }
        }
    }
    return dataset;
}

double label_to_unit(int label) {
    if (label < 0 || label > 4) {
        throw SchemaError("label " + std::to_string(label) + " outside 0..4");
    }
    return static_cast<double>(label) / 4.0;
}

double mean_absolute_error(std::span<const std::pair<double, double>> pairs) {
    if (pairs.empty()) throw InvalidInputError("mae: empty pair list");
    double sum = 0.0;
    for (const auto& [score, target] : pairs) sum += std::abs(score - target);
    return sum / static_cast<double>(pairs.size());
}

std::optional<double> pearson(std::span<const std::pair<double, double>> pairs) {
    if (pairs.size() < 2) throw InvalidInputError("pearson: need at least 2 pairs");

    // Single-pass co-moment accumulation.
    double mean_x = 0.0, mean_y = 0.0, m2x = 0.0, m2y = 0.0, cxy = 0.0;
    std::size_t n = 0;
    for (const auto& [x, y] : pairs) {
        if (!std::isfinite(x) || !std::isfinite(y)) {
            throw InvalidInputError("pearson: non-finite value");
        }
        ++n;
        const double dx = x - mean_x;
        const double dy = y - mean_y;
        mean_x += dx / static_cast<double>(n);
        mean_y += dy / static_cast<double>(n);
        m2x += dx * (x - mean_x);
        m2y += dy * (y - mean_y);
        cxy += dx * (y - mean_y);
    }
    if (m2x == 0.0 || m2y == 0.0) return std::nullopt;
    return std::clamp(cxy / std::sqrt(m2x * m2y), -1.0, 1.0);
}

std::optional<double> kendall_tau(std::span<const std::pair<double, double>> pairs) {
    const std::size_t n = pairs.size();
    if (n < 2) throw InvalidInputError("kendall: need at least 2 pairs");
    for (const auto& [x, y] : pairs) {
        if (!std::isfinite(x) || !std::isfinite(y)) {
            throw InvalidInputError("kendall: non-finite value");
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pairs[a].first != pairs[b].first) return pairs[a].first < pairs[b].first;
        return pairs[a].second < pairs[b].second;
    });

    auto tie_pairs = [](std::uint64_t run) { return run * (run - 1) / 2; };

    // Pairs tied in x and tied in both, from runs of the (x, y)-sorted order.
    std::uint64_t n1 = 0, n3 = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && pairs[order[j]].first == pairs[order[i]].first) ++j;
        n1 += tie_pairs(j - i);
        for (std::size_t a = i; a < j;) {
            std::size_t b = a;
            while (b < j && pairs[order[b]].second == pairs[order[a]].second) ++b;
            n3 += tie_pairs(b - a);
            a = b;
        }
        i = j;
    }

    // Strict inversions of the y sequence via merge sort: every inversion is
    // a discordant pair once x ties are accounted for.
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = pairs[order[i]].second;
    std::uint64_t exchanges = 0;
    std::vector<double> buffer(n);
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            const std::size_t mid = lo + width;
            const std::size_t hi = std::min(n, mid + width);
            std::size_t a = lo, b = mid, out = lo;
            while (a < mid && b < hi) {
                if (ys[a] <= ys[b]) {
                    buffer[out++] = ys[a++];
                } else {
                    exchanges += mid - a;
                    buffer[out++] = ys[b++];
                }
            }
            while (a < mid) buffer[out++] = ys[a++];
            while (b < hi) buffer[out++] = ys[b++];
            std::copy(buffer.begin() + static_cast<std::ptrdiff_t>(lo),
                      buffer.begin() + static_cast<std::ptrdiff_t>(hi),
                      ys.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }

    // Pairs tied in y, from runs of the fully sorted y values.
    std::uint64_t n2 = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && ys[j] == ys[i]) ++j;
        n2 += tie_pairs(j - i);
        i = j;
    }

    const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (n0 == n1 || n0 == n2) return std::nullopt;  // all x tied or all y tied

    const double numerator = static_cast<double>(static_cast<std::int64_t>(n0) -
                                                 static_cast<std::int64_t>(n1) -
                                                 static_cast<std::int64_t>(n2) +
                                                 static_cast<std::int64_t>(n3) -
                                                 2 * static_cast<std::int64_t>(exchanges));
    const double denominator =
        std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
    return std::clamp(numerator / denominator, -1.0, 1.0);
}

FiveNumberSummary five_number_summary(std::vector<double> values) {
    if (values.empty()) throw InvalidInputError("summary: empty value list");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();

    auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(n - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        if (frac == 0.0 || lo + 1 >= n) return values[lo];
        return values[lo] + frac * (values[lo + 1] - values[lo]);
    };

    FiveNumberSummary summary;
    summary.min = values.front();
    summary.q1 = quantile(0.25);
    summary.median = quantile(0.5);
    summary.q3 = quantile(0.75);
    summary.max = values.back();
    summary.n = n;
    return summary;
}

std::vector<std::pair<int, FiveNumberSummary>> bucket_summary(
    const std::vector<std::pair<int, double>>& labeled_scores) {
    std::map<int, std::vector<double>> groups;
    for (const auto& [label, score] : labeled_scores) {
        if (label < 0 || label > 4) {
            throw SchemaError("bucket: label " + std::to_string(label) + " outside 0..4");
        }
        groups[label].push_back(score);
    }
    std::vector<std::pair<int, FiveNumberSummary>> out;
    out.reserve(groups.size());
    for (auto& [label, scores] : groups) {
        out.emplace_back(label, five_number_summary(std::move(scores)));
    }
    return out;
}

EvaluationReport evaluate(const LabeledDataset& dataset, Embedder& embedder,
                          const MetaParameters& meta, std::size_t parallelism) {
    std::unordered_map<std::string, const Activity*> by_id;
    for (const auto& activity : dataset.activities) {
        by_id[activity.activity_id] = &activity;
    }

    struct Job {
        const Activity* activity;
        const LabeledResponse* response;
    };
    std::vector<Job> jobs;
    std::unordered_map<std::string, std::vector<std::size_t>> activity_jobs;
    for (const auto& labeled : dataset.responses) {
        if (!labeled.label) continue;
        const auto it = by_id.find(labeled.response.activity_id);
        if (it == by_id.end()) {
            throw IntegrityError("evaluate: response '" + labeled.response.response_id +
                                 "' references unknown activity '" +
                                 labeled.response.activity_id + "'");
        }
        activity_jobs[labeled.response.activity_id].push_back(jobs.size());
        jobs.push_back(Job{it->second, &labeled});
    }

    EvaluationReport report;
    std::vector<const Activity*> evaluated;
    for (const auto& activity : dataset.activities) {
        const auto it = activity_jobs.find(activity.activity_id);
        const std::size_t labeled_n = it == activity_jobs.end() ? 0 : it->second.size();
        if (labeled_n == 0) {
            report.skipped.push_back({activity.activity_id, "no labeled responses"});
        } else if (labeled_n < 2) {
            report.skipped.push_back({activity.activity_id, "fewer than 2 labeled responses"});
        } else {
            evaluated.push_back(&activity);
        }
    }
    if (evaluated.empty()) {
        throw InvalidInputError("evaluate: no activity has at least 2 labeled responses");
    }

    // Memoize all needed embeddings with one batch call so parallel scoring
    // stays pure and the remote in-flight bound is respected.
    std::vector<std::string> unique_texts;
    std::unordered_set<std::string> seen;
    auto want = [&](const std::string& text) {
        if (seen.insert(text).second) unique_texts.push_back(text);
    };
    for (const Activity* activity : evaluated) {
        for (const auto& premise : activity->premises) {
            if (meta.granularity == Granularity::Element) {
                want(premise.text);
            } else {
                for (const auto& sub : split_subelements(premise.text)) want(sub);
            }
        }
    }
    for (const auto& job : jobs) {
        const bool in_scope =
            std::find(evaluated.begin(), evaluated.end(), job.activity) != evaluated.end();
        if (!in_scope) continue;
        if (meta.granularity == Granularity::Element) {
            want(job.response->response.text);
        } else if (!job.response->response.subelements.empty()) {
            for (const auto& sub : job.response->response.subelements) want(sub);
        } else {
            for (const auto& sub : split_subelements(job.response->response.text)) want(sub);
        }
    }
    const auto vectors = embedder.embed(unique_texts);
    std::unordered_map<std::string, EmbeddingVector> table;
    for (std::size_t i = 0; i < unique_texts.size(); ++i) table[unique_texts[i]] = vectors[i];
    FixedEmbedder memo(embedder.source(), std::move(table));

    std::vector<std::optional<ScoreBreakdown>> results(jobs.size());
    std::vector<std::size_t> in_scope_jobs;
    for (const Activity* activity : evaluated) {
        for (std::size_t idx : activity_jobs[activity->activity_id]) in_scope_jobs.push_back(idx);
    }
    parallel_for(in_scope_jobs.size(), parallelism, [&](std::size_t i) {
        const auto idx = in_scope_jobs[i];
        results[idx] = score_response(*jobs[idx].activity, jobs[idx].response->response, memo,
                                      meta);
    });

    double mae_sum = 0.0;
    double pearson_sum = 0.0;
    std::size_t pearson_n = 0;
    double kendall_sum = 0.0;
    std::size_t kendall_n = 0;

    for (const Activity* activity : evaluated) {
        std::vector<std::pair<double, double>> score_target;
        std::vector<std::pair<int, double>> label_score;
        for (std::size_t idx : activity_jobs[activity->activity_id]) {
            const double score = results[idx]->creativity;
            const int label = *jobs[idx].response->label;
            score_target.emplace_back(score, label_to_unit(label));
            label_score.emplace_back(label, score);
        }

        ActivityMetrics metrics;
        metrics.activity_id = activity->activity_id;
        metrics.n = score_target.size();
        metrics.mae = mean_absolute_error(score_target);
        metrics.pearson = pearson(score_target);
        metrics.kendall = kendall_tau(score_target);
        mae_sum += metrics.mae;
        if (metrics.pearson) {
            pearson_sum += *metrics.pearson;
            ++pearson_n;
        }
        if (metrics.kendall) {
            kendall_sum += *metrics.kendall;
            ++kendall_n;
        }
        report.per_activity.push_back(metrics);

        for (auto& [label, summary] : bucket_summary(label_score)) {
            report.buckets.push_back(LabelBucket{activity->activity_id, label, summary});
        }
    }

    report.mean_mae = mae_sum / static_cast<double>(report.per_activity.size());
    if (pearson_n > 0) report.mean_pearson = pearson_sum / static_cast<double>(pearson_n);
    if (kendall_n > 0) report.mean_kendall = kendall_sum / static_cast<double>(kendall_n);
    return report;
}

}  // namespace creascore
