// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "creascore/distribution.hpp"
#include "creascore/evaluation.hpp"
#include "creascore/scoring.hpp"

namespace creascore {

// One scores.jsonl record: the breakdown plus the whole-response embedding,
// kept inline so `distribution` can run from scores.jsonl alone.
struct ScoredResponseRecord {
    std::string response_id;
    std::string activity_id;
    ScoreBreakdown breakdown;
    std::vector<double> embedding;
};

std::string granularity_name(Granularity g);
std::string aggregation_name(Aggregation a);
Granularity granularity_from_name(const std::string& name);
Aggregation aggregation_from_name(const std::string& name);

// scores.jsonl: key order and float formatting are pinned.
std::string to_jsonl_line(const ScoredResponseRecord& record);
std::vector<ScoredResponseRecord> read_scores_jsonl(const std::filesystem::path& path);

struct ScoreSummary {
    std::size_t n_responses = 0;
    std::size_t n_activities = 0;
    std::string model_id;
    std::size_t dim = 0;
    MetaParameters meta;
    std::uint64_t seed = 0;
    double mean_novelty = 0.0;
    double mean_transformation = 0.0;
    double mean_creativity = 0.0;
    std::vector<std::pair<std::string, std::pair<std::size_t, double>>>
        per_activity;  // id -> (n, mean creativity)
};

std::string summary_to_json(const ScoreSummary& summary);

std::string report_to_json(const EvaluationReport& report, std::size_t n_responses);
std::string buckets_to_csv(const std::vector<LabelBucket>& buckets);

struct ActivityDistribution {
    std::string activity_id;
    std::size_t n = 0;
    std::optional<BimodalityResult> bimodality;
    std::optional<ClusterSplit> split;
    std::vector<std::string> notes;
};

struct DistributionReport {
    std::size_t n = 0;
    std::optional<BimodalityResult> bimodality;  // over all creativity scores
    std::optional<ClusterSplit> split;
    std::vector<std::string> notes;
    std::vector<ActivityDistribution> activities;
    std::vector<DistinctivenessEntry> distinctiveness;  // per-activity populations
};

// Groups records by activity (first-appearance order), computes
// distinctiveness within each activity population and bimodality / cluster
// splits per activity and overall. Sections that need more data than a
// group has are omitted with a note instead of failing.
DistributionReport build_distribution_report(const std::vector<ScoredResponseRecord>& records);

std::string distribution_to_json(const DistributionReport& report);
std::string distinctiveness_to_csv(const std::vector<DistinctivenessEntry>& rows);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace creascore
