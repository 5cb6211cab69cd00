// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "creascore/embedding.hpp"
#include "creascore/scoring.hpp"

namespace creascore {

struct LabeledResponse {
    ResponseDoc response;
    std::optional<int> label;  // 0..4 when present
};

struct LabeledDataset {
    std::vector<Activity> activities;
    std::vector<LabeledResponse> responses;
};

struct ActivityMetrics {
    std::string activity_id;
    std::size_t n = 0;  // labeled responses evaluated
    double mae = 0.0;
    std::optional<double> pearson;  // absent when either variance is zero
    std::optional<double> kendall;  // absent when all x or all y are tied
};

struct FiveNumberSummary {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    std::size_t n = 0;
};

struct LabelBucket {
    std::string activity_id;
    int label = 0;
    FiveNumberSummary summary;
};

struct SkippedActivity {
    std::string activity_id;
    std::string reason;
};

struct EvaluationReport {
    std::vector<ActivityMetrics> per_activity;
    double mean_mae = 0.0;
    std::optional<double> mean_pearson;
    std::optional<double> mean_kendall;
    std::vector<LabelBucket> buckets;
    std::vector<SkippedActivity> skipped;
};

// Loads the activities JSON array and the responses JSONL file, validating
// the schema and referential integrity. require_labels additionally demands
// at least one labeled response per activity.
LabeledDataset load_dataset(const std::filesystem::path& activities_path,
                            const std::filesystem::path& responses_path, bool require_labels);

// label in 0..4 -> label / 4.
double label_to_unit(int label);

// pairs are (score, target).
double mean_absolute_error(std::span<const std::pair<double, double>> pairs);

std::optional<double> pearson(std::span<const std::pair<double, double>> pairs);

// Kendall tau-b: (C - D) / sqrt((C+D+Tx)(C+D+Ty)) over all unordered pairs,
// with Tx/Ty counting pairs tied only in x / only in y. Computed by sort
// plus merge counting, so all pair counts are exact integers.
std::optional<double> kendall_tau(std::span<const std::pair<double, double>> pairs);

// Five-number summary with quartiles by linear interpolation between order
// statistics (position p*(n-1), zero-indexed).
FiveNumberSummary five_number_summary(std::vector<double> values);

// Groups (label, score) pairs by label and summarizes each non-empty group,
// label ascending.
std::vector<std::pair<int, FiveNumberSummary>> bucket_summary(
    const std::vector<std::pair<int, double>>& labeled_scores);

// Scores every labeled response and reports per-activity MAE / Pearson /
// Kendall against label_to_unit targets, plus per-label buckets. Activities
// with fewer than two labeled responses are skipped with a note. Aggregate
// means are unweighted across activities; absent values are excluded from
// their mean.
EvaluationReport evaluate(const LabeledDataset& dataset, Embedder& embedder,
                          const MetaParameters& meta, std::size_t parallelism = 1);

}  // namespace creascore
