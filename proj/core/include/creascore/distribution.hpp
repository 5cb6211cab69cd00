// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "creascore/embedding.hpp"

namespace creascore {

struct DistinctivenessEntry {
    std::string response_id;
    double divergence = 0.0;  // mean cosine distance to the rest
    double percentile = 0.0;  // fraction of the population strictly below
};

struct PopulationDistinctiveness {
    std::vector<DistinctivenessEntry> per_response;
};

// Divergence of each response from its competing population: the mean
// cosine distance (1 - dot, unit vectors) to every other member. Requires a
// population of at least two.
PopulationDistinctiveness distinctiveness(
    const std::vector<std::pair<std::string, EmbeddingVector>>& population);

// Sarle's bimodality coefficient over biased central moments with the
// finite-sample correction term; 5/9 is the uniform-distribution reference
// threshold.
struct BimodalityResult {
    double coefficient = 0.0;
    double threshold = 5.0 / 9.0;
    bool flagged = false;
    std::size_t n = 0;
};

// Requires n >= 4 and positive sample variance.
BimodalityResult bimodality_coefficient(std::span<const double> scores);

// Exact two-cluster split of 1-D scores: scans every sorted-order split
// point and minimizes the within-cluster sum of squares. Ties resolve to
// the earliest split point.
struct ClusterSplit {
    std::vector<double> lower;  // ascending
    std::vector<double> upper;  // ascending
    double boundary_gap = 0.0;  // min(upper) - max(lower)
    std::pair<double, double> centroids{0.0, 0.0};
};

ClusterSplit two_cluster_split(std::span<const double> scores);

}  // namespace creascore
