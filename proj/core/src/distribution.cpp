// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#include "creascore/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "creascore/errors.hpp"

namespace creascore {

PopulationDistinctiveness distinctiveness(
    const std::vector<std::pair<std::string, EmbeddingVector>>& population) {
    const std::size_t n = population.size();
    if (n < 2) throw InvalidInputError("distinctiveness: population size must be at least 2");
    const std::size_t d = population.front().second.dim();
    for (const auto& [id, vec] : population) {
        if (vec.dim() != d) {
            throw InvalidInputError("distinctiveness: mixed dimensions in population");
        }
    }

    std::vector<double> divergences(n, 0.0);
    std::vector<double> distances;
    distances.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        distances.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double distance = 1.0 - dot(population[i].second, population[j].second);
            distances.push_back(distance < 0.0 ? 0.0 : distance);
        }
        // Summation in ascending value order, so the result is independent
        // of how the population happens to be permuted.
        std::sort(distances.begin(), distances.end());
        double sum = 0.0;
        for (double x : distances) sum += x;
        divergences[i] = sum / static_cast<double>(n - 1);
    }

    PopulationDistinctiveness out;
    out.per_response.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t below = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (divergences[j] < divergences[i]) ++below;
        }
        out.per_response.push_back(DistinctivenessEntry{
            population[i].first, divergences[i],
            static_cast<double>(below) / static_cast<double>(n)});
    }
    return out;
}

BimodalityResult bimodality_coefficient(std::span<const double> scores) {
    const std::size_t n = scores.size();
    if (n < 4) throw InvalidInputError("bimodality: need at least 4 scores");
    for (double s : scores) {
        if (!std::isfinite(s)) throw InvalidInputError("bimodality: non-finite score");
    }

    double mean = 0.0;
    for (double s : scores) mean += s;
    mean /= static_cast<double>(n);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;  // biased central moments
    for (double s : scores) {
        const double d = s - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (m2 == 0.0) throw DegenerateInputError("bimodality: zero variance");

    const double g1 = m3 / std::pow(m2, 1.5);
    const double g2 = m4 / (m2 * m2) - 3.0;
    const double nd = static_cast<double>(n);
    const double correction = 3.0 * (nd - 1.0) * (nd - 1.0) / ((nd - 2.0) * (nd - 3.0));

    BimodalityResult result;
    result.coefficient = (g1 * g1 + 1.0) / (g2 + correction);
    result.flagged = result.coefficient > result.threshold;
    result.n = n;
    return result;
}

ClusterSplit two_cluster_split(std::span<const double> scores) {
    const std::size_t n = scores.size();
    if (n < 2) throw InvalidInputError("cluster split: need at least 2 scores");
    for (double s : scores) {
        if (!std::isfinite(s)) throw InvalidInputError("cluster split: non-finite score");
    }

    std::vector<double> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end());

    // Within-cluster sum of squares for each of the n-1 sorted split points,
    // each side computed directly from its mean.
    auto within_ss = [&](std::size_t begin, std::size_t end) {
        double mean = 0.0;
        for (std::size_t i = begin; i < end; ++i) mean += sorted[i];
        mean /= static_cast<double>(end - begin);
        double ss = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            const double d = sorted[i] - mean;
            ss += d * d;
        }
        return ss;
    };

    std::size_t best_split = 1;
    double best_ss = within_ss(0, 1) + within_ss(1, n);
    for (std::size_t split = 2; split < n; ++split) {
        const double ss = within_ss(0, split) + within_ss(split, n);
        if (ss < best_ss) {
            best_ss = ss;
            best_split = split;
        }
    }

    ClusterSplit result;
    result.lower.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(best_split));
    result.upper.assign(sorted.begin() + static_cast<std::ptrdiff_t>(best_split), sorted.end());
    result.boundary_gap = result.upper.front() - result.lower.back();

    double lower_mean = 0.0;
    for (double v : result.lower) lower_mean += v;
    lower_mean /= static_cast<double>(result.lower.size());
    double upper_mean = 0.0;
    for (double v : result.upper) upper_mean += v;
    upper_mean /= static_cast<double>(result.upper.size());
    result.centroids = {lower_mean, upper_mean};
    return result;
}

}  // namespace creascore
