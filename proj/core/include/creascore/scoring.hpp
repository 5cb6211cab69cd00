// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "creascore/cone.hpp"
#include "creascore/embedding.hpp"

namespace creascore {

struct PremiseText {
    std::string id;
    std::string text;
};

// A premise set; the unit a response is scored against.
struct Activity {
    std::string activity_id;
    std::vector<PremiseText> premises;  // >= 2, ids unique within the activity
};

struct ResponseDoc {
    std::string response_id;
    std::string activity_id;
    std::string text;
    std::vector<std::string> subelements;  // derived; split lazily if empty
};

enum class Granularity { Element, Subelement };
enum class Aggregation { Mean, Max };

// Tunable combination parameters: C = N^alpha * T^beta.
struct MetaParameters {
    double alpha = 0.5;
    double beta = 0.5;
    Granularity granularity = Granularity::Element;
    Aggregation subscore_aggregation = Aggregation::Mean;
};

struct SubelementScore {
    std::string text;
    double novelty = 0.0;
    double transformation = 0.0;
    double creativity = 0.0;
    std::vector<double> coefficients;
};

// The main output record: novelty N, transformation T, creativity C plus
// per-subelement detail and the parameters that produced them.
struct ScoreBreakdown {
    double novelty = 0.0;
    double transformation = 0.0;
    double creativity = 0.0;
    std::vector<SubelementScore> per_subelement;
    MetaParameters meta;
};

// Rule-based sentence split: boundaries at '.', '!' or '?' followed by
// whitespace or end of text, except immediately after one of the pinned
// abbreviations "e.g.", "i.e.", "etc.", "vs.", "Dr.", "Mr.", "Ms.", "cf.".
// Segments are trimmed and empty ones dropped; a text with no terminator is
// a single subelement.
std::vector<std::string> split_subelements(const std::string& text);

// Normalized entropy of per-premise projection mass. Coefficients are summed
// per premise via group_of; with q_j the mass fractions,
// T = -sum q_j ln q_j / ln k. Zero total mass means no synthesis and yields
// 0 by convention.
double transformation_entropy(std::span<const double> coefficients,
                              std::span<const std::size_t> group_of, std::size_t premise_count);

// C = N^alpha * T^beta with 0^positive = 0.
double combine(double novelty, double transformation, const MetaParameters& meta);

double aggregate_subscores(std::span<const double> values, Aggregation mode);

// Scores one response against an activity. Element granularity embeds whole
// premises and the whole response and runs a single projection. Subelement
// granularity projects each response subelement onto the cone of premise
// subelements grouped by parent premise, then aggregates the per-subelement
// N, T, C independently (top-level C is not recombined from aggregated N, T).
ScoreBreakdown score_response(const Activity& activity, const ResponseDoc& response,
                              Embedder& embedder, const MetaParameters& meta);

}  // namespace creascore
