// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#include "creascore/scoring.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>
#include <utility>

#include "creascore/errors.hpp"

namespace creascore {

namespace {

constexpr std::array<std::string_view, 8> kAbbreviations = {"e.g.", "i.e.", "etc.", "vs.",
                                                            "Dr.",  "Mr.",  "Ms.",  "cf."};

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && is_space(s[begin])) ++begin;
    while (end > begin && is_space(s[end - 1])) --end;
    return std::string(s.substr(begin, end - begin));
}

void validate_meta(const MetaParameters& meta) {
    if (!(meta.alpha > 0.0) || !(meta.beta > 0.0)) {
        throw InvalidInputError("meta: alpha and beta must be positive");
    }
}

}  // namespace

std::vector<std::string> split_subelements(const std::string& text) {
    if (text.empty()) throw DegenerateInputError("split: empty text");

    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c != '.' && c != '!' && c != '?') continue;
        const bool at_end = i + 1 == text.size();
        if (!at_end && !is_space(text[i + 1])) continue;

        if (c == '.') {
            // The trailing non-space token, terminator included.
            std::size_t token_start = i;
            while (token_start > start && !is_space(text[token_start - 1])) --token_start;
            const std::string_view token(text.data() + token_start, i - token_start + 1);
            if (std::find(kAbbreviations.begin(), kAbbreviations.end(), token) !=
                kAbbreviations.end()) {
                continue;
            }
        }

        std::string segment = trim(std::string_view(text.data() + start, i - start + 1));
        if (!segment.empty()) out.push_back(std::move(segment));
        start = i + 1;
    }
    if (start < text.size()) {
        std::string tail = trim(std::string_view(text.data() + start, text.size() - start));
        if (!tail.empty()) out.push_back(std::move(tail));
    }
    if (out.empty()) throw DegenerateInputError("split: text has no content");
    return out;
}

double transformation_entropy(std::span<const double> coefficients,
                              std::span<const std::size_t> group_of,
                              std::size_t premise_count) {
    if (premise_count < 2) {
        throw InvalidInputError("entropy: need at least 2 premises, got " +
                                std::to_string(premise_count));
    }
    if (coefficients.size() != group_of.size()) {
        throw InvalidInputError("entropy: coefficient count does not match grouping");
    }

    std::vector<double> mass(premise_count, 0.0);
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
        const double c = coefficients[i];
        if (!std::isfinite(c)) throw InvalidInputError("entropy: non-finite coefficient");
        if (c < 0.0) throw InvalidInputError("entropy: negative coefficient");
        if (group_of[i] >= premise_count) {
            throw InvalidInputError("entropy: column mapped to premise out of range");
        }
        mass[group_of[i]] += c;
    }

    double total = 0.0;
    for (double m : mass) total += m;
    if (total == 0.0) return 0.0;  // no synthesis

    double h = 0.0;
    for (double m : mass) {
        const double q = m / total;
        if (q > 0.0) h -= q * std::log(q);
    }
    double t = h / std::log(static_cast<double>(premise_count));
    if (t > 1.0) t = 1.0;  // fp overshoot
    if (t <= 0.0) t = 0.0;
    return t;
}

double combine(double novelty, double transformation, const MetaParameters& meta) {
    validate_meta(meta);
    if (novelty < 0.0 || novelty > 1.0 || transformation < 0.0 || transformation > 1.0) {
        throw InvalidInputError("combine: N and T must lie in [0, 1]");
    }
    return std::pow(novelty, meta.alpha) * std::pow(transformation, meta.beta);
}

double aggregate_subscores(std::span<const double> values, Aggregation mode) {
    if (values.empty()) throw InvalidInputError("aggregate: empty value list");
    if (mode == Aggregation::Max) {
        double best = values[0];
        for (double v : values) best = std::max(best, v);
        return best;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

ScoreBreakdown score_response(const Activity& activity, const ResponseDoc& response,
                              Embedder& embedder, const MetaParameters& meta) {
    validate_meta(meta);
    if (response.activity_id != activity.activity_id) {
        throw InvalidInputError("score: response '" + response.response_id +
                                "' targets activity '" + response.activity_id + "', not '" +
                                activity.activity_id + "'");
    }
    if (activity.premises.size() < 2) {
        throw InvalidInputError("score: activity '" + activity.activity_id +
                                "' has fewer than 2 premises");
    }
    if (response.text.empty()) {
        throw InvalidInputError("score: response '" + response.response_id + "' has empty text");
    }

    const std::size_t premise_count = activity.premises.size();

    std::vector<std::string> column_texts;
    std::vector<std::size_t> group_of;
    if (meta.granularity == Granularity::Element) {
        for (std::size_t j = 0; j < premise_count; ++j) {
            column_texts.push_back(activity.premises[j].text);
            group_of.push_back(j);
        }
    } else {
        for (std::size_t j = 0; j < premise_count; ++j) {
            for (auto& sub : split_subelements(activity.premises[j].text)) {
                column_texts.push_back(std::move(sub));
                group_of.push_back(j);
            }
        }
    }

    std::vector<std::string> element_texts;
    if (meta.granularity == Granularity::Element) {
        element_texts.push_back(response.text);
    } else if (!response.subelements.empty()) {
        element_texts = response.subelements;
    } else {
        element_texts = split_subelements(response.text);
    }

    std::vector<std::string> batch = column_texts;
    batch.insert(batch.end(), element_texts.begin(), element_texts.end());
    const auto vectors = embedder.embed(batch);

    std::vector<EmbeddingVector> columns(vectors.begin(),
                                         vectors.begin() + static_cast<std::ptrdiff_t>(
                                                               column_texts.size()));
    const PremiseMatrix premises =
        PremiseMatrix::build(std::move(columns), group_of, premise_count);

    ScoreBreakdown breakdown;
    breakdown.meta = meta;

    std::vector<double> n_values, t_values, c_values;
    for (std::size_t e = 0; e < element_texts.size(); ++e) {
        const EmbeddingVector& r = vectors[column_texts.size() + e];
        const ConeProjection proj = project_onto_cone(r, premises);
        const double n = novelty(proj, r).value;
        const double t = transformation_entropy(proj.coefficients, premises.group_of,
                                                premise_count);
        const double c = combine(n, t, meta);
        n_values.push_back(n);
        t_values.push_back(t);
        c_values.push_back(c);
        breakdown.per_subelement.push_back(
            SubelementScore{element_texts[e], n, t, c, proj.coefficients});
    }

    breakdown.novelty = aggregate_subscores(n_values, meta.subscore_aggregation);
    breakdown.transformation = aggregate_subscores(t_values, meta.subscore_aggregation);
    breakdown.creativity = aggregate_subscores(c_values, meta.subscore_aggregation);
    return breakdown;
}

}  // namespace creascore
