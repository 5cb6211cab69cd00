// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "creascore/cone.hpp"
#include "creascore/embedding.hpp"

namespace fixtures {

inline creascore::EmbeddingVector unit(std::vector<double> v) { return creascore::normalize(v); }

inline std::vector<double> random_raw(std::mt19937_64& rng, std::size_t dim) {
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    std::vector<double> v(dim);
    for (auto& x : v) x = uniform(rng);
    return v;
}

inline creascore::EmbeddingVector random_unit(std::mt19937_64& rng, std::size_t dim) {
    for (;;) {
        auto raw = random_raw(rng, dim);
        double sumsq = 0.0;
        for (double x : raw) sumsq += x * x;
        if (sumsq > 1e-12) return creascore::normalize(raw);
    }
}

// Orthonormalizes a random Gaussian matrix by modified Gram-Schmidt.
// Returns Q as rows; apply with rotate().
inline std::vector<std::vector<double>> random_orthogonal(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> rows(dim, std::vector<double>(dim));
    for (auto& row : rows) {
        for (auto& x : row) x = gauss(rng);
    }
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            double proj = 0.0;
            for (std::size_t c = 0; c < dim; ++c) proj += rows[i][c] * rows[j][c];
            for (std::size_t c = 0; c < dim; ++c) rows[i][c] -= proj * rows[j][c];
        }
        double norm = 0.0;
        for (double x : rows[i]) norm += x * x;
        norm = std::sqrt(norm);
        for (auto& x : rows[i]) x /= norm;
    }
    return rows;
}

inline creascore::EmbeddingVector rotate(const std::vector<std::vector<double>>& q,
                                         const creascore::EmbeddingVector& v) {
    creascore::EmbeddingVector out;
    out.values.resize(v.dim(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) s += q[i][j] * v.values[j];
        out.values[i] = s;
    }
    return out;
}

inline creascore::PremiseMatrix random_premises(std::mt19937_64& rng, std::size_t k,
                                                std::size_t dim) {
    std::vector<creascore::EmbeddingVector> columns;
    columns.reserve(k);
    for (std::size_t i = 0; i < k; ++i) columns.push_back(random_unit(rng, dim));
    return creascore::PremiseMatrix::ungrouped(std::move(columns));
}

// Fixture embedder over an explicit text -> vector table.
inline creascore::FixedEmbedder table_embedder(
    std::size_t dim, std::unordered_map<std::string, creascore::EmbeddingVector> table,
    const std::string& model_id = "fixture") {
    creascore::EmbeddingSource source;
    source.kind = creascore::SourceKind::DeterministicTest;
    source.model_id = model_id;
    source.dim = dim;
    return creascore::FixedEmbedder(source, std::move(table));
}

}  // namespace fixtures
