// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "creascore/embedding.hpp"

namespace creascore {

// Premise columns spanning the cone. Columns may be whole premises or
// premise subelements; group_of maps each column to its parent premise.
struct PremiseMatrix {
    std::vector<EmbeddingVector> columns;  // k >= 2 unit columns of equal dim
    std::vector<std::size_t> group_of;     // column index -> premise index
    std::size_t premise_count = 0;

    std::size_t k() const noexcept { return columns.size(); }
    std::size_t dim() const noexcept { return columns.empty() ? 0 : columns.front().dim(); }

    // Validates and builds. Every column must map to a premise index in
    // [0, premise_count) and every premise must own at least one column.
    static PremiseMatrix build(std::vector<EmbeddingVector> columns,
                               std::vector<std::size_t> group_of, std::size_t premise_count);

    // One column per premise, identity grouping.
    static PremiseMatrix ungrouped(std::vector<EmbeddingVector> columns);
};

// Projection of a response vector onto the conical hull of the premise
// columns: the minimizer of ||r - sum c_i p_i|| subject to c_i >= 0.
struct ConeProjection {
    std::vector<double> coefficients;  // one per column, all >= 0
    std::vector<double> projection;    // sum c_i p_i
    double residual_norm = 0.0;
    bool converged = false;
    int iterations = 0;  // least-squares subproblem solves
};

// Active-set nonnegative least squares, Lawson-Hanson style: start with an
// empty support, repeatedly add the most-violating column, solve the
// unconstrained least-squares subproblem on the support (pseudoinverse
// solve, singular values below 1e-12 dropped) and step back to feasibility
// when coefficients go negative. Terminates when every reduced gradient is
// >= -tol; returns converged=false if the 50*k iteration cap is hit first.
//
// Column reductions run in a content-determined order, so permuting the
// premise columns permutes the coefficients bit-exactly.
ConeProjection project_onto_cone(const EmbeddingVector& r, const PremiseMatrix& premises,
                                 double tol = 1e-10);

struct NoveltyScore {
    double value = 0.0;  // in [0, 1]
};

// Novelty of a unit-norm response: the residual norm left by its cone
// projection, clamped only against <= 1e-9 floating-point overshoot.
NoveltyScore novelty(const ConeProjection& projection, const EmbeddingVector& r);

// Exhaustive reference minimizer: solves the unconstrained least-squares
// problem on each of the 2^k supports and keeps the feasible minimum.
// Exponential, limited to k <= 12.
ConeProjection oracle_project(const EmbeddingVector& r, const PremiseMatrix& premises);

}  // namespace creascore
