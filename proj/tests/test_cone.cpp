// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "creascore/cone.hpp"
#include "creascore/errors.hpp"

#include "support/fixtures.hpp"

using namespace creascore;
using fixtures::random_orthogonal;
using fixtures::random_premises;
using fixtures::random_unit;
using fixtures::rotate;
using fixtures::unit;

namespace {

std::vector<double> kkt_gradient(const ConeProjection& proj, const EmbeddingVector& r,
                                 const PremiseMatrix& premises) {
    // g = P^T (P c - r)
    const std::size_t d = premises.dim();
    std::vector<double> pc(d, 0.0);
    for (std::size_t j = 0; j < premises.k(); ++j) {
        for (std::size_t i = 0; i < d; ++i) {
            pc[i] += proj.coefficients[j] * premises.columns[j].values[i];
        }
    }
    std::vector<double> g(premises.k(), 0.0);
    for (std::size_t j = 0; j < premises.k(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            s += premises.columns[j].values[i] * (pc[i] - r.values[i]);
        }
        g[j] = s;
    }
    return g;
}

}  // namespace

TEST_CASE("a response equal to a premise projects with zero residual") {
    const auto premises = PremiseMatrix::ungrouped({unit({1, 0, 0}), unit({0, 1, 0})});
    const auto r = unit({1, 0, 0});
    const auto proj = project_onto_cone(r, premises);
    CHECK(proj.converged);
    CHECK(proj.coefficients[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(proj.coefficients[1] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(proj.residual_norm <= 1e-9);
    CHECK(novelty(proj, r).value <= 1e-9);
}

TEST_CASE("an orthogonal response keeps the zero solution") {
    const auto premises = PremiseMatrix::ungrouped({unit({1, 0, 0}), unit({0, 1, 0})});
    const auto r = unit({0, 0, 1});
    const auto proj = project_onto_cone(r, premises);
    CHECK(proj.converged);
    CHECK(proj.coefficients == std::vector<double>{0.0, 0.0});
    CHECK(proj.residual_norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(novelty(proj, r).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("worked 2-d example: response outside the cone") {
    const auto premises = PremiseMatrix::ungrouped({unit({1, 0}), unit({0.6, 0.8})});
    const auto r = unit({0, 1});
    const auto proj = project_onto_cone(r, premises);
    CHECK(proj.converged);
    CHECK(proj.coefficients[0] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(proj.coefficients[1] == doctest::Approx(0.8).epsilon(1e-10));
    CHECK(proj.projection[0] == doctest::Approx(0.48).epsilon(1e-10));
    CHECK(proj.projection[1] == doctest::Approx(0.64).epsilon(1e-10));
    CHECK(proj.residual_norm == doctest::Approx(0.6).epsilon(1e-10));
    CHECK(novelty(proj, r).value == doctest::Approx(0.6).epsilon(1e-10));

    // The exhaustive oracle agrees.
    const auto reference = oracle_project(r, premises);
    CHECK(reference.residual_norm == doctest::Approx(0.6).epsilon(1e-10));
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(proj.coefficients[i] == doctest::Approx(reference.coefficients[i]).epsilon(1e-6));
    }
}

TEST_CASE("worked 3-d example: one active premise") {
    const auto premises = PremiseMatrix::ungrouped({unit({1, 0, 0}), unit({0, 1, 0})});
    const auto r = unit({1, -1, 0});
    const auto proj = project_onto_cone(r, premises);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(proj.coefficients[0] == doctest::Approx(inv_sqrt2).epsilon(1e-10));
    CHECK(proj.coefficients[1] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(proj.residual_norm == doctest::Approx(inv_sqrt2).epsilon(1e-10));
}

TEST_CASE("novelty requires a unit response and tolerates tiny overshoot") {
    const auto premises = PremiseMatrix::ungrouped({unit({1, 0}), unit({0, 1})});
    EmbeddingVector not_unit;
    not_unit.values = {2.0, 0.0};
    ConeProjection proj;
    proj.residual_norm = 0.5;
    CHECK_THROWS_AS(novelty(proj, not_unit), InvalidInputError);

    const auto r = unit({1, 0});
    proj.residual_norm = 1.0 + 5e-10;
    CHECK(novelty(proj, r).value == 1.0);
    proj.residual_norm = 1.1;
    CHECK_THROWS_AS(novelty(proj, r), InvalidInputError);
}

TEST_CASE("premise matrix validation") {
    CHECK_THROWS_AS(PremiseMatrix::ungrouped({unit({1, 0})}), InvalidInputError);
    CHECK_THROWS_AS(PremiseMatrix::ungrouped({unit({1, 0}), unit({1, 0, 0})}),
                    InvalidInputError);
    EmbeddingVector not_unit;
    not_unit.values = {2.0, 0.0};
    CHECK_THROWS_AS(PremiseMatrix::ungrouped({not_unit, unit({0, 1})}), InvalidInputError);
    // group indices must cover every premise
    CHECK_THROWS_AS(PremiseMatrix::build({unit({1, 0}), unit({0, 1})}, {0, 0}, 2),
                    InvalidInputError);
    CHECK_THROWS_AS(PremiseMatrix::build({unit({1, 0}), unit({0, 1})}, {0, 3}, 2),
                    InvalidInputError);

    const auto premises = PremiseMatrix::ungrouped({unit({1, 0}), unit({0, 1})});
    CHECK_THROWS_AS(project_onto_cone(unit({1, 0, 0}), premises), InvalidInputError);
    CHECK_THROWS_AS(project_onto_cone(unit({1, 0}), premises, 0.0), InvalidInputError);
}

TEST_CASE("oracle scope is capped at k = 12") {
    std::mt19937_64 rng(11);
    const auto premises = random_premises(rng, 13, 16);
    CHECK_THROWS_AS(oracle_project(random_unit(rng, 16), premises), OracleScopeError);
}

TEST_CASE("orthogonal premises decouple: single-support instance") {
    const auto premises =
        PremiseMatrix::ungrouped({unit({1, 0, 0, 0}), unit({0, 1, 0, 0}), unit({0, 0, 1, 0})});
    const auto r = unit({0.0, 0.6, 0.0, 0.8});
    const auto reference = oracle_project(r, premises);
    CHECK(reference.coefficients[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(reference.coefficients[1] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(reference.coefficients[2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("active set matches the exhaustive oracle on random instances") {
    // Coefficients are compared on instances with k <= d, where the
    // minimizer is generically unique; with more columns than dimensions an
    // interior response admits many coefficient vectors and only the
    // residual is determined.
    std::mt19937_64 rng(2001);
    std::uniform_int_distribution<std::size_t> k_of(2, 5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = k_of(rng);
        const std::size_t d = std::uniform_int_distribution<std::size_t>(k, 8)(rng);
        const auto premises = random_premises(rng, k, d);
        const auto r = random_unit(rng, d);
        const auto fast = project_onto_cone(r, premises);
        const auto slow = oracle_project(r, premises);
        REQUIRE(fast.converged);
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(std::abs(fast.coefficients[i] - slow.coefficients[i]) <= 1e-6);
        }
        CHECK(std::abs(fast.residual_norm - slow.residual_norm) <= 1e-9);
    }
}

TEST_CASE("with more columns than dimensions the residual still matches the oracle") {
    std::mt19937_64 rng(2002);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t d = std::uniform_int_distribution<std::size_t>(2, 3)(rng);
        const std::size_t k = std::uniform_int_distribution<std::size_t>(d + 1, 6)(rng);
        const auto premises = random_premises(rng, k, d);
        const auto r = random_unit(rng, d);
        const auto fast = project_onto_cone(r, premises);
        const auto slow = oracle_project(r, premises);
        REQUIRE(fast.converged);
        CHECK(std::abs(fast.residual_norm - slow.residual_norm) <= 1e-9);
        for (double c : fast.coefficients) CHECK(c >= 0.0);
    }
}

TEST_CASE("KKT conditions hold at convergence") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::size_t> dim_of(2, 16);
    std::uniform_int_distribution<std::size_t> k_of(2, 6);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = dim_of(rng);
        const std::size_t k = k_of(rng);
        const auto premises = random_premises(rng, k, d);
        const auto r = random_unit(rng, d);
        const auto proj = project_onto_cone(r, premises);
        REQUIRE(proj.converged);
        const auto g = kkt_gradient(proj, r, premises);
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(g[i] >= -1e-8);
            CHECK(std::abs(proj.coefficients[i] * g[i]) <= 1e-8);
            CHECK(proj.coefficients[i] >= 0.0);
        }
        CHECK(proj.residual_norm <= 1.0 + 1e-12);

        // residual_norm must match a recomputation from the returned
        // projection vector.
        double recomputed = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double diff = r.values[i] - proj.projection[i];
            recomputed += diff * diff;
        }
        CHECK(std::abs(proj.residual_norm - std::sqrt(recomputed)) <= 1e-9);
    }
}

TEST_CASE("appending a column never increases novelty") {
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<std::size_t> dim_of(3, 12);
    std::uniform_int_distribution<std::size_t> k_of(2, 5);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = dim_of(rng);
        const std::size_t k = k_of(rng);
        auto columns = random_premises(rng, k, d).columns;
        const auto r = random_unit(rng, d);
        const auto before = project_onto_cone(r, PremiseMatrix::ungrouped(columns));

        columns.push_back(random_unit(rng, d));
        const auto after = project_onto_cone(r, PremiseMatrix::ungrouped(columns));
        CHECK(novelty(after, r).value <= novelty(before, r).value + 1e-9);
    }
}

TEST_CASE("projection is rotation invariant") {
    std::mt19937_64 rng(424242);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t d = 6;
        const std::size_t k = 4;
        const auto premises = random_premises(rng, k, d);
        const auto r = random_unit(rng, d);
        const auto base = project_onto_cone(r, premises);

        const auto q = random_orthogonal(rng, d);
        std::vector<EmbeddingVector> rotated_columns;
        for (const auto& col : premises.columns) rotated_columns.push_back(rotate(q, col));
        const auto rotated =
            project_onto_cone(rotate(q, r), PremiseMatrix::ungrouped(rotated_columns));

        CHECK(std::abs(base.residual_norm - rotated.residual_norm) <= 1e-8);
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(std::abs(base.coefficients[i] - rotated.coefficients[i]) <= 1e-8);
        }
    }
}

TEST_CASE("permuting premise columns permutes coefficients bit-exactly") {
    std::mt19937_64 rng(9090);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t d = 7;
        const std::size_t k = 5;
        const auto premises = random_premises(rng, k, d);
        const auto r = random_unit(rng, d);
        const auto base = project_onto_cone(r, premises);

        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);

        std::vector<EmbeddingVector> shuffled(k);
        for (std::size_t i = 0; i < k; ++i) shuffled[i] = premises.columns[perm[i]];
        const auto permuted = project_onto_cone(r, PremiseMatrix::ungrouped(shuffled));

        CHECK(permuted.residual_norm == base.residual_norm);
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(permuted.coefficients[i] == base.coefficients[perm[i]]);
        }
    }
}

TEST_CASE("duplicate premise columns keep the residual unique") {
    const auto p = unit({0.6, 0.8, 0.0});
    const auto q = unit({0.0, 0.0, 1.0});
    const auto premises = PremiseMatrix::ungrouped({p, p, q});
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto r = random_unit(rng, 3);
        const auto fast = project_onto_cone(r, premises);
        const auto slow = oracle_project(r, premises);
        REQUIRE(fast.converged);
        CHECK(std::abs(fast.residual_norm - slow.residual_norm) <= 1e-9);
        // Mass split between duplicates is ambiguous; their sum is not.
        const double fast_mass = fast.coefficients[0] + fast.coefficients[1];
        const double slow_mass = slow.coefficients[0] + slow.coefficients[1];
        CHECK(std::abs(fast_mass - slow_mass) <= 1e-6);
        CHECK(std::abs(fast.coefficients[2] - slow.coefficients[2]) <= 1e-6);
    }
}
