// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "creascore/cone.hpp"
#include "creascore/distribution.hpp"
#include "creascore/embedding.hpp"
#include "creascore/evaluation.hpp"
#include "creascore/scoring.hpp"

#include "support/fixtures.hpp"

using namespace creascore;

namespace {

void BM_ProjectOntoCone(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    const auto dim = static_cast<std::size_t>(state.range(1));
    std::mt19937_64 rng(42);
    const auto premises = fixtures::random_premises(rng, k, dim);
    const auto r = fixtures::random_unit(rng, dim);
    for (auto _ : state) {
        auto proj = project_onto_cone(r, premises);
        benchmark::DoNotOptimize(proj.residual_norm);
    }
}
BENCHMARK(BM_ProjectOntoCone)->Args({4, 64})->Args({8, 256})->Args({16, 1024})->Args({32, 1536});

void BM_OracleProject(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(43);
    const auto premises = fixtures::random_premises(rng, k, 16);
    const auto r = fixtures::random_unit(rng, 16);
    for (auto _ : state) {
        auto proj = oracle_project(r, premises);
        benchmark::DoNotOptimize(proj.residual_norm);
    }
}
BENCHMARK(BM_OracleProject)->Arg(4)->Arg(8)->Arg(10);

void BM_DeterministicEmbed(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    const std::string text =
        "Print porous breakwaters from low-carbon slurry so larvae settle inside them.";
    for (auto _ : state) {
        auto v = embed_text_deterministic(text, dim);
        benchmark::DoNotOptimize(v.values.data());
    }
}
BENCHMARK(BM_DeterministicEmbed)->Arg(64)->Arg(384)->Arg(1536);

void BM_KendallTau(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(44);
    std::uniform_int_distribution<int> value(0, 20);
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        pairs.emplace_back(static_cast<double>(value(rng)), static_cast<double>(value(rng)));
    }
    for (auto _ : state) {
        auto tau = kendall_tau(pairs);
        benchmark::DoNotOptimize(tau);
    }
    state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_KendallTau)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_TransformationEntropy(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(45);
    std::uniform_real_distribution<double> mass(0.0, 1.0);
    std::vector<double> coefficients(k);
    std::vector<std::size_t> groups(k);
    for (std::size_t i = 0; i < k; ++i) {
        coefficients[i] = mass(rng);
        groups[i] = i;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(transformation_entropy(coefficients, groups, k));
    }
}
BENCHMARK(BM_TransformationEntropy)->Arg(4)->Arg(32)->Arg(256);

void BM_BimodalityCoefficient(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(46);
    std::normal_distribution<double> gauss(0.5, 0.15);
    std::vector<double> scores(n);
    for (auto& s : scores) s = gauss(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(bimodality_coefficient(scores).coefficient);
    }
}
BENCHMARK(BM_BimodalityCoefficient)->Arg(100)->Arg(10000);

void BM_Distinctiveness(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(47);
    std::vector<std::pair<std::string, EmbeddingVector>> population;
    for (std::size_t i = 0; i < n; ++i) {
        population.emplace_back("r" + std::to_string(i), fixtures::random_unit(rng, 64));
    }
    for (auto _ : state) {
        auto result = distinctiveness(population);
        benchmark::DoNotOptimize(result.per_response.data());
    }
}
BENCHMARK(BM_Distinctiveness)->Arg(16)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
