// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace creascore {

// Unit-norm dense vector representing a text or text subelement.
struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dim() const noexcept { return values.size(); }
};

// L2-normalizes a raw vector. Requires dim >= 2 and finite components;
// a zero vector is a degenerate input.
EmbeddingVector normalize(const std::vector<double>& raw);

double dot(const EmbeddingVector& a, const EmbeddingVector& b);

enum class SourceKind { DeterministicTest, RemoteHttp };

// Where embeddings come from. model_id participates in cache keys, so two
// sources with different model_id never share cache entries.
struct EmbeddingSource {
    SourceKind kind = SourceKind::DeterministicTest;
    std::string model_id;
    std::string endpoint;  // remote-http only
    std::size_t dim = 0;
};

// Batch embedding interface. Implementations return unit-norm vectors
// aligned 1:1 with the input texts.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
    virtual const EmbeddingSource& source() const = 0;
};

// Deterministic offline embedding: a pure function of (text, dim).
//
// Pinned algorithm: ASCII-lowercase the text and split it into maximal runs
// of [0-9a-z] (every other byte separates tokens). Each token is hashed with
// FNV-1a 64; component j of its vector is splitmix64(seed ^ j) mapped
// linearly onto [-1, 1). Token vectors are summed and the sum normalized,
// so the result is an order-free bag-of-tokens fingerprint. It carries no
// semantic signal and exists only so pipelines and tests reproduce exactly
// without a model.
EmbeddingVector embed_text_deterministic(const std::string& text, std::size_t dim);

// Mixing primitives behind the deterministic embedder, exposed for tests.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t splitmix64(std::uint64_t x);

class DeterministicEmbedder final : public Embedder {
public:
    explicit DeterministicEmbedder(EmbeddingSource source);

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    const EmbeddingSource& source() const override { return source_; }

private:
    EmbeddingSource source_;
};

// Serves a fixed text -> vector table. Used to memoize batch lookups before
// parallel scoring and as the fixture embedder in tests. Unknown texts are
// invalid inputs.
class FixedEmbedder final : public Embedder {
public:
    FixedEmbedder(EmbeddingSource source, std::unordered_map<std::string, EmbeddingVector> table);

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    const EmbeddingSource& source() const override { return source_; }

private:
    EmbeddingSource source_;
    std::unordered_map<std::string, EmbeddingVector> table_;
};

// Instantiates the embedder matching source.kind. Remote sources read the
// bearer token from the EMBED_API_KEY environment variable.
std::unique_ptr<Embedder> make_embedder(const EmbeddingSource& source);

}  // namespace creascore
