// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "creascore/embedding.hpp"

namespace creascore {

// One cache record. key is the SHA-256 hex of (model_id, 0x1F, text bytes),
// so identical (model_id, text) always map to the same entry and different
// models never collide.
struct CacheEntry {
    std::string key;
    std::string model_id;
    std::size_t dim = 0;
    std::vector<double> vector;
};

std::string cache_key(const std::string& model_id, const std::string& text);

// Append-only JSONL cache, one CacheEntry object per line; the last entry
// for a key wins. Writes are serialized; reads may proceed concurrently
// with reads.
class EmbeddingCache {
public:
    explicit EmbeddingCache(std::filesystem::path path);

    // Returns the cached vector or nullopt on miss. A hit whose stored dim
    // disagrees with expected_dim raises CacheCorruptionError naming the
    // offending line.
    std::optional<EmbeddingVector> lookup(const std::string& key, std::size_t expected_dim) const;

    void store(const std::string& key, const std::string& model_id, const EmbeddingVector& vec);

    std::size_t size() const;
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    struct Slot {
        CacheEntry entry;
        std::size_t line = 0;
    };

    std::filesystem::path path_;
    std::unordered_map<std::string, Slot> entries_;
    std::size_t lines_ = 0;
    std::ofstream appender_;
    mutable std::shared_mutex mutex_;
};

// Cache-through embedding: returns cached vectors on key hits; embeds,
// stores and returns the rest. Only misses reach the underlying embedder.
std::vector<EmbeddingVector> get_or_embed(const std::vector<std::string>& texts,
                                          Embedder& embedder, EmbeddingCache& cache);

// Embedder adapter routing every call through get_or_embed.
class CachingEmbedder final : public Embedder {
public:
    CachingEmbedder(Embedder& inner, EmbeddingCache& cache) : inner_(inner), cache_(cache) {}

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override {
        return get_or_embed(texts, inner_, cache_);
    }
    const EmbeddingSource& source() const override { return inner_.source(); }

private:
    Embedder& inner_;
    EmbeddingCache& cache_;
};

}  // namespace creascore
