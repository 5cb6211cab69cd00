// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#include "creascore/embed_cache.hpp"

#include <cmath>
#include <mutex>
#include <utility>

#include <openssl/evp.h>

#include "json.hpp"

#include "creascore/errors.hpp"
#include "creascore/jsonfmt.hpp"

namespace creascore {

std::string cache_key(const std::string& model_id, const std::string& text) {
    std::string buf;
    buf.reserve(model_id.size() + 1 + text.size());
    buf += model_id;
    buf += '\x1f';
    buf += text;

    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(buf.data(), buf.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("cache_key: SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

EmbeddingCache::EmbeddingCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in.is_open()) return;  // fresh cache; file appears on first store

    std::string line;
    while (std::getline(in, line)) {
        ++lines_;
        auto parsed = nlohmann::json::parse(line, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object()) {
            throw CacheCorruptionError(lines_, "not a JSON object");
        }
        if (!parsed.contains("key") || !parsed["key"].is_string() ||
            !parsed.contains("model_id") || !parsed["model_id"].is_string() ||
            !parsed.contains("dim") || !parsed["dim"].is_number_unsigned() ||
            !parsed.contains("vector") || !parsed["vector"].is_array()) {
            throw CacheCorruptionError(lines_, "missing or mistyped field");
        }
        CacheEntry entry;
        entry.key = parsed["key"].get<std::string>();
        entry.model_id = parsed["model_id"].get<std::string>();
        entry.dim = parsed["dim"].get<std::size_t>();
        entry.vector.reserve(parsed["vector"].size());
        double sumsq = 0.0;
        for (const auto& v : parsed["vector"]) {
            if (!v.is_number()) throw CacheCorruptionError(lines_, "non-numeric vector component");
            const double x = v.get<double>();
            if (!std::isfinite(x)) throw CacheCorruptionError(lines_, "non-finite vector component");
            entry.vector.push_back(x);
            sumsq += x * x;
        }
        if (entry.vector.size() != entry.dim) {
            throw CacheCorruptionError(lines_, "vector length " +
                                                   std::to_string(entry.vector.size()) +
                                                   " does not match dim " +
                                                   std::to_string(entry.dim));
        }
        if (std::abs(std::sqrt(sumsq) - 1.0) > 1e-6) {
            throw CacheCorruptionError(lines_, "stored vector is not unit norm");
        }
        const std::string key = entry.key;
        entries_[key] = Slot{std::move(entry), lines_};  // last entry for a key wins
    }
}

std::optional<EmbeddingVector> EmbeddingCache::lookup(const std::string& key,
                                                      std::size_t expected_dim) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    const auto& slot = it->second;
    if (slot.entry.dim != expected_dim) {
        throw CacheCorruptionError(slot.line, "entry dim " + std::to_string(slot.entry.dim) +
                                                  " does not match source dim " +
                                                  std::to_string(expected_dim));
    }
    return EmbeddingVector{slot.entry.vector};
}

void EmbeddingCache::store(const std::string& key, const std::string& model_id,
                           const EmbeddingVector& vec) {
    std::unique_lock lock(mutex_);
    if (!appender_.is_open()) {
        if (path_.has_parent_path()) {
            std::filesystem::create_directories(path_.parent_path());
        }
        appender_.open(path_, std::ios::app);
        if (!appender_.is_open()) {
            throw Error("cache: cannot open " + path_.string() + " for append");
        }
    }

    std::string line = "{\"key\":\"" + json_escape(key) + "\",\"model_id\":\"" +
                       json_escape(model_id) + "\",\"dim\":" + std::to_string(vec.dim()) +
                       ",\"vector\":[";
    for (std::size_t i = 0; i < vec.dim(); ++i) {
        if (i) line += ',';
        line += format_double(vec.values[i]);
    }
    line += "]}";
    appender_ << line << '\n';
    appender_.flush();
    ++lines_;

    CacheEntry entry{key, model_id, vec.dim(), vec.values};
    entries_[key] = Slot{std::move(entry), lines_};
}

std::size_t EmbeddingCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::vector<EmbeddingVector> get_or_embed(const std::vector<std::string>& texts,
                                          Embedder& embedder, EmbeddingCache& cache) {
    const auto& src = embedder.source();
    std::vector<EmbeddingVector> out(texts.size());

    std::vector<std::string> keys(texts.size());
    std::vector<std::size_t> miss_indices;
    std::vector<std::string> miss_texts;
    std::unordered_map<std::string, std::size_t> pending;  // key -> position in miss_texts

    for (std::size_t i = 0; i < texts.size(); ++i) {
        keys[i] = cache_key(src.model_id, texts[i]);
        if (auto hit = cache.lookup(keys[i], src.dim)) {
            out[i] = std::move(*hit);
        } else {
            miss_indices.push_back(i);
            auto [it, inserted] = pending.emplace(keys[i], miss_texts.size());
            if (inserted) miss_texts.push_back(texts[i]);
        }
    }
    if (miss_texts.empty()) return out;

    auto embedded = embedder.embed(miss_texts);
    if (embedded.size() != miss_texts.size()) {
        throw ProtocolError("embedder returned " + std::to_string(embedded.size()) +
                            " vectors for " + std::to_string(miss_texts.size()) + " texts");
    }
    for (std::size_t j = 0; j < miss_texts.size(); ++j) {
        cache.store(cache_key(src.model_id, miss_texts[j]), src.model_id, embedded[j]);
    }
    for (std::size_t i : miss_indices) {
        out[i] = embedded[pending.at(keys[i])];
    }
    return out;
}

}  // namespace creascore
