// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#include "creascore/embedding.hpp"

#include <cmath>
#include <cstdlib>
#include <utility>

#include "creascore/embed_remote.hpp"
#include "creascore/errors.hpp"

namespace creascore {

EmbeddingVector normalize(const std::vector<double>& raw) {
    if (raw.size() < 2) {
        throw InvalidInputError("normalize: need dim >= 2, got " + std::to_string(raw.size()));
    }
    double sumsq = 0.0;
    for (double v : raw) {
        if (!std::isfinite(v)) throw InvalidInputError("normalize: non-finite component");
        sumsq += v * v;
    }
    if (sumsq == 0.0) throw DegenerateInputError("normalize: zero vector");
    if (!std::isfinite(sumsq)) throw InvalidInputError("normalize: norm overflow");

    const double inv = 1.0 / std::sqrt(sumsq);
    EmbeddingVector out;
    out.values.reserve(raw.size());
    for (double v : raw) out.values.push_back(v * inv);
    return out;
}

double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw InvalidInputError("dot: dimension mismatch " + std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += a.values[i] * b.values[i];
    return s;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    std::uint64_t z = x + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

namespace {

// top 53 bits -> [0, 1)
double unit_interval(std::uint64_t u) { return static_cast<double>(u >> 11) * 0x1.0p-53; }

bool ascii_alnum(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool whitespace_only(const std::string& s) {
    return s.find_first_not_of(" \t\r\n\f\v") == std::string::npos;
}

}  // namespace

EmbeddingVector embed_text_deterministic(const std::string& text, std::size_t dim) {
    if (dim < 2) throw InvalidInputError("embed: dim must be >= 2");
    if (text.empty() || whitespace_only(text)) {
        throw DegenerateInputError("embed: empty or whitespace-only text");
    }

    std::vector<double> acc(dim, 0.0);
    std::string token;
    bool any_token = false;
    auto flush = [&] {
        if (token.empty()) return;
        any_token = true;
        const std::uint64_t seed = fnv1a64(token);
        for (std::size_t j = 0; j < dim; ++j) {
            const std::uint64_t u = splitmix64(seed ^ static_cast<std::uint64_t>(j));
            acc[j] += -1.0 + 2.0 * unit_interval(u);
        }
        token.clear();
    };
    for (unsigned char c : text) {
        if (ascii_alnum(c)) {
            token.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
        } else {
            flush();
        }
    }
    flush();
    if (!any_token) {
        throw DegenerateInputError("embed: no tokens in text \"" + text + "\"");
    }
    try {
        return normalize(acc);
    } catch (const DegenerateInputError&) {
        throw DegenerateInputError("embed: zero-norm embedding for text \"" + text + "\"");
    }
}

DeterministicEmbedder::DeterministicEmbedder(EmbeddingSource source) : source_(std::move(source)) {
    if (source_.dim < 2) throw InvalidInputError("embedder: dim must be >= 2");
}

std::vector<EmbeddingVector> DeterministicEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_text_deterministic(t, source_.dim));
    return out;
}

FixedEmbedder::FixedEmbedder(EmbeddingSource source,
                             std::unordered_map<std::string, EmbeddingVector> table)
    : source_(std::move(source)), table_(std::move(table)) {
    for (const auto& [text, vec] : table_) {
        if (vec.dim() != source_.dim) {
            throw InvalidInputError("fixed embedder: vector for \"" + text + "\" has dim " +
                                    std::to_string(vec.dim()) + ", source says " +
                                    std::to_string(source_.dim));
        }
        double sumsq = 0.0;
        for (double v : vec.values) sumsq += v * v;
        if (std::abs(std::sqrt(sumsq) - 1.0) > 1e-6) {
            throw InvalidInputError("fixed embedder: vector for \"" + text +
                                    "\" is not unit norm");
        }
    }
}

std::vector<EmbeddingVector> FixedEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        auto it = table_.find(t);
        if (it == table_.end()) {
            throw InvalidInputError("fixed embedder: no vector for text \"" + t + "\"");
        }
        out.push_back(it->second);
    }
    return out;
}

std::unique_ptr<Embedder> make_embedder(const EmbeddingSource& source) {
    switch (source.kind) {
        case SourceKind::DeterministicTest:
            return std::make_unique<DeterministicEmbedder>(source);
        case SourceKind::RemoteHttp: {
            const char* key = std::getenv("EMBED_API_KEY");
            return std::make_unique<RemoteEmbedder>(source, key ? key : "");
        }
    }
    throw InvalidInputError("make_embedder: unknown source kind");
}

}  // namespace creascore
