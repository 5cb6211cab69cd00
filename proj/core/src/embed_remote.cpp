// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#include "creascore/embed_remote.hpp"

#include <atomic>
#include <thread>
#include <utility>

#include "httplib.h"
#include "json.hpp"

#include "creascore/errors.hpp"

namespace creascore {

namespace {

// Splits "http://host:port/some/path" into the client base and the path.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw InvalidInputError("remote embedder: endpoint must include a scheme: " + endpoint);
    }
    const auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

bool transient_status(int status) { return status == 429 || status >= 500; }

}  // namespace

std::vector<EmbeddingVector> fetch_remote_embeddings(const std::vector<std::string>& texts,
                                                     const EmbeddingSource& source,
                                                     const std::string& api_key,
                                                     const RetryPolicy& retry) {
    if (source.kind != SourceKind::RemoteHttp) {
        throw InvalidInputError("fetch_remote_embeddings: source is not remote-http");
    }
    if (texts.empty()) throw InvalidInputError("fetch_remote_embeddings: empty text list");
    if (source.endpoint.empty()) throw InvalidInputError("fetch_remote_embeddings: empty endpoint");

    const auto [base, path] = split_endpoint(source.endpoint);

    nlohmann::json body;
    body["model"] = source.model_id;
    body["input"] = texts;
    const std::string payload = body.dump();

    std::string last_failure;
    auto delay = retry.base;
    for (int attempt = 1; attempt <= retry.max_attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(delay);
            delay *= retry.factor;
        }

        httplib::Client client(base);
        client.set_connection_timeout(30, 0);
        client.set_read_timeout(120, 0);
        httplib::Headers headers;
        if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

        auto res = client.Post(path, headers, payload, "application/json");
        if (!res) {
            last_failure = "connection failed (" + httplib::to_string(res.error()) + ")";
            continue;
        }
        if (res->status == 401 || res->status == 403) {
            throw AuthError("embedding endpoint rejected credentials (HTTP " +
                            std::to_string(res->status) + ")");
        }
        if (transient_status(res->status)) {
            last_failure = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            throw ProtocolError("embedding endpoint returned HTTP " + std::to_string(res->status));
        }

        auto parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("data") ||
            !parsed["data"].is_array()) {
            throw ProtocolError("embedding response is not a JSON object with a data array");
        }
        const auto& data = parsed["data"];
        if (data.size() != texts.size()) {
            throw ProtocolError("embedding response count " + std::to_string(data.size()) +
                                " does not match request count " + std::to_string(texts.size()));
        }

        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto& item = data[i];
            if (!item.is_object() || !item.contains("embedding") || !item["embedding"].is_array()) {
                throw ProtocolError("embedding response item " + std::to_string(i) +
                                    " has no embedding array");
            }
            std::vector<double> raw;
            raw.reserve(item["embedding"].size());
            for (const auto& v : item["embedding"]) {
                if (!v.is_number()) {
                    throw ProtocolError("embedding response item " + std::to_string(i) +
                                        " has a non-numeric component");
                }
                raw.push_back(v.get<double>());
            }
            if (raw.size() != source.dim) {
                throw ProtocolError("embedding response item " + std::to_string(i) + " has dim " +
                                    std::to_string(raw.size()) + ", expected " +
                                    std::to_string(source.dim));
            }
            try {
                out.push_back(normalize(raw));
            } catch (const DegenerateInputError&) {
                throw DegenerateInputError("embed: zero-norm embedding for text \"" + texts[i] +
                                           "\"");
            }
        }
        return out;
    }
    throw TransportError("embedding endpoint failed after " + std::to_string(retry.max_attempts) +
                         " attempts: " + last_failure);
}

RemoteEmbedder::RemoteEmbedder(EmbeddingSource source, std::string api_key, RetryPolicy retry,
                               std::size_t max_in_flight, std::size_t batch_size)
    : source_(std::move(source)),
      api_key_(std::move(api_key)),
      retry_(retry),
      max_in_flight_(max_in_flight == 0 ? 1 : max_in_flight),
      batch_size_(batch_size == 0 ? 1 : batch_size) {
    if (source_.kind != SourceKind::RemoteHttp) {
        throw InvalidInputError("remote embedder: source is not remote-http");
    }
    if (source_.dim < 2) throw InvalidInputError("remote embedder: dim must be >= 2");
}

std::vector<EmbeddingVector> RemoteEmbedder::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) throw InvalidInputError("remote embedder: empty text list");

    const std::size_t n_batches = (texts.size() + batch_size_ - 1) / batch_size_;
    if (n_batches == 1) return fetch_remote_embeddings(texts, source_, api_key_, retry_);

    std::vector<std::vector<EmbeddingVector>> results(n_batches);
    std::vector<std::exception_ptr> failures(n_batches);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t batch = next.fetch_add(1);
            if (batch >= n_batches) return;
            const std::size_t begin = batch * batch_size_;
            const std::size_t end = std::min(texts.size(), begin + batch_size_);
            std::vector<std::string> chunk(texts.begin() + begin, texts.begin() + end);
            try {
                results[batch] = fetch_remote_embeddings(chunk, source_, api_key_, retry_);
            } catch (...) {
                failures[batch] = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    const std::size_t n_workers = std::min(max_in_flight_, n_batches);
    pool.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (auto& batch : results) {
        for (auto& v : batch) out.push_back(std::move(v));
    }
    return out;
}

}  // namespace creascore
