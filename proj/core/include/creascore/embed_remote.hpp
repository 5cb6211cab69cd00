// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "creascore/embedding.hpp"

namespace creascore {

// Retry schedule for transient remote failures (HTTP 429/5xx and transport
// errors). The delay starts at base and is multiplied by factor after each
// failed attempt.
struct RetryPolicy {
    std::chrono::milliseconds base{1000};
    int factor = 2;
    int max_attempts = 5;
};

// Issues one HTTP POST to source.endpoint with body
//   {"model": <model_id>, "input": [texts...]}
// and expects {"data": [{"embedding": [...]}, ...]} aligned with the input
// order. Each returned vector is normalized before being handed out.
//
// HTTP 401/403 raise AuthError. HTTP 429/5xx and connection failures are
// retried per the policy, then raise TransportError with the attempt count.
// A response whose vector count or dimension disagrees with the request
// raises ProtocolError.
std::vector<EmbeddingVector> fetch_remote_embeddings(const std::vector<std::string>& texts,
                                                     const EmbeddingSource& source,
                                                     const std::string& api_key,
                                                     const RetryPolicy& retry = {});

// Embedder backed by a remote HTTP endpoint. Long text lists are split into
// batches of batch_size requests issued with at most max_in_flight in
// flight at a time.
class RemoteEmbedder final : public Embedder {
public:
    RemoteEmbedder(EmbeddingSource source, std::string api_key, RetryPolicy retry = {},
                   std::size_t max_in_flight = 4, std::size_t batch_size = 64);

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    const EmbeddingSource& source() const override { return source_; }

private:
    EmbeddingSource source_;
    std::string api_key_;
    RetryPolicy retry_;
    std::size_t max_in_flight_;
    std::size_t batch_size_;
};

}  // namespace creascore
