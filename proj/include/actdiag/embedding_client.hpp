#pragma once

#include <optional>
#include <string>
#include <vector>

#include "actdiag/similarity.hpp"

namespace actdiag {

/// Endpoint settings for an OpenAI-style embeddings service.
struct EmbeddingEndpoint {
  std::string url;                  ///< e.g. http://127.0.0.1:8080/v1/embeddings
  std::string model;                ///< sent as "model"; omitted when empty
  std::string auth_env = "EMBEDDING_API_KEY";  ///< bearer token is read from this variable
  int timeout_seconds = 30;
};

/// POSTs {"model": ..., "input": [texts]} and reads {"data": [{"index": i, "embedding": [...]}]}.
/// Transport failures and 408/429/5xx statuses raise retriable EmbeddingErrors;
/// other statuses and malformed bodies are not retriable.
class HttpEmbeddingTransport final : public EmbeddingTransport {
 public:
  explicit HttpEmbeddingTransport(EmbeddingEndpoint endpoint);
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

 private:
  EmbeddingEndpoint endpoint_;
};

}  // namespace actdiag
