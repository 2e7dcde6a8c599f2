#include "actdiag/embedding_client.hpp"

#include <nlohmann/json.hpp>

#include "http_util.hpp"

namespace actdiag {

using json = nlohmann::json;

HttpEmbeddingTransport::HttpEmbeddingTransport(EmbeddingEndpoint endpoint)
    : endpoint_(std::move(endpoint)) {
  detail::split_url(endpoint_.url);
}

std::vector<EmbeddingVector> HttpEmbeddingTransport::embed(const std::vector<std::string>& texts) {
  auto [origin, path] = detail::split_url(endpoint_.url);
  auto client = detail::make_client(origin, endpoint_.timeout_seconds);

  json body;
  if (!endpoint_.model.empty()) body["model"] = endpoint_.model;
  body["input"] = texts;

  auto res = client->Post(path, detail::auth_headers(endpoint_.auth_env), body.dump(),
                          "application/json");
  if (!res) {
    throw EmbeddingError("embedding request failed: " + httplib::to_string(res.error()), true);
  }
  if (res->status < 200 || res->status >= 300) {
    throw EmbeddingError("embedding service returned HTTP " + std::to_string(res->status),
                         detail::retriable_status(res->status));
  }

  std::vector<EmbeddingVector> out(texts.size());
  std::vector<bool> filled(texts.size(), false);
  try {
    auto doc = json::parse(res->body);
    const auto& data = doc.at("data");
    if (data.size() != texts.size()) {
      throw EmbeddingError("embedding service returned " + std::to_string(data.size()) +
                               " vectors for " + std::to_string(texts.size()) + " inputs",
                           false);
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::size_t index = data[i].contains("index") ? data[i]["index"].get<std::size_t>() : i;
      if (index >= out.size() || filled[index]) {
        throw EmbeddingError("embedding response has a bad index", false);
      }
      out[index] = data[i].at("embedding").get<EmbeddingVector>();
      filled[index] = true;
    }
  } catch (const json::exception& e) {
    throw EmbeddingError(std::string("malformed embedding response: ") + e.what(), false);
  }
  return out;
}

}  // namespace actdiag
