#include "actdiag/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace actdiag {

double ExactSimilarity::similarity(std::string_view a, std::string_view b) const {
  return a == b ? 1.0 : 0.0;
}

std::string NgramSimilarity::normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::map<std::string, int> NgramSimilarity::trigram_counts(std::string_view normalized) {
  std::map<std::string, int> counts;
  if (normalized.empty()) return counts;
  if (normalized.size() < 3) {
    counts[std::string(normalized)] = 1;
    return counts;
  }
  for (std::size_t i = 0; i + 3 <= normalized.size(); ++i) {
    ++counts[std::string(normalized.substr(i, 3))];
  }
  return counts;
}

double NgramSimilarity::similarity(std::string_view a, std::string_view b) const {
  const std::string na = normalize_text(a);
  const std::string nb = normalize_text(b);
  if (na == nb) return 1.0;
  if (na.empty() || nb.empty()) return 0.0;

  const auto ca = trigram_counts(na);
  const auto cb = trigram_counts(nb);
  // Merge walk over both sorted maps keeps the sum order independent of argument order.
  double dot = 0.0;
  auto ia = ca.begin();
  auto ib = cb.begin();
  while (ia != ca.end() && ib != cb.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += static_cast<double>(ia->second) * ib->second;
      ++ia;
      ++ib;
    }
  }
  auto sq = [](const std::map<std::string, int>& m) {
    double s = 0.0;
    for (const auto& [_, c] : m) s += static_cast<double>(c) * c;
    return s;
  };
  double sa = sq(ca), sb = sq(cb);
  double denom = std::sqrt(std::min(sa, sb)) * std::sqrt(std::max(sa, sb));
  return std::clamp(dot / denom, 0.0, 1.0);
}

double ngram_sim(std::string_view a, std::string_view b) {
  return NgramSimilarity{}.similarity(a, b);
}

std::vector<EmbeddingVector> TableEmbeddingTransport::embed(const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    auto it = table_.find(t);
    if (it == table_.end()) throw EmbeddingError("no embedding scripted for '" + t + "'", false);
    out.push_back(it->second);
  }
  return out;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.size() != b.size()) {
    throw EmbeddingError("embedding dimension mismatch: " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()),
                         false);
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      throw EmbeddingError("non-finite embedding component", false);
    }
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw EmbeddingError("zero-norm embedding vector", false);
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

EmbeddingSimilarity::EmbeddingSimilarity(std::shared_ptr<EmbeddingTransport> transport,
                                         EmbeddingOptions options)
    : transport_(std::move(transport)), options_(options), dimension_(options.dimension) {
  if (!transport_) throw PreconditionError("embedding similarity requires a transport");
  if (options_.batch_size == 0) options_.batch_size = 1;
}

std::size_t EmbeddingSimilarity::transport_calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

// Caller holds mutex_.
std::vector<EmbeddingVector> EmbeddingSimilarity::fetch(const std::vector<std::string>& texts) const {
  std::vector<EmbeddingVector> out;
  for (std::size_t start = 0; start < texts.size(); start += options_.batch_size) {
    std::vector<std::string> batch(
        texts.begin() + static_cast<std::ptrdiff_t>(start),
        texts.begin() + static_cast<std::ptrdiff_t>(std::min(texts.size(), start + options_.batch_size)));
    std::vector<EmbeddingVector> got;
    for (int attempt = 0;; ++attempt) {
      try {
        ++calls_;
        got = transport_->embed(batch);
        break;
      } catch (const EmbeddingError& e) {
        if (!e.retriable() || attempt >= options_.retries) {
          throw EmbeddingError(std::string(e.what()) + " (after " + std::to_string(attempt + 1) +
                                   " attempt(s))",
                               e.retriable());
        }
      }
    }
    if (got.size() != batch.size()) {
      throw EmbeddingError("embedding service returned " + std::to_string(got.size()) +
                               " vectors for " + std::to_string(batch.size()) + " inputs",
                           false);
    }
    for (auto& v : got) {
      if (dimension_ == 0) dimension_ = v.size();
      if (v.size() != dimension_) {
        throw EmbeddingError("embedding dimension mismatch: expected " +
                                 std::to_string(dimension_) + ", got " + std::to_string(v.size()),
                             false);
      }
      out.push_back(std::move(v));
    }
  }
  return out;
}

EmbeddingVector EmbeddingSimilarity::vector_for(const std::string& text) const {
  std::lock_guard lock(mutex_);
  if (options_.cache) {
    if (auto it = cache_.find(text); it != cache_.end()) return it->second;
  }
  auto v = fetch({text}).front();
  if (options_.cache) cache_.emplace(text, v);
  return v;
}

void EmbeddingSimilarity::prefetch(std::span<const std::string> texts) const {
  if (!options_.cache) return;
  std::lock_guard lock(mutex_);
  std::vector<std::string> missing;
  for (const auto& t : texts) {
    if (t.empty() || cache_.contains(t)) continue;
    if (std::find(missing.begin(), missing.end(), t) == missing.end()) missing.push_back(t);
  }
  if (missing.empty()) return;
  auto vectors = fetch(missing);
  for (std::size_t i = 0; i < missing.size(); ++i) cache_.emplace(missing[i], std::move(vectors[i]));
}

double EmbeddingSimilarity::similarity(std::string_view a, std::string_view b) const {
  if (a.empty() || b.empty()) return a.empty() && b.empty() ? 1.0 : 0.0;
  if (a == b) return 1.0;
  const auto va = vector_for(std::string(a));
  const auto vb = vector_for(std::string(b));
  return std::clamp((cosine(va, vb) + 1.0) / 2.0, 0.0, 1.0);
}

}  // namespace actdiag
