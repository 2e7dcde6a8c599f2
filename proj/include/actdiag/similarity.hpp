#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "actdiag/errors.hpp"

namespace actdiag {

/// Label similarity (simLabel). Implementations must be symmetric, return 1
/// for identical non-empty text, stay within [0, 1], and be safe to call from
/// several threads at once.
class SimilarityProvider {
 public:
  virtual ~SimilarityProvider() = default;
  virtual double similarity(std::string_view a, std::string_view b) const = 0;
  /// Hint that these texts are about to be compared; providers that batch
  /// remote work may fetch them ahead of time.
  virtual void prefetch(std::span<const std::string> /*texts*/) const {}
};

/// 1 for byte-identical text, 0 otherwise.
class ExactSimilarity final : public SimilarityProvider {
 public:
  double similarity(std::string_view a, std::string_view b) const override;
};

/// Cosine similarity of character-trigram counts over lowercased,
/// whitespace-collapsed text. Text shorter than three characters after
/// normalisation is treated as a single gram.
class NgramSimilarity final : public SimilarityProvider {
 public:
  double similarity(std::string_view a, std::string_view b) const override;

  static std::string normalize_text(std::string_view text);
  static std::map<std::string, int> trigram_counts(std::string_view normalized);
};

double ngram_sim(std::string_view a, std::string_view b);

using EmbeddingVector = std::vector<double>;

/// Remote or scripted source of embedding vectors.
class EmbeddingError : public Error {
 public:
  EmbeddingError(const std::string& what, bool retriable) : Error(what), retriable_(retriable) {}
  bool retriable() const noexcept { return retriable_; }

 private:
  bool retriable_;
};

class EmbeddingTransport {
 public:
  virtual ~EmbeddingTransport() = default;
  /// One vector per input, in input order. Throws EmbeddingError.
  virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
};

/// Fixed text -> vector table; unknown text is a non-retriable error.
class TableEmbeddingTransport final : public EmbeddingTransport {
 public:
  explicit TableEmbeddingTransport(std::map<std::string, EmbeddingVector> table)
      : table_(std::move(table)) {}
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

 private:
  std::map<std::string, EmbeddingVector> table_;
};

struct EmbeddingOptions {
  std::size_t dimension = 0;  ///< 0 accepts whatever the first response reports
  std::size_t batch_size = 64;
  int retries = 2;  ///< extra attempts after the first failure
  bool cache = true;
};

/// Cosine similarity of embeddings mapped from [-1, 1] to [0, 1] by (x + 1) / 2.
/// Empty text scores 0 against non-empty text and 1 against empty text without
/// consulting the transport. Vectors are cached by text.
class EmbeddingSimilarity final : public SimilarityProvider {
 public:
  EmbeddingSimilarity(std::shared_ptr<EmbeddingTransport> transport, EmbeddingOptions options = {});

  double similarity(std::string_view a, std::string_view b) const override;
  void prefetch(std::span<const std::string> texts) const override;

  std::size_t transport_calls() const;

 private:
  std::vector<EmbeddingVector> fetch(const std::vector<std::string>& texts) const;
  EmbeddingVector vector_for(const std::string& text) const;

  std::shared_ptr<EmbeddingTransport> transport_;
  EmbeddingOptions options_;
  mutable std::mutex mutex_;
  mutable std::size_t dimension_;
  mutable std::size_t calls_ = 0;
  mutable std::unordered_map<std::string, EmbeddingVector> cache_;
};

/// Cosine similarity of two equal-length vectors; throws EmbeddingError on
/// mismatched length, non-finite components or a zero vector.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace actdiag
