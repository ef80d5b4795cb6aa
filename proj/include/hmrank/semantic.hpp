#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hmrank/corpus_io.hpp"
#include "hmrank/types.hpp"

namespace hmrank {

inline constexpr std::size_t kDefaultMaxSentences = 20;
inline constexpr std::size_t kDefaultHashedDim = 256;
/// Seed of the fallback provider's string hash (FNV-1a offset basis).
inline constexpr std::uint64_t kDefaultHashSeed = 0xcbf29ce484222325ULL;

/// Splits after '.', '!' or '?' when followed by whitespace or end of text.
/// Segments are trimmed and empty ones dropped. Abbreviations are not
/// recognised: "Dr. Smith" yields two segments.
std::vector<std::string> segment_sentences(std::string_view text);

/// First `limit` sentences joined by single spaces.
std::string truncate_for_embedding(std::string_view text, std::size_t limit = kDefaultMaxSentences);

/// u.v / (|u||v|), or 0 when either norm is 0. Throws ValidationError on a
/// dimension mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

/// Which topic fields are embedded.
enum class TopicText { query, description, both };
TopicText parse_topic_text(std::string_view s);
std::string_view to_string(TopicText t);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  virtual std::vector<double> document_vector(const Document& doc) const = 0;
  virtual std::vector<double> topic_vector(const Topic& topic) const = 0;
};

/// Vectors produced by an external encoder, looked up by doc_id / topic_id.
class FileEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit FileEmbeddingProvider(EmbeddingTable table);

  std::size_t dim() const override { return table_.dim; }
  std::vector<double> document_vector(const Document& doc) const override;
  std::vector<double> topic_vector(const Topic& topic) const override;
  const EmbeddingTable& table() const noexcept { return table_; }

 private:
  const std::vector<double>& lookup(const std::string& id) const;
  EmbeddingTable table_;
};

/// Deterministic stand-in encoder: tokens of the (truncated) text are hashed
/// into `dim` buckets, counted, and the count vector is L2-normalised. Empty
/// text maps to the zero vector.
class HashedEmbeddingProvider final : public EmbeddingProvider {
 public:
  struct Options {
    std::size_t dim = kDefaultHashedDim;
    std::uint64_t seed = kDefaultHashSeed;
    std::size_t max_sentences = kDefaultMaxSentences;
    TopicText topic_text = TopicText::query;
  };

  HashedEmbeddingProvider() : HashedEmbeddingProvider(Options{}) {}
  explicit HashedEmbeddingProvider(Options options);

  std::size_t dim() const override { return options_.dim; }
  std::vector<double> document_vector(const Document& doc) const override;
  std::vector<double> topic_vector(const Topic& topic) const override;
  std::vector<double> embed_text(std::string_view text) const;

 private:
  Options options_;
};

/// 64-bit FNV-1a style multiplicative hash starting from `seed`.
std::uint64_t hash_token(std::string_view token, std::uint64_t seed = kDefaultHashSeed);

/// Orders every candidate by descending cosine to the topic vector; ties by
/// doc_id. The output contains exactly the candidates.
RankedList semantic_rank(const Topic& topic, std::span<const Document* const> candidates,
                         const EmbeddingProvider& provider);

}  // namespace hmrank
