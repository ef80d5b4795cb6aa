#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hmrank/corpus_io.hpp"
#include "hmrank/types.hpp"

namespace hmrank {

/// Lowercases ASCII letters and splits on every byte that is not an ASCII
/// letter or digit. Bytes >= 0x80 are separators as well, so non-ASCII text
/// contributes no tokens. No stemming, no stopwords.
std::vector<std::string> tokenize(std::string_view text);

struct Bm25Params {
  double k1 = 0.9;
  double b = 0.4;

  /// Throws ValidationError unless k1 > 0 and 0 <= b <= 1.
  void validate() const;
  bool operator==(const Bm25Params&) const = default;
};

inline constexpr std::size_t kDefaultDepth = 1000;

class InvertedIndex {
 public:
  struct Posting {
    std::uint32_t doc;
    std::uint32_t tf;
    bool operator==(const Posting&) const = default;
  };

  /// Builds from a non-empty store. Documents are split into `workers`
  /// contiguous ranges and merged in order, so the result does not depend on
  /// the worker count. `params` are recorded in the serialized form.
  static InvertedIndex build(const DocumentStore& store, Bm25Params params = {},
                             unsigned workers = 1);

  std::size_t doc_count() const noexcept { return doc_ids_.size(); }
  std::size_t term_count() const noexcept { return terms_.size(); }
  double avg_doc_length() const noexcept { return avg_doc_length_; }
  std::uint32_t doc_length(std::uint32_t doc) const { return doc_lengths_[doc]; }
  const std::string& doc_id(std::uint32_t doc) const { return doc_ids_[doc]; }
  std::optional<std::uint32_t> find_doc(std::string_view doc_id) const;
  const Bm25Params& params() const noexcept { return params_; }

  /// Postings sorted by doc; empty span for unknown terms.
  std::span<const Posting> postings(std::string_view term) const;
  std::size_t df(std::string_view term) const { return postings(term).size(); }
  std::uint32_t tf(std::string_view term, std::uint32_t doc) const;

  /// Terms in lexicographic order.
  const std::vector<std::string>& terms() const noexcept { return terms_; }

  void save(std::ostream& out) const;
  static InvertedIndex load(std::istream& in);

  bool operator==(const InvertedIndex& other) const;

 private:
  void finalize();

  Bm25Params params_;
  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_lengths_;
  double avg_doc_length_ = 0.0;
  std::vector<std::string> terms_;
  std::vector<std::vector<Posting>> postings_;
  StringMap<std::uint32_t> term_lookup_;
  StringMap<std::uint32_t> doc_lookup_;
};

/// ln(1 + (N - df + 0.5) / (df + 0.5)); always positive.
double bm25_idf(std::size_t doc_count, std::size_t df);

/// Saturated, length-normalized term frequency:
/// tf (k1 + 1) / (tf + k1 (1 - b + b |d| / avgdl)).
double bm25_tf_component(double tf, double doc_length, double avg_doc_length,
                         const Bm25Params& params);

/// Sum over query tokens (repeats included) of idf * tf component.
double bm25_score(std::span<const std::string> query_tokens, std::uint32_t doc,
                  const InvertedIndex& index, const Bm25Params& params);

/// Top-k documents with a positive score, ties by ascending doc_id. When
/// `allowlist` is given only those doc_ids are scored.
RankedList search(const Topic& topic, const InvertedIndex& index, const Bm25Params& params,
                  std::size_t k = kDefaultDepth, const StringSet* allowlist = nullptr);

}  // namespace hmrank
