#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hmrank/types.hpp"

namespace hmrank {

/// Transparent hasher so string-keyed maps can be probed with string_view.
struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

template <class V>
using StringMap = std::unordered_map<std::string, V, StringHash, std::equal_to<>>;
using StringSet = std::unordered_set<std::string, StringHash, std::equal_to<>>;

/// Immutable collection of documents in ingestion order.
class DocumentStore {
 public:
  DocumentStore() = default;
  /// Throws ValidationError on an empty or duplicate doc_id.
  explicit DocumentStore(std::vector<Document> docs);

  std::size_t size() const noexcept { return docs_.size(); }
  bool empty() const noexcept { return docs_.empty(); }
  const Document& operator[](std::size_t i) const { return docs_[i]; }
  const std::vector<Document>& documents() const noexcept { return docs_; }
  const Document* find(std::string_view doc_id) const;

 private:
  std::vector<Document> docs_;
  StringMap<std::size_t> by_id_;
};

class TopicSet {
 public:
  TopicSet() = default;
  explicit TopicSet(std::vector<Topic> topics);

  std::size_t size() const noexcept { return topics_.size(); }
  const std::vector<Topic>& topics() const noexcept { return topics_; }
  const Topic* find(std::string_view topic_id) const;

 private:
  std::vector<Topic> topics_;
  StringMap<std::size_t> by_id_;
};

/// Corpus file: one JSON object per line with string fields doc_id, url, text.
/// Blank lines are skipped; errors carry the physical line number.
DocumentStore load_corpus(const std::filesystem::path& path);

/// Topics file: one JSON object per line with topic_id, query and an optional
/// description.
TopicSet load_topics(const std::filesystem::path& path);

/// Three-aspect judgments grouped by topic.
class Qrels {
 public:
  /// Throws ValidationError on a duplicate (topic, doc) pair.
  void add(AspectJudgment judgment);

  const std::vector<AspectJudgment>* topic(std::string_view topic_id) const;
  const AspectJudgment* find(std::string_view topic_id, std::string_view doc_id) const;
  std::vector<std::string> topic_ids() const;
  std::size_t size() const noexcept { return count_; }

 private:
  struct TopicJudgments {
    std::vector<AspectJudgment> judgments;
    StringMap<std::size_t> by_doc;
  };
  std::map<std::string, TopicJudgments, std::less<>> topics_;
  std::size_t count_ = 0;
};

inline constexpr int kDefaultMaxUsefulness = 2;

/// Qrels lines: "topic_id 0 doc_id usefulness correctness credibility",
/// with -1 marking an unjudged binary aspect.
Qrels load_qrels(const std::filesystem::path& path, int max_usefulness = kDefaultMaxUsefulness);

enum class Aspect { useful, correct, credible };

/// A set of aspects that must all hold for a document to count as relevant.
class AspectSet {
 public:
  constexpr AspectSet() = default;
  constexpr AspectSet(std::initializer_list<Aspect> aspects) {
    for (Aspect a : aspects) bits_ |= bit(a);
  }

  constexpr bool contains(Aspect a) const { return (bits_ & bit(a)) != 0; }
  constexpr AspectSet with(Aspect a) const {
    AspectSet s = *this;
    s.bits_ |= bit(a);
    return s;
  }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool operator==(const AspectSet&) const = default;

 private:
  static constexpr unsigned bit(Aspect a) { return 1U << static_cast<unsigned>(a); }
  unsigned bits_ = 0;
};

namespace combos {
inline constexpr AspectSet useful{Aspect::useful};
inline constexpr AspectSet useful_correct{Aspect::useful, Aspect::correct};
inline constexpr AspectSet useful_credible{Aspect::useful, Aspect::credible};
inline constexpr AspectSet useful_correct_credible{Aspect::useful, Aspect::correct,
                                                   Aspect::credible};
}  // namespace combos

inline constexpr int kDefaultUsefulnessThreshold = 1;

/// Usefulness counts when grade >= threshold; correct/credible count only when
/// judged 1. An unjudged aspect never counts.
bool aspect_holds(const AspectJudgment& j, Aspect aspect,
                  int usefulness_threshold = kDefaultUsefulnessThreshold);
bool is_relevant(const AspectJudgment& j, AspectSet combo,
                 int usefulness_threshold = kDefaultUsefulnessThreshold);

/// topic_id -> set of relevant doc_ids. Topics with no relevant document are
/// still present with an empty set.
using BinaryQrels = std::map<std::string, StringSet, std::less<>>;

BinaryQrels derive_binary_qrels(const Qrels& qrels, AspectSet combo,
                                int usefulness_threshold = kDefaultUsefulnessThreshold);

/// Vectors keyed by id, all of one dimension.
struct EmbeddingTable {
  std::size_t dim = 0;
  StringMap<std::vector<double>> vectors;
  /// Ids whose vector has zero norm; every cosine against them is 0.
  std::vector<std::string> zero_norm_ids;
};

/// Embedding file: first line is the dimension, then "id v1 ... v_dim".
EmbeddingTable load_embeddings(const std::filesystem::path& path);
void write_embeddings(const std::filesystem::path& path, std::size_t dim,
                      const std::vector<EmbeddingRecord>& records);

/// Per-topic candidate pools: "topic_id doc_id" per line.
using CandidatePools = std::map<std::string, StringSet, std::less<>>;
CandidatePools load_candidate_pools(const std::filesystem::path& path);

namespace detail {
/// Splits on ASCII whitespace, dropping empty fields.
std::vector<std::string_view> split_ws(std::string_view line);
bool is_blank(std::string_view line);
std::optional<long long> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);
}  // namespace detail

}  // namespace hmrank
