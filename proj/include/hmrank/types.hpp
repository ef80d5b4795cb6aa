#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace hmrank {

struct Document {
  std::string doc_id;
  std::string url;
  std::string text;

  bool operator==(const Document&) const = default;
};

struct Topic {
  std::string topic_id;
  std::string query;
  std::string description;

  bool operator==(const Topic&) const = default;
};

/// Binary aspect label as it appears in qrels; -1 marks an aspect the
/// assessor did not judge.
enum class BinaryLabel : std::int8_t { unjudged = -1, no = 0, yes = 1 };

struct AspectJudgment {
  std::string topic_id;
  std::string doc_id;
  int usefulness = 0;
  BinaryLabel correctness = BinaryLabel::unjudged;
  BinaryLabel credibility = BinaryLabel::unjudged;

  bool operator==(const AspectJudgment&) const = default;
};

struct RunEntry {
  std::string doc_id;
  double score = 0.0;
  int rank = 0;

  bool operator==(const RunEntry&) const = default;
};

/// One topic's ranking from one system. Ranks are 1..n in entry order.
struct RankedList {
  std::string topic_id;
  std::string run_tag;
  std::vector<RunEntry> entries;

  bool operator==(const RankedList&) const = default;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
};

/// Criterion probabilities in fixed order: costs (1), quantified benefits (2),
/// alternatives (7), availability (8).
struct CriterionVector {
  std::string doc_id;
  std::array<double, 4> p{};
  std::string source_tag;

  bool operator==(const CriterionVector&) const = default;
};

struct EmbeddingRecord {
  std::string id;
  std::vector<double> vector;

  bool operator==(const EmbeddingRecord&) const = default;
};

}  // namespace hmrank
