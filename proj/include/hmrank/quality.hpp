#pragma once

#include <array>
#include <cstddef>
#include <filesystem>

#include "hmrank/corpus_io.hpp"
#include "hmrank/types.hpp"

namespace hmrank {

/// The ideal article satisfies every criterion with probability 1.
inline constexpr std::array<double, 4> kReferenceVector{1.0, 1.0, 1.0, 1.0};

using CriterionScores = StringMap<CriterionVector>;

/// Cosine between the criterion probabilities and the all-ones reference.
/// Magnitude-blind: (0.1, 0.1, 0.1, 0.1) scores the same as (1, 1, 1, 1).
/// Throws ValidationError if a component lies outside [0, 1].
double quality_similarity(const CriterionVector& cv);

struct QualityRerank {
  RankedList list;
  /// Documents of the base list without a criterion vector. They score 0.
  std::size_t missing = 0;
};

/// Reorders the base list by descending quality similarity; the score of each
/// entry becomes its similarity. Run tag is carried over from `base`.
QualityRerank rerank_by_quality(const RankedList& base, const CriterionScores& scores);

/// Criterion-score file: "doc_id p1 p2 p7 p8 source_tag" per line.
CriterionScores load_criterion_scores(const std::filesystem::path& path);

}  // namespace hmrank
