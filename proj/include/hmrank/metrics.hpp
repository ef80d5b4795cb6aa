#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmrank/corpus_io.hpp"
#include "hmrank/types.hpp"

namespace hmrank {

/// doc_id -> non-negative gain.
using GainMap = StringMap<double>;

/// nDCG with linear gains and log2(i + 1) discount over the first `depth`
/// entries. The ideal ordering takes all judged gains, sorted descending.
/// Returns nullopt when the ideal DCG is 0 (the topic carries no signal).
std::optional<double> ndcg(const RankedList& run, const GainMap& gains, std::size_t depth);

/// Relevant documents in the top `cutoff`, divided by `cutoff`; lists shorter
/// than the cutoff count the missing positions as non-relevant.
double precision_at(const RankedList& run, const StringSet& relevant, std::size_t cutoff = 10);

/// Sum of precision at each relevant rank within `depth`, divided by the
/// number of judged-relevant documents. nullopt when there are none.
std::optional<double> average_precision(const RankedList& run, const StringSet& relevant,
                                        std::size_t depth = static_cast<std::size_t>(-1));

/// Convex combination of per-aspect scores. Weights must be non-negative,
/// match the aspects in number, and sum to 1 (within 1e-9).
double cam(std::span<const double> aspect_scores, std::span<const double> weights);

/// Truncated rank-biased overlap:
///   (1 - p) * sum_{d=1..depth} p^(d-1) * |A[:d] & B[:d]| / d.
/// A list shorter than d contributes its full prefix.
double rbo(std::span<const std::string> a, std::span<const std::string> b, double p,
           std::size_t depth);

/// rbo(run, ideal) / rbo(ideal, ideal), so a run that starts with the ideal
/// scores 1. nullopt for an empty ideal.
std::optional<double> compatibility(std::span<const std::string> run,
                                    std::span<const std::string> ideal, double p,
                                    std::size_t depth);

enum class Polarity { helpful, harmful };

/// Ideal ranking for compatibility. Helpful: correctness 1 and credibility 1.
/// Harmful: correctness 0. Both sorted by usefulness descending, then doc_id.
std::vector<std::string> ideal_ranking(std::span<const AspectJudgment> judgments,
                                       Polarity polarity);

}  // namespace hmrank
