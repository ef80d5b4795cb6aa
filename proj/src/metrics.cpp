#include "hmrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "hmrank/error.hpp"

namespace hmrank {

std::optional<double> ndcg(const RankedList& run, const GainMap& gains, std::size_t depth) {
  std::vector<double> ideal;
  ideal.reserve(gains.size());
  for (const auto& [_, g] : gains) {
    if (g < 0.0) throw ValidationError("negative gain");
    if (g > 0.0) ideal.push_back(g);
  }
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t i = 0; i < ideal.size() && i < depth; ++i)
    idcg += ideal[i] / std::log2(static_cast<double>(i) + 2.0);
  if (idcg == 0.0) return std::nullopt;

  double dcg = 0.0;
  const std::size_t n = std::min(depth, run.entries.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto it = gains.find(run.entries[i].doc_id);
    if (it != gains.end()) dcg += it->second / std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg / idcg;
}

double precision_at(const RankedList& run, const StringSet& relevant, std::size_t cutoff) {
  if (cutoff == 0) throw ValidationError("precision cutoff must be >= 1");
  const std::size_t n = std::min(cutoff, run.entries.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += relevant.contains(run.entries[i].doc_id);
  return static_cast<double>(hits) / static_cast<double>(cutoff);
}

std::optional<double> average_precision(const RankedList& run, const StringSet& relevant,
                                        std::size_t depth) {
  if (relevant.empty()) return std::nullopt;
  const std::size_t n = std::min(depth, run.entries.size());
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (relevant.contains(run.entries[i].doc_id)) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

double cam(std::span<const double> aspect_scores, std::span<const double> weights) {
  if (aspect_scores.size() != weights.size())
    throw ValidationError(fmt::format("CAM: {} aspects but {} weights", aspect_scores.size(),
                                      weights.size()));
  if (weights.empty()) throw ValidationError("CAM: no aspects");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ValidationError("CAM: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("CAM: weights must sum to 1");
  double value = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) value += weights[i] * aspect_scores[i];
  return value;
}

double rbo(std::span<const std::string> a, std::span<const std::string> b, double p,
           std::size_t depth) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("RBO persistence must be in (0, 1)");
  if (depth == 0) throw ValidationError("RBO depth must be >= 1");
  // Incremental overlap: an item counts once it has been seen in both prefixes.
  StringSet seen_a, seen_b;
  std::size_t overlap = 0;
  double sum = 0.0;
  double weight = 1.0;  // p^(d-1)
  for (std::size_t d = 1; d <= depth; ++d) {
    if (d <= a.size()) {
      const auto& x = a[d - 1];
      if (seen_a.insert(x).second && seen_b.contains(x)) ++overlap;
    }
    if (d <= b.size()) {
      const auto& y = b[d - 1];
      if (seen_b.insert(y).second && seen_a.contains(y)) ++overlap;
    }
    sum += weight * static_cast<double>(overlap) / static_cast<double>(d);
    weight *= p;
  }
  return (1.0 - p) * sum;
}

std::optional<double> compatibility(std::span<const std::string> run,
                                     std::span<const std::string> ideal, double p,
                                     std::size_t depth) {
  if (ideal.empty()) return std::nullopt;
  const double self = rbo(ideal, ideal, p, depth);
  return rbo(run, ideal, p, depth) / self;
}

std::vector<std::string> ideal_ranking(std::span<const AspectJudgment> judgments,
                                       Polarity polarity) {
  std::vector<const AspectJudgment*> chosen;
  for (const auto& j : judgments) {
    const bool take = polarity == Polarity::helpful
                          ? j.correctness == BinaryLabel::yes && j.credibility == BinaryLabel::yes
                          : j.correctness == BinaryLabel::no;
    if (take) chosen.push_back(&j);
  }
  std::sort(chosen.begin(), chosen.end(), [](const AspectJudgment* x, const AspectJudgment* y) {
    if (x->usefulness != y->usefulness) return x->usefulness > y->usefulness;
    return x->doc_id < y->doc_id;
  });
  std::vector<std::string> ids;
  ids.reserve(chosen.size());
  for (const auto* j : chosen) ids.push_back(j->doc_id);
  return ids;
}

}  // namespace hmrank
