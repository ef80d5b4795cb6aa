#include "hmrank/quality.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "hmrank/error.hpp"
#include "hmrank/ranking.hpp"
#include "hmrank/semantic.hpp"

namespace hmrank {

namespace {

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

double quality_similarity(const CriterionVector& cv) {
  for (double x : cv.p)
    if (!in_unit_interval(x))
      throw ValidationError(
          fmt::format("criterion probability {} for '{}' outside [0, 1]", x, cv.doc_id));
  return cosine(cv.p, kReferenceVector);
}

QualityRerank rerank_by_quality(const RankedList& base, const CriterionScores& scores) {
  QualityRerank out;
  out.list.topic_id = base.topic_id;
  out.list.run_tag = base.run_tag;
  out.list.entries.reserve(base.entries.size());
  for (const auto& e : base.entries) {
    double sim = 0.0;
    if (auto it = scores.find(e.doc_id); it != scores.end())
      sim = quality_similarity(it->second);
    else
      ++out.missing;
    out.list.entries.push_back(RunEntry{e.doc_id, sim, 0});
  }
  sort_and_rank(out.list.entries);
  return out;
}

CriterionScores load_criterion_scores(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot read '{}'", path.string()));
  const std::string name = path.string();
  CriterionScores scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    auto f = detail::split_ws(line);
    if (f.size() != 6)
      throw ParseError(name, line_no, fmt::format("expected 6 fields, got {}", f.size()));
    CriterionVector cv;
    cv.doc_id = std::string(f[0]);
    for (std::size_t i = 0; i < 4; ++i) {
      auto x = detail::parse_double(f[i + 1]);
      if (!x || !std::isfinite(*x))
        throw ParseError(name, line_no, fmt::format("bad probability '{}'", f[i + 1]));
      if (!in_unit_interval(*x))
        throw ParseError(name, line_no, fmt::format("probability {} outside [0, 1]", *x));
      cv.p[i] = *x;
    }
    cv.source_tag = std::string(f[5]);
    auto id = cv.doc_id;
    if (!scores.emplace(std::move(id), std::move(cv)).second)
      throw ParseError(name, line_no, fmt::format("duplicate doc_id '{}'", f[0]));
  }
  return scores;
}

}  // namespace hmrank
