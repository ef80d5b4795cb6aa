#include "hmrank/evaluation.hpp"

#include <map>
#include <optional>
#include <ostream>

#include <fmt/format.h>

#include "hmrank/error.hpp"
#include "hmrank/ranking.hpp"

namespace hmrank {

namespace {

struct MeanAccumulator {
  double sum = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;

  void add(std::optional<double> v) {
    if (v) {
      sum += *v;
      ++used;
    } else {
      ++excluded;
    }
  }
  double mean() const { return used ? sum / static_cast<double>(used) : 0.0; }
  Cell cell() const { return Cell{mean(), used, excluded, false}; }
};

}  // namespace

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::ndcg:
      return "nDCG";
    case Metric::precision_at_10:
      return "P@10";
    case Metric::cam_map:
      return "CAM_MAP";
    case Metric::cam_map_3:
      return "CAM_MAP_3";
  }
  return "?";
}

const std::vector<EvalSpec>& standard_eval_specs() {
  using A = Aspect;
  static const std::vector<EvalSpec> specs = {
      {1, "graded.usefulness", Metric::ndcg, true, combos::useful, {}},
      {2, "binary.useful-correct", Metric::ndcg, false, combos::useful_correct, {}},
      {3, "binary.useful-correct", Metric::precision_at_10, false, combos::useful_correct, {}},
      {4, "binary.useful-credible", Metric::ndcg, false, combos::useful_credible, {}},
      {5, "useful-correct-credible", Metric::ndcg, false, combos::useful_correct_credible, {}},
      {6, "2aspects.correct-credible", Metric::cam_map, false, {}, {A::correct, A::credible}},
      {7, "2aspects.useful-credible", Metric::cam_map, false, {}, {A::useful, A::credible}},
      {8, "3aspects", Metric::cam_map_3, false, {}, {A::useful, A::correct, A::credible}},
  };
  return specs;
}

std::vector<Run> group_runs(std::span<const RankedList> lists) {
  std::vector<Run> runs;
  std::map<std::string, std::size_t, std::less<>> index;
  for (const auto& list : lists) {
    auto [it, inserted] = index.try_emplace(list.run_tag, runs.size());
    if (inserted) runs.push_back(Run{list.run_tag, {}});
    runs[it->second].lists.push_back(list);
  }
  return runs;
}

Cell evaluate_spec(const Run& run, const Qrels& qrels, const EvalSpec& spec,
                   const EvalOptions& options) {
  const int t = options.usefulness_threshold;
  if (spec.metric == Metric::cam_map || spec.metric == Metric::cam_map_3) {
    const std::size_t arity = spec.metric == Metric::cam_map ? 2 : 3;
    if (spec.cam_aspects.size() != arity)
      throw ValidationError(fmt::format("spec {}: {} needs {} aspects", spec.id,
                                        to_string(spec.metric), arity));
    std::vector<MeanAccumulator> per_aspect(arity);
    std::size_t used = 0, excluded = 0;
    for (const auto& list : run.lists) {
      const auto* judged = qrels.topic(list.topic_id);
      if (!judged) continue;
      bool any = false;
      for (std::size_t a = 0; a < arity; ++a) {
        StringSet relevant;
        for (const auto& j : *judged)
          if (aspect_holds(j, spec.cam_aspects[a], t)) relevant.insert(j.doc_id);
        auto ap = average_precision(list, relevant, options.depth);
        any = any || ap.has_value();
        per_aspect[a].add(ap);
      }
      any ? ++used : ++excluded;
    }
    std::vector<double> maps, weights(arity, 1.0 / static_cast<double>(arity));
    for (const auto& acc : per_aspect) maps.push_back(acc.mean());
    return Cell{cam(maps, weights), used, excluded, false};
  }

  MeanAccumulator acc;
  for (const auto& list : run.lists) {
    const auto* judged = qrels.topic(list.topic_id);
    if (!judged) continue;
    if (spec.metric == Metric::ndcg) {
      GainMap gains;
      for (const auto& j : *judged) {
        if (spec.graded)
          gains.emplace(j.doc_id, static_cast<double>(j.usefulness));
        else
          gains.emplace(j.doc_id, is_relevant(j, spec.combo, t) ? 1.0 : 0.0);
      }
      acc.add(ndcg(list, gains, options.depth));
    } else {
      StringSet relevant;
      for (const auto& j : *judged)
        if (is_relevant(j, spec.combo, t)) relevant.insert(j.doc_id);
      if (relevant.empty())
        acc.add(std::nullopt);
      else
        acc.add(precision_at(list, relevant, options.precision_cutoff));
    }
  }
  return acc.cell();
}

Cell evaluate_compatibility(const Run& run, const Qrels& qrels, const CompatibilitySpec& spec) {
  MeanAccumulator acc;
  for (const auto& list : run.lists) {
    const auto* judged = qrels.topic(list.topic_id);
    if (!judged) continue;
    const auto ideal = ideal_ranking(*judged, spec.polarity);
    acc.add(compatibility(doc_ids(list), ideal, spec.p, spec.depth));
  }
  return acc.cell();
}

ResultTable evaluate_runs(std::span<const Run> runs, const Qrels& qrels,
                          const EvalOptions& options, std::string_view baseline_tag) {
  ResultTable table;
  for (const auto& spec : standard_eval_specs()) table.columns.push_back(std::to_string(spec.id));
  table.columns.push_back("harmful");
  table.columns.push_back("helpful");
  table.baseline = std::string(baseline_tag);

  for (const auto& run : runs) {
    RunResult row;
    row.run_tag = run.tag;
    for (const auto& list : run.lists)
      if (!qrels.topic(list.topic_id)) row.skipped_topics.push_back(list.topic_id);
    const auto& specs = standard_eval_specs();
    for (std::size_t i = 0; i < specs.size(); ++i)
      row.cells[i] = evaluate_spec(run, qrels, specs[i], options);
    row.cells[8] = evaluate_compatibility(
        run, qrels, CompatibilitySpec{Polarity::harmful, options.rbo_p, options.rbo_depth});
    row.cells[9] = evaluate_compatibility(
        run, qrels, CompatibilitySpec{Polarity::helpful, options.rbo_p, options.rbo_depth});
    table.rows.push_back(std::move(row));
  }

  if (baseline_tag.empty()) return table;
  const RunResult* base = nullptr;
  for (const auto& row : table.rows)
    if (row.run_tag == baseline_tag) base = &row;
  if (!base) throw ValidationError(fmt::format("baseline run '{}' not evaluated", baseline_tag));
  const auto base_cells = base->cells;
  for (auto& row : table.rows) {
    for (std::size_t c = 0; c < kEvalColumns; ++c) {
      const bool lower_is_better = c == 8;
      const double v = row.cells[c].value, b = base_cells[c].value;
      row.cells[c].better_than_baseline = lower_is_better ? v < b : v > b;
    }
  }
  return table;
}

void write_table_text(std::ostream& out, const ResultTable& table) {
  std::size_t width = 3;
  for (const auto& row : table.rows) width = std::max(width, row.run_tag.size());
  std::string line = fmt::format("{:<{}}", "run", width);
  for (const auto& col : table.columns) line += fmt::format(" {:>8}", col);
  out << line << '\n';
  for (const auto& row : table.rows) {
    line = fmt::format("{:<{}}", row.run_tag, width);
    for (const auto& cell : row.cells)
      line += fmt::format(" {:>8}",
                          fmt::format("{:.4f}{}", cell.value, cell.better_than_baseline ? "*" : ""));
    out << line << '\n';
  }
  if (!table.baseline.empty())
    out << fmt::format("* better than baseline '{}' (harmful: lower is better)\n", table.baseline);
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < kEvalColumns; ++c)
      if (row.cells[c].topics_excluded > 0)
        out << fmt::format("{}: column {} excluded {} topic(s) without qualifying documents\n",
                           row.run_tag, table.columns[c], row.cells[c].topics_excluded);
    if (!row.skipped_topics.empty())
      out << fmt::format("{}: skipped {} unjudged topic(s)\n", row.run_tag,
                         row.skipped_topics.size());
  }
}

void write_table_tsv(std::ostream& out, const ResultTable& table) {
  out << "run_tag\tspec_id\tvalue\tbetter_than_baseline\n";
  for (const auto& row : table.rows)
    for (std::size_t c = 0; c < kEvalColumns; ++c)
      out << fmt::format("{}\t{}\t{:.6f}\t{}\n", row.run_tag, table.columns[c],
                         row.cells[c].value, row.cells[c].better_than_baseline ? 1 : 0);
}

}  // namespace hmrank
