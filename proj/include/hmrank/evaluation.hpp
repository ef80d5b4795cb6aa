#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hmrank/corpus_io.hpp"
#include "hmrank/metrics.hpp"
#include "hmrank/types.hpp"

namespace hmrank {

enum class Metric { ndcg, precision_at_10, cam_map, cam_map_3 };
std::string_view to_string(Metric m);

/// One aspect-metric evaluation. Graded specs use usefulness grades as gains;
/// binary specs use `combo`; CAM specs compute one MAP per entry of
/// `cam_aspects` and average them with equal weights.
struct EvalSpec {
  int id = 0;
  std::string name;
  Metric metric = Metric::ndcg;
  bool graded = false;
  AspectSet combo;
  std::vector<Aspect> cam_aspects;
};

/// The eight evaluations, ids 1..8: graded usefulness nDCG; useful-correct
/// nDCG and P@10; useful-credible nDCG; useful-correct-credible nDCG;
/// correct+credible CAM_MAP; useful+credible CAM_MAP; all three CAM_MAP_3.
const std::vector<EvalSpec>& standard_eval_specs();

struct CompatibilitySpec {
  Polarity polarity = Polarity::helpful;
  double p = 0.95;
  std::size_t depth = 1000;
};

struct EvalOptions {
  int usefulness_threshold = kDefaultUsefulnessThreshold;
  std::size_t depth = 1000;
  std::size_t precision_cutoff = 10;
  double rbo_p = 0.95;
  std::size_t rbo_depth = 1000;
};

/// All topics of one system.
struct Run {
  std::string tag;
  std::vector<RankedList> lists;
};

/// Groups lists by run tag, in order of first appearance.
std::vector<Run> group_runs(std::span<const RankedList> lists);

struct Cell {
  double value = 0.0;
  std::size_t topics_used = 0;
  std::size_t topics_excluded = 0;
  bool better_than_baseline = false;
};

inline constexpr std::size_t kEvalColumns = 10;

struct RunResult {
  std::string run_tag;
  std::array<Cell, kEvalColumns> cells{};
  /// Topics in the run that have no judgments at all.
  std::vector<std::string> skipped_topics;
};

struct ResultTable {
  std::vector<std::string> columns;  // "1".."8", "harmful", "helpful"
  std::vector<RunResult> rows;
  std::string baseline;
};

/// Scores one spec over one run. Topics without judgments are skipped;
/// topics where the spec has no qualifying document are excluded from the
/// mean and counted.
Cell evaluate_spec(const Run& run, const Qrels& qrels, const EvalSpec& spec,
                   const EvalOptions& options);
Cell evaluate_compatibility(const Run& run, const Qrels& qrels, const CompatibilitySpec& spec);

/// Evaluates every run on the eight specs plus harmful and helpful
/// compatibility, then flags cells that beat the baseline run (lower is
/// better for harmful). An empty `baseline_tag` disables flagging.
ResultTable evaluate_runs(std::span<const Run> runs, const Qrels& qrels,
                          const EvalOptions& options, std::string_view baseline_tag);

/// Aligned table; '*' marks a cell better than the baseline.
void write_table_text(std::ostream& out, const ResultTable& table);
/// "run_tag<TAB>spec_id<TAB>value<TAB>better" rows after a header line.
void write_table_tsv(std::ostream& out, const ResultTable& table);

}  // namespace hmrank
