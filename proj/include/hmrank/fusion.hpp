#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hmrank/bm25.hpp"
#include "hmrank/types.hpp"

namespace hmrank {

inline constexpr double kDefaultRrfK = 60.0;

enum class Component { bm25, semantic, qe_base, qe_large };

Component parse_component(std::string_view name);
std::string_view to_string(Component c);

struct FusionConfig {
  std::string run_tag;
  std::vector<Component> components;
  double rrf_k = kDefaultRrfK;

  /// Throws ValidationError on an empty tag, empty or repeated components, or
  /// rrf_k <= 0.
  void validate() const;
  bool operator==(const FusionConfig&) const = default;
};

/// The six submitted run configurations: BM25 alone and its fusions with the
/// semantic ranker and the two quality re-rankings.
std::vector<FusionConfig> standard_run_configs(double rrf_k = kDefaultRrfK);

/// "run_tag comp1,comp2,... [rrf_k]"
FusionConfig parse_fusion_config(std::string_view line, double default_rrf_k = kDefaultRrfK);
std::string format_fusion_config(const FusionConfig& config);
/// One config per non-blank line; '#' starts a comment line.
std::vector<FusionConfig> load_fusion_configs(const std::filesystem::path& path,
                                              double default_rrf_k = kDefaultRrfK);

/// Reciprocal rank fusion over the `rank` fields of the inputs: each document
/// scores the sum of 1 / (k + rank) over the lists that contain it. Scores of
/// the inputs are ignored. All lists must share a topic. The output is
/// untagged and untruncated.
RankedList rrf_fuse(std::span<const RankedList> lists, double k = kDefaultRrfK);

/// Component -> topic_id -> list.
using ComponentRuns = std::map<Component, std::map<std::string, RankedList, std::less<>>>;

/// One list per topic, in `topic_ids` order, stamped with the config's tag.
/// A single-component config passes its list through unchanged apart from the
/// tag; otherwise the component lists are fused. Output is cut to `depth`.
std::vector<RankedList> build_run(const FusionConfig& config, const ComponentRuns& components,
                                  std::span<const std::string> topic_ids,
                                  std::size_t depth = kDefaultDepth);

}  // namespace hmrank
