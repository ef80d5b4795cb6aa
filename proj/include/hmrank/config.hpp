#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hmrank/bm25.hpp"
#include "hmrank/evaluation.hpp"
#include "hmrank/fusion.hpp"
#include "hmrank/semantic.hpp"

namespace hmrank {

/// Flat "key = value" file. '#' starts a comment line. Keys may repeat; `run`
/// is the only key where repetition is meaningful.
class KeyValueConfig {
 public:
  static KeyValueConfig load(const std::filesystem::path& path);
  static KeyValueConfig parse(std::istream& in, const std::string& name,
                              std::filesystem::path base_dir);

  /// Replaces every value of `key`.
  void set(const std::string& key, std::string value);
  void add(const std::string& key, std::string value);
  std::optional<std::string> get(std::string_view key) const;
  std::vector<std::string> get_all(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
    return entries_;
  }
  /// Directory relative paths are resolved against.
  const std::filesystem::path& base_dir() const noexcept { return base_dir_; }
  void set_base_dir(std::filesystem::path dir) { base_dir_ = std::move(dir); }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::filesystem::path base_dir_ = ".";
};

/// Every key the pipeline understands, in manifest order.
const std::vector<std::string>& pipeline_config_keys();

struct PipelineConfig {
  std::filesystem::path corpus;
  std::filesystem::path topics;
  std::filesystem::path qrels;
  std::filesystem::path scores_base;
  std::filesystem::path scores_large;
  std::filesystem::path embeddings;  // empty: hashed fallback provider
  std::filesystem::path candidates;  // empty: whole corpus per topic
  std::filesystem::path output_dir = "out";

  Bm25Params bm25;
  std::size_t depth = kDefaultDepth;
  double rrf_k = kDefaultRrfK;
  int max_usefulness = kDefaultMaxUsefulness;
  EvalOptions eval;
  TopicText topic_text = TopicText::query;
  std::size_t max_sentences = kDefaultMaxSentences;
  std::size_t embedding_dim = kDefaultHashedDim;
  std::uint64_t hash_seed = kDefaultHashSeed;
  std::vector<FusionConfig> runs = standard_run_configs();
  std::string baseline = "upv_bm25";
  unsigned workers = 1;

  /// Unknown keys and malformed values raise ValidationError.
  static PipelineConfig from(const KeyValueConfig& kv);

  /// Numeric parameter ranges.
  void validate_parameters() const;
  /// Unique run tags and a baseline that names one of the runs.
  void validate_runs() const;
  /// Everything run-all needs exists on disk.
  void validate_paths() const;
  bool uses(Component c) const;

  /// The full resolved configuration in KeyValueConfig syntax, absolute paths.
  std::string to_manifest() const;
};

}  // namespace hmrank
