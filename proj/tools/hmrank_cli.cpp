// hmrank: index, search, rerank, fuse and evaluate health-search runs.
//
// Every config key is also a flag (--k1, --rrf-k, --output-dir, ...); flags
// override the --config file. Exit codes: 0 ok, 1 validation, 2 runtime.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hmrank/bm25.hpp"
#include "hmrank/config.hpp"
#include "hmrank/error.hpp"
#include "hmrank/evaluation.hpp"
#include "hmrank/fusion.hpp"
#include "hmrank/pipeline.hpp"
#include "hmrank/quality.hpp"
#include "hmrank/run_io.hpp"
#include "hmrank/semantic.hpp"

namespace {

using namespace hmrank;

const std::set<std::string> kPathKeys = {"corpus",     "topics",     "qrels",
                                         "scores_base", "scores_large", "embeddings",
                                         "candidates", "output_dir"};

/// Flags shared by every subcommand: --config plus one flag per config key.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::vector<std::string> runs;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    for (const auto& key : pipeline_config_keys()) {
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (key == "run") {
        app->add_option(flag, runs, "run config 'tag comp1,comp2 [rrf_k]' (repeatable)");
      } else {
        app->add_option(flag, values[key], "config key '" + key + "'");
      }
    }
  }

  PipelineConfig resolve(CLI::App* app) const {
    KeyValueConfig kv;
    if (!config_path.empty()) kv = KeyValueConfig::load(config_path);
    for (const auto& [key, value] : values) {
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (app->count(flag) == 0) continue;
      // Flag paths are relative to the working directory, not the config.
      if (kPathKeys.contains(key) && !value.empty())
        kv.set(key, std::filesystem::absolute(value).string());
      else
        kv.set(key, value);
    }
    if (!runs.empty()) {
      kv.set("run", runs.front());
      for (std::size_t i = 1; i < runs.size(); ++i) kv.add("run", runs[i]);
    }
    return PipelineConfig::from(kv);
  }
};

void require_path(const std::filesystem::path& p, std::string_view key) {
  if (p.empty()) throw ValidationError(fmt::format("--{} is required", key));
  if (!std::filesystem::is_regular_file(p))
    throw ValidationError(fmt::format("{}: no such file '{}'", key, p.string()));
}

InvertedIndex load_index_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot read index '{}'", path.string()));
  return InvertedIndex::load(in);
}

void write_index_file(const InvertedIndex& index, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  index.save(out);
}

void retag(std::vector<RankedList>& lists, const std::string& tag) {
  for (auto& l : lists) l.run_tag = tag;
}

int cmd_index(const PipelineConfig& cfg, std::filesystem::path output) {
  require_path(cfg.corpus, "corpus");
  if (output.empty()) output = cfg.output_dir / "index.txt";
  const auto store = load_corpus(cfg.corpus);
  const auto index = InvertedIndex::build(store, cfg.bm25, cfg.workers);
  write_index_file(index, output);
  std::cout << fmt::format("{} documents, {} terms, avgdl {:.4f} -> {}\n", index.doc_count(),
                           index.term_count(), index.avg_doc_length(), output.string());
  return 0;
}

int cmd_search(const PipelineConfig& cfg, const std::filesystem::path& index_path,
               const std::filesystem::path& output, const std::string& tag) {
  require_path(cfg.topics, "topics");
  const auto topics = load_topics(cfg.topics);
  InvertedIndex index;
  if (!index_path.empty()) {
    index = load_index_file(index_path);
  } else {
    require_path(cfg.corpus, "corpus");
    index = InvertedIndex::build(load_corpus(cfg.corpus), cfg.bm25, cfg.workers);
  }
  std::optional<CandidatePools> pools;
  if (!cfg.candidates.empty()) pools = load_candidate_pools(cfg.candidates);
  auto lists = run_bm25(topics, index, cfg, pools ? &*pools : nullptr);
  retag(lists, tag);
  write_run(output, lists);
  std::cout << fmt::format("{} topics -> {}\n", lists.size(), output.string());
  return 0;
}

int cmd_rerank(const PipelineConfig& cfg, const std::string& method,
               const std::filesystem::path& base_run, std::filesystem::path scores_path,
               const std::filesystem::path& output, const std::string& tag) {
  std::vector<RankedList> lists;
  if (method == "semantic") {
    require_path(cfg.corpus, "corpus");
    require_path(cfg.topics, "topics");
    const auto store = load_corpus(cfg.corpus);
    const auto topics = load_topics(cfg.topics);
    std::optional<CandidatePools> pools;
    if (!cfg.candidates.empty()) pools = load_candidate_pools(cfg.candidates);
    const auto provider = make_embedding_provider(cfg);
    lists = run_semantic(topics, store, *provider, cfg, pools ? &*pools : nullptr);
  } else {
    require_path(base_run, "run");
    if (scores_path.empty()) scores_path = cfg.scores_base;
    require_path(scores_path, "scores");
    const auto base = read_run(base_run);
    const auto scores = load_criterion_scores(scores_path);
    std::size_t missing = 0;
    lists = run_quality(base, scores, cfg.workers, &missing);
    if (missing)
      std::cerr << fmt::format("warning: {} documents have no criterion scores\n", missing);
  }
  retag(lists, tag);
  write_run(output, lists);
  std::cout << fmt::format("{} topics -> {}\n", lists.size(), output.string());
  return 0;
}

int cmd_fuse(const PipelineConfig& cfg, const std::vector<std::string>& inputs,
             const std::filesystem::path& output, const std::string& tag) {
  if (inputs.empty()) throw ValidationError("--input needs at least one run file");
  std::vector<std::map<std::string, RankedList, std::less<>>> files;
  std::vector<std::string> topic_order;
  for (const auto& path : inputs) {
    auto& by_topic = files.emplace_back();
    for (auto& l : read_run(std::filesystem::path(path))) {
      if (files.size() == 1) topic_order.push_back(l.topic_id);
      by_topic.emplace(l.topic_id, std::move(l));
    }
  }
  std::vector<RankedList> fused;
  for (const auto& topic_id : topic_order) {
    std::vector<RankedList> lists;
    for (std::size_t f = 0; f < files.size(); ++f) {
      auto it = files[f].find(topic_id);
      if (it == files[f].end())
        throw ValidationError(fmt::format("'{}' has no list for topic '{}'", inputs[f], topic_id));
      lists.push_back(it->second);
    }
    RankedList out = lists.size() == 1 ? lists.front() : rrf_fuse(lists, cfg.rrf_k);
    if (out.entries.size() > cfg.depth) out.entries.resize(cfg.depth);
    out.run_tag = tag;
    fused.push_back(std::move(out));
  }
  write_run(output, fused);
  std::cout << fmt::format("fused {} runs over {} topics (rrf_k {}) -> {}\n", inputs.size(),
                           fused.size(), cfg.rrf_k, output.string());
  return 0;
}

int cmd_eval(const PipelineConfig& cfg, const std::vector<std::string>& inputs,
             const std::string& text_out, const std::string& tsv_out, bool baseline_given) {
  require_path(cfg.qrels, "qrels");
  if (inputs.empty()) throw ValidationError("--input needs at least one run file");
  const auto qrels = load_qrels(cfg.qrels, cfg.max_usefulness);
  std::vector<RankedList> all;
  for (const auto& path : inputs) {
    auto lists = read_run(std::filesystem::path(path));
    all.insert(all.end(), std::make_move_iterator(lists.begin()),
               std::make_move_iterator(lists.end()));
  }
  const auto runs = group_runs(all);
  // Without an explicit baseline, flag against the configured one only if it
  // was among the inputs.
  std::string baseline = cfg.baseline;
  if (!baseline_given &&
      std::none_of(runs.begin(), runs.end(), [&](const Run& r) { return r.tag == baseline; }))
    baseline.clear();
  const auto table = evaluate_runs(runs, qrels, cfg.eval, baseline);
  for (const auto& row : table.rows)
    for (const auto& t : row.skipped_topics)
      std::cerr << fmt::format("warning: {}: topic '{}' has no judgments, skipped\n", row.run_tag,
                               t);
  write_table_text(std::cout, table);
  if (!text_out.empty()) {
    std::ofstream out(text_out, std::ios::binary);
    write_table_text(out, table);
  }
  if (!tsv_out.empty()) {
    std::ofstream out(tsv_out, std::ios::binary);
    write_table_tsv(out, table);
  }
  return 0;
}

int cmd_run_all(const PipelineConfig& cfg) {
  const auto result = run_all(cfg);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  std::ostringstream table;
  write_table_text(table, result.table);
  std::cout << table.str();
  std::cout << fmt::format("{} run files, manifest {}\n", result.run_files.size(),
                           result.manifest.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Health-search retrieval, fusion and multi-aspect evaluation"};
  app.require_subcommand(1);

  ConfigFlags index_flags, search_flags, rerank_flags, fuse_flags, eval_flags, all_flags;
  std::string index_out, search_index, search_out, search_tag = "upv_bm25";
  std::string rerank_method, rerank_run, rerank_scores, rerank_out, rerank_tag;
  std::vector<std::string> fuse_inputs, eval_inputs;
  std::string fuse_out, fuse_tag, eval_text, eval_tsv;

  auto* index_cmd = app.add_subcommand("index", "Build and serialize the BM25 index");
  index_flags.attach(index_cmd);
  index_cmd->add_option("-o,--output", index_out, "index file (default <output-dir>/index.txt)");

  auto* search_cmd = app.add_subcommand("search", "BM25 retrieval for every topic");
  search_flags.attach(search_cmd);
  search_cmd->add_option("--index", search_index, "serialized index (else built from --corpus)");
  search_cmd->add_option("-o,--output", search_out, "run file")->required();
  search_cmd->add_option("--tag", search_tag, "run tag");

  auto* rerank_cmd = app.add_subcommand("rerank", "Semantic ranking or quality re-ranking");
  rerank_flags.attach(rerank_cmd);
  rerank_cmd->add_option("--method", rerank_method, "semantic|quality")
      ->required()
      ->check(CLI::IsMember({"semantic", "quality"}));
  rerank_cmd->add_option("--base-run", rerank_run, "run file to re-rank (quality)");
  rerank_cmd->add_option("--scores", rerank_scores, "criterion-score file (quality)");
  rerank_cmd->add_option("-o,--output", rerank_out, "run file")->required();
  rerank_cmd->add_option("--tag", rerank_tag, "run tag")->required();

  auto* fuse_cmd = app.add_subcommand("fuse", "Reciprocal rank fusion of run files");
  fuse_flags.attach(fuse_cmd);
  fuse_cmd->add_option("-i,--input", fuse_inputs, "run files")->required();
  fuse_cmd->add_option("-o,--output", fuse_out, "run file")->required();
  fuse_cmd->add_option("--tag", fuse_tag, "run tag")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Multi-aspect evaluation of run files");
  eval_flags.attach(eval_cmd);
  eval_cmd->add_option("-i,--input", eval_inputs, "run files")->required();
  eval_cmd->add_option("--table", eval_text, "write the aligned table here too");
  eval_cmd->add_option("--tsv", eval_tsv, "write machine-readable rows here");

  auto* all_cmd = app.add_subcommand("run-all", "Index, retrieve, re-rank, fuse and evaluate");
  all_flags.attach(all_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (index_cmd->parsed()) return cmd_index(index_flags.resolve(index_cmd), index_out);
    if (search_cmd->parsed())
      return cmd_search(search_flags.resolve(search_cmd), search_index, search_out, search_tag);
    if (rerank_cmd->parsed())
      return cmd_rerank(rerank_flags.resolve(rerank_cmd), rerank_method, rerank_run,
                        rerank_scores, rerank_out, rerank_tag);
    if (fuse_cmd->parsed())
      return cmd_fuse(fuse_flags.resolve(fuse_cmd), fuse_inputs, fuse_out, fuse_tag);
    if (eval_cmd->parsed())
      return cmd_eval(eval_flags.resolve(eval_cmd), eval_inputs, eval_text, eval_tsv,
                      eval_cmd->count("--baseline") > 0);
    if (all_cmd->parsed()) return cmd_run_all(all_flags.resolve(all_cmd));
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
