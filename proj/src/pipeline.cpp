#include "hmrank/pipeline.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "hmrank/error.hpp"
#include "hmrank/parallel.hpp"
#include "hmrank/run_io.hpp"

namespace hmrank {

namespace {

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

/// Runs `fn` and rethrows anything but a StageError as one for `stage`.
template <class Fn>
auto in_stage(const std::string& stage, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, "", e.what());
  }
}

/// Per-topic variant: failures name the topic.
template <class Fn>
std::vector<RankedList> per_topic(const std::string& stage, const std::vector<std::string>& ids,
                                  unsigned workers, Fn&& fn) {
  std::vector<RankedList> out(ids.size());
  parallel_for(ids.size(), workers, [&](std::size_t i) {
    try {
      out[i] = fn(i);
    } catch (const std::exception& e) {
      throw StageError(stage, ids[i], e.what());
    }
  });
  return out;
}

std::vector<std::string> topic_ids(const TopicSet& topics) {
  std::vector<std::string> ids;
  for (const auto& t : topics.topics()) ids.push_back(t.topic_id);
  return ids;
}

}  // namespace

std::vector<const Document*> topic_candidates(const DocumentStore& store,
                                              const CandidatePools* pools,
                                              const std::string& topic_id, std::size_t* unknown) {
  std::vector<const Document*> docs;
  if (!pools) {
    docs.reserve(store.size());
    for (const auto& d : store.documents()) docs.push_back(&d);
    return docs;
  }
  auto it = pools->find(topic_id);
  if (it == pools->end()) return docs;
  std::size_t known = 0;
  for (const auto& d : store.documents())
    if (it->second.contains(d.doc_id)) {
      docs.push_back(&d);
      ++known;
    }
  if (unknown) *unknown += it->second.size() - known;
  return docs;
}

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const PipelineConfig& config) {
  if (!config.embeddings.empty())
    return std::make_unique<FileEmbeddingProvider>(load_embeddings(config.embeddings));
  HashedEmbeddingProvider::Options opts;
  opts.dim = config.embedding_dim;
  opts.seed = config.hash_seed;
  opts.max_sentences = config.max_sentences;
  opts.topic_text = config.topic_text;
  return std::make_unique<HashedEmbeddingProvider>(opts);
}

std::vector<RankedList> run_bm25(const TopicSet& topics, const InvertedIndex& index,
                                 const PipelineConfig& config, const CandidatePools* pools) {
  static const StringSet kEmptyPool;
  const auto ids = topic_ids(topics);
  return per_topic("search", ids, config.workers, [&](std::size_t i) {
    const StringSet* allow = nullptr;
    if (pools) {
      auto it = pools->find(ids[i]);
      allow = it == pools->end() ? &kEmptyPool : &it->second;
    }
    auto list = search(topics.topics()[i], index, config.bm25, config.depth, allow);
    list.run_tag = std::string(to_string(Component::bm25));
    return list;
  });
}

std::vector<RankedList> run_semantic(const TopicSet& topics, const DocumentStore& store,
                                     const EmbeddingProvider& provider,
                                     const PipelineConfig& config, const CandidatePools* pools) {
  const auto ids = topic_ids(topics);
  return per_topic("semantic", ids, config.workers, [&](std::size_t i) {
    const auto candidates = topic_candidates(store, pools, ids[i]);
    auto list = semantic_rank(topics.topics()[i], candidates, provider);
    list.run_tag = std::string(to_string(Component::semantic));
    return list;
  });
}

std::vector<RankedList> run_quality(std::span<const RankedList> base, const CriterionScores& scores,
                                    unsigned workers, std::size_t* missing) {
  std::vector<std::string> ids;
  for (const auto& l : base) ids.push_back(l.topic_id);
  std::vector<std::size_t> miss(base.size(), 0);
  auto out = per_topic("quality", ids, workers, [&](std::size_t i) {
    auto r = rerank_by_quality(base[i], scores);
    miss[i] = r.missing;
    return std::move(r.list);
  });
  if (missing)
    for (auto m : miss) *missing += m;
  return out;
}

RunAllResult run_all(const PipelineConfig& config) {
  config.validate_parameters();
  config.validate_runs();
  config.validate_paths();

  RunAllResult result;
  const auto& out_dir = config.output_dir;
  in_stage("output", [&] {
    std::filesystem::create_directories(out_dir / "components");
    std::filesystem::create_directories(out_dir / "runs");
    return 0;
  });

  const auto store = in_stage("load", [&] { return load_corpus(config.corpus); });
  const auto topics = in_stage("load", [&] { return load_topics(config.topics); });
  const auto qrels = in_stage("load", [&] { return load_qrels(config.qrels, config.max_usefulness); });
  std::optional<CandidatePools> pools;
  if (!config.candidates.empty())
    pools = in_stage("load", [&] { return load_candidate_pools(config.candidates); });
  const CandidatePools* pool_ptr = pools ? &*pools : nullptr;
  if (pools) {
    for (const auto& t : topics.topics())
      if (!pools->contains(t.topic_id))
        result.warnings.push_back(fmt::format("topic '{}' has no candidate pool", t.topic_id));
    std::size_t unknown = 0;
    for (const auto& t : topics.topics()) topic_candidates(store, pool_ptr, t.topic_id, &unknown);
    if (unknown)
      result.warnings.push_back(
          fmt::format("{} candidate pool entries name unknown documents", unknown));
  }

  const auto index = in_stage("index", [&] {
    auto idx = InvertedIndex::build(store, config.bm25, config.workers);
    std::ostringstream buf;
    idx.save(buf);
    write_text_file(out_dir / "index.txt", buf.str());
    return idx;
  });

  ComponentRuns components;
  std::vector<std::string> ids;
  for (const auto& t : topics.topics()) ids.push_back(t.topic_id);
  auto store_component = [&](Component c, std::vector<RankedList> lists) {
    in_stage("write", [&] {
      write_run(out_dir / "components" / fmt::format("{}.run", to_string(c)), lists);
      return 0;
    });
    auto& by_topic = components[c];
    for (auto& l : lists) by_topic.emplace(l.topic_id, std::move(l));
  };

  auto bm25_lists = run_bm25(topics, index, config, pool_ptr);
  if (config.uses(Component::semantic)) {
    auto provider = in_stage("semantic", [&] { return make_embedding_provider(config); });
    store_component(Component::semantic,
                    run_semantic(topics, store, *provider, config, pool_ptr));
  }
  for (auto [c, path] : {std::pair{Component::qe_base, config.scores_base},
                         std::pair{Component::qe_large, config.scores_large}}) {
    if (!config.uses(c)) continue;
    const auto scores = in_stage("quality", [&] { return load_criterion_scores(path); });
    std::size_t missing = 0;
    auto lists = run_quality(bm25_lists, scores, config.workers, &missing);
    for (auto& l : lists) l.run_tag = std::string(to_string(c));
    if (missing)
      result.warnings.push_back(
          fmt::format("{}: {} retrieved documents have no criterion scores", to_string(c), missing));
    store_component(c, std::move(lists));
  }
  store_component(Component::bm25, std::move(bm25_lists));

  std::vector<Run> runs;
  for (const auto& rc : config.runs) {
    auto lists = in_stage("fuse", [&] { return build_run(rc, components, ids, config.depth); });
    auto path = out_dir / "runs" / fmt::format("{}.run", rc.run_tag);
    in_stage("write", [&] {
      write_run(path, lists);
      return 0;
    });
    result.run_files.push_back(path);
    runs.push_back(Run{rc.run_tag, std::move(lists)});
  }

  result.table = in_stage("eval", [&] {
    return evaluate_runs(runs, qrels, config.eval, config.baseline);
  });
  result.eval_text = out_dir / "eval.txt";
  result.eval_tsv = out_dir / "eval.tsv";
  result.manifest = out_dir / "manifest.conf";
  in_stage("write", [&] {
    std::ostringstream text, tsv;
    write_table_text(text, result.table);
    write_table_tsv(tsv, result.table);
    write_text_file(result.eval_text, text.str());
    write_text_file(result.eval_tsv, tsv.str());
    write_text_file(result.manifest, config.to_manifest());
    return 0;
  });
  return result;
}

}  // namespace hmrank
