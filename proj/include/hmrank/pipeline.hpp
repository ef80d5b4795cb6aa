#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hmrank/bm25.hpp"
#include "hmrank/config.hpp"
#include "hmrank/corpus_io.hpp"
#include "hmrank/evaluation.hpp"
#include "hmrank/fusion.hpp"
#include "hmrank/quality.hpp"
#include "hmrank/semantic.hpp"

namespace hmrank {

/// Candidate documents per topic, in corpus order: the topic's pool when one
/// is given, otherwise the whole corpus. Pool ids unknown to the store are
/// counted in `unknown`.
std::vector<const Document*> topic_candidates(const DocumentStore& store,
                                              const CandidatePools* pools,
                                              const std::string& topic_id,
                                              std::size_t* unknown = nullptr);

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const PipelineConfig& config);

/// BM25 top-`depth` lists, one per topic in topic order.
std::vector<RankedList> run_bm25(const TopicSet& topics, const InvertedIndex& index,
                                 const PipelineConfig& config, const CandidatePools* pools);

/// Semantic lists over each topic's candidates.
std::vector<RankedList> run_semantic(const TopicSet& topics, const DocumentStore& store,
                                     const EmbeddingProvider& provider,
                                     const PipelineConfig& config, const CandidatePools* pools);

/// Quality re-ranking of each base list. `missing` accumulates the number of
/// documents without a criterion vector.
std::vector<RankedList> run_quality(std::span<const RankedList> base, const CriterionScores& scores,
                                    unsigned workers, std::size_t* missing = nullptr);

struct RunAllResult {
  std::vector<std::filesystem::path> run_files;
  std::filesystem::path manifest;
  std::filesystem::path eval_text;
  std::filesystem::path eval_tsv;
  ResultTable table;
  std::vector<std::string> warnings;
};

/// Index, retrieve, re-rank, fuse and evaluate. Writes under output_dir:
///   index.txt, components/<component>.run, runs/<run_tag>.run,
///   eval.txt, eval.tsv, manifest.conf
/// Throws ValidationError before any stage runs, StageError afterwards.
RunAllResult run_all(const PipelineConfig& config);

}  // namespace hmrank
