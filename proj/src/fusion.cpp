#include "hmrank/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "hmrank/corpus_io.hpp"
#include "hmrank/error.hpp"
#include "hmrank/ranking.hpp"

namespace hmrank {

Component parse_component(std::string_view name) {
  if (name == "bm25") return Component::bm25;
  if (name == "semantic") return Component::semantic;
  if (name == "qe_base") return Component::qe_base;
  if (name == "qe_large") return Component::qe_large;
  throw ValidationError(
      fmt::format("unknown component '{}' (expected bm25|semantic|qe_base|qe_large)", name));
}

std::string_view to_string(Component c) {
  switch (c) {
    case Component::bm25:
      return "bm25";
    case Component::semantic:
      return "semantic";
    case Component::qe_base:
      return "qe_base";
    case Component::qe_large:
      return "qe_large";
  }
  return "?";
}

void FusionConfig::validate() const {
  if (run_tag.empty()) throw ValidationError("fusion config with empty run_tag");
  if (run_tag.find_first_of(" \t\r\n") != std::string::npos)
    throw ValidationError(fmt::format("run_tag '{}' contains whitespace", run_tag));
  if (components.empty())
    throw ValidationError(fmt::format("run '{}' has no components", run_tag));
  for (std::size_t i = 0; i < components.size(); ++i)
    for (std::size_t j = i + 1; j < components.size(); ++j)
      if (components[i] == components[j])
        throw ValidationError(fmt::format("run '{}' repeats component '{}'", run_tag,
                                          to_string(components[i])));
  if (!(rrf_k > 0.0) || !std::isfinite(rrf_k))
    throw ValidationError(fmt::format("run '{}': rrf_k must be > 0", run_tag));
}

std::vector<FusionConfig> standard_run_configs(double rrf_k) {
  using C = Component;
  return {
      {"upv_bm25", {C::bm25}, rrf_k},
      {"upv_fuse_2", {C::bm25, C::semantic}, rrf_k},
      {"upv_fuse_3", {C::bm25, C::qe_base}, rrf_k},
      {"upv_fuse_5", {C::bm25, C::qe_large}, rrf_k},
      {"upv_fuse_7", {C::bm25, C::semantic, C::qe_base}, rrf_k},
      {"upv_fuse_9", {C::bm25, C::semantic, C::qe_large}, rrf_k},
  };
}

FusionConfig parse_fusion_config(std::string_view line, double default_rrf_k) {
  auto f = detail::split_ws(line);
  if (f.size() < 2 || f.size() > 3)
    throw ValidationError(
        fmt::format("run config '{}': expected 'run_tag components [rrf_k]'", line));
  FusionConfig config;
  config.run_tag = std::string(f[0]);
  std::string_view comps = f[1];
  std::size_t pos = 0;
  while (pos <= comps.size()) {
    auto comma = comps.find(',', pos);
    if (comma == std::string_view::npos) comma = comps.size();
    config.components.push_back(parse_component(comps.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  config.rrf_k = default_rrf_k;
  if (f.size() == 3) {
    auto k = detail::parse_double(f[2]);
    if (!k) throw ValidationError(fmt::format("run config '{}': bad rrf_k '{}'", line, f[2]));
    config.rrf_k = *k;
  }
  config.validate();
  return config;
}

std::string format_fusion_config(const FusionConfig& config) {
  std::string comps;
  for (auto c : config.components) {
    if (!comps.empty()) comps.push_back(',');
    comps += to_string(c);
  }
  return fmt::format("{} {} {}", config.run_tag, comps, config.rrf_k);
}

std::vector<FusionConfig> load_fusion_configs(const std::filesystem::path& path,
                                              double default_rrf_k) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot read '{}'", path.string()));
  std::vector<FusionConfig> configs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line) || line.find_first_not_of(" \t") == line.find('#')) continue;
    try {
      configs.push_back(parse_fusion_config(line, default_rrf_k));
    } catch (const ValidationError& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return configs;
}

RankedList rrf_fuse(std::span<const RankedList> lists, double k) {
  if (!(k > 0.0)) throw ValidationError("rrf k must be > 0");
  if (lists.empty()) throw ValidationError("rrf_fuse needs at least one list");
  RankedList out{lists.front().topic_id, {}, {}};
  StringMap<std::size_t> slot;
  for (const auto& list : lists) {
    if (list.topic_id != out.topic_id)
      throw ValidationError(fmt::format("rrf_fuse: topic mismatch '{}' vs '{}'", out.topic_id,
                                        list.topic_id));
    for (const auto& e : list.entries) {
      if (e.rank < 1)
        throw ValidationError(fmt::format("rrf_fuse: rank {} for '{}'", e.rank, e.doc_id));
      auto [it, inserted] = slot.try_emplace(e.doc_id, out.entries.size());
      if (inserted) out.entries.push_back(RunEntry{e.doc_id, 0.0, 0});
      out.entries[it->second].score += 1.0 / (k + static_cast<double>(e.rank));
    }
  }
  sort_and_rank(out.entries);
  return out;
}

std::vector<RankedList> build_run(const FusionConfig& config, const ComponentRuns& components,
                                  std::span<const std::string> topic_ids, std::size_t depth) {
  config.validate();
  if (depth == 0) throw ValidationError("run depth must be >= 1");
  std::vector<RankedList> run;
  run.reserve(topic_ids.size());
  std::vector<RankedList> inputs;
  for (const auto& topic_id : topic_ids) {
    inputs.clear();
    for (auto c : config.components) {
      auto by_topic = components.find(c);
      if (by_topic == components.end())
        throw ValidationError(fmt::format("run '{}': no '{}' lists", config.run_tag, to_string(c)));
      auto list = by_topic->second.find(topic_id);
      if (list == by_topic->second.end())
        throw ValidationError(fmt::format("run '{}': component '{}' has no list for topic '{}'",
                                          config.run_tag, to_string(c), topic_id));
      inputs.push_back(list->second);
    }
    RankedList out;
    if (inputs.size() == 1) {
      out = std::move(inputs.front());
      if (out.entries.size() > depth) out.entries.resize(depth);
    } else {
      out = rrf_fuse(inputs, config.rrf_k);
      if (out.entries.size() > depth) out.entries.resize(depth);
    }
    out.topic_id = topic_id;
    out.run_tag = config.run_tag;
    run.push_back(std::move(out));
  }
  return run;
}

}  // namespace hmrank
