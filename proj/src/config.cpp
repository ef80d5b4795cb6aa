#include "hmrank/config.hpp"

#include <charconv>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "hmrank/corpus_io.hpp"
#include "hmrank/error.hpp"

namespace hmrank {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view key, const std::string& v) {
  auto x = detail::parse_double(v);
  if (!x || !std::isfinite(*x))
    throw ValidationError(fmt::format("config '{}': not a number: '{}'", key, v));
  return *x;
}

long long to_int(std::string_view key, const std::string& v, long long min_value) {
  auto x = detail::parse_int(v);
  if (!x) throw ValidationError(fmt::format("config '{}': not an integer: '{}'", key, v));
  if (*x < min_value)
    throw ValidationError(fmt::format("config '{}': must be >= {}, got {}", key, min_value, *x));
  return *x;
}

std::uint64_t to_seed(std::string_view key, const std::string& v) {
  std::string_view s = v;
  int base = 10;
  if (s.starts_with("0x") || s.starts_with("0X")) {
    s.remove_prefix(2);
    base = 16;
  }
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x, base);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw ValidationError(fmt::format("config '{}': bad seed '{}'", key, v));
  return x;
}

void require_file(const std::filesystem::path& p, std::string_view key) {
  if (p.empty()) throw ValidationError(fmt::format("config '{}' is required", key));
  if (!std::filesystem::is_regular_file(p))
    throw ValidationError(fmt::format("config '{}': no such file '{}'", key, p.string()));
}

std::string absolute_string(const std::filesystem::path& p) {
  if (p.empty()) return {};
  return std::filesystem::absolute(p).lexically_normal().string();
}

}  // namespace

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot read config '{}'", path.string()));
  auto dir = path.parent_path();
  return parse(in, path.string(), dir.empty() ? std::filesystem::path(".") : dir);
}

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& name,
                                     std::filesystem::path base_dir) {
  KeyValueConfig kv;
  kv.base_dir_ = std::move(base_dir);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ParseError(name, line_no, "expected 'key = value'");
    auto key = trim(s.substr(0, eq));
    if (key.empty()) throw ParseError(name, line_no, "empty key");
    kv.entries_.emplace_back(std::string(key), std::string(trim(s.substr(eq + 1))));
  }
  return kv;
}

void KeyValueConfig::set(const std::string& key, std::string value) {
  std::erase_if(entries_, [&](const auto& e) { return e.first == key; });
  entries_.emplace_back(key, std::move(value));
}

void KeyValueConfig::add(const std::string& key, std::string value) {
  entries_.emplace_back(key, std::move(value));
}

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
  std::optional<std::string> value;
  for (const auto& [k, v] : entries_)
    if (k == key) value = v;
  return value;
}

std::vector<std::string> KeyValueConfig::get_all(std::string_view key) const {
  std::vector<std::string> values;
  for (const auto& [k, v] : entries_)
    if (k == key) values.push_back(v);
  return values;
}

const std::vector<std::string>& pipeline_config_keys() {
  static const std::vector<std::string> keys = {
      "corpus",        "topics",        "qrels",          "scores_base",
      "scores_large",  "embeddings",    "candidates",     "output_dir",
      "k1",            "b",             "depth",          "rrf_k",
      "usefulness_threshold",           "max_usefulness", "eval_depth",
      "rbo_p",         "rbo_depth",     "topic_text",     "max_sentences",
      "embedding_dim", "hash_seed",     "baseline",       "workers",
      "run",
  };
  return keys;
}

PipelineConfig PipelineConfig::from(const KeyValueConfig& kv) {
  const auto& known = pipeline_config_keys();
  for (const auto& [k, _] : kv.entries())
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw ValidationError(fmt::format("unknown config key '{}'", k));

  PipelineConfig c;
  auto path = [&](std::string_view key, std::filesystem::path& dst) {
    if (auto v = kv.get(key)) {
      if (v->empty()) {
        dst.clear();
        return;
      }
      std::filesystem::path p(*v);
      dst = p.is_absolute() ? p : kv.base_dir() / p;
    }
  };
  path("corpus", c.corpus);
  path("topics", c.topics);
  path("qrels", c.qrels);
  path("scores_base", c.scores_base);
  path("scores_large", c.scores_large);
  path("embeddings", c.embeddings);
  path("candidates", c.candidates);
  path("output_dir", c.output_dir);

  if (auto v = kv.get("k1")) c.bm25.k1 = to_double("k1", *v);
  if (auto v = kv.get("b")) c.bm25.b = to_double("b", *v);
  if (auto v = kv.get("depth")) c.depth = static_cast<std::size_t>(to_int("depth", *v, 1));
  if (auto v = kv.get("rrf_k")) c.rrf_k = to_double("rrf_k", *v);
  if (auto v = kv.get("usefulness_threshold"))
    c.eval.usefulness_threshold = static_cast<int>(to_int("usefulness_threshold", *v, 1));
  if (auto v = kv.get("max_usefulness"))
    c.max_usefulness = static_cast<int>(to_int("max_usefulness", *v, 1));
  if (auto v = kv.get("eval_depth"))
    c.eval.depth = static_cast<std::size_t>(to_int("eval_depth", *v, 1));
  if (auto v = kv.get("rbo_p")) c.eval.rbo_p = to_double("rbo_p", *v);
  if (auto v = kv.get("rbo_depth"))
    c.eval.rbo_depth = static_cast<std::size_t>(to_int("rbo_depth", *v, 1));
  if (auto v = kv.get("topic_text")) c.topic_text = parse_topic_text(*v);
  if (auto v = kv.get("max_sentences"))
    c.max_sentences = static_cast<std::size_t>(to_int("max_sentences", *v, 1));
  if (auto v = kv.get("embedding_dim"))
    c.embedding_dim = static_cast<std::size_t>(to_int("embedding_dim", *v, 1));
  if (auto v = kv.get("hash_seed")) c.hash_seed = to_seed("hash_seed", *v);
  if (auto v = kv.get("baseline")) c.baseline = *v;
  if (auto v = kv.get("workers"))
    c.workers = static_cast<unsigned>(to_int("workers", *v, 1));

  auto run_lines = kv.get_all("run");
  if (!run_lines.empty()) {
    c.runs.clear();
    for (const auto& line : run_lines) c.runs.push_back(parse_fusion_config(line, c.rrf_k));
  } else {
    c.runs = standard_run_configs(c.rrf_k);
  }
  c.validate_parameters();
  return c;
}

void PipelineConfig::validate_parameters() const {
  bm25.validate();
  if (!(rrf_k > 0.0)) throw ValidationError("rrf_k must be > 0");
  if (!(eval.rbo_p > 0.0 && eval.rbo_p < 1.0))
    throw ValidationError("rbo_p must be in (0, 1)");
  if (eval.usefulness_threshold > max_usefulness)
    throw ValidationError("usefulness_threshold exceeds max_usefulness");
}

void PipelineConfig::validate_runs() const {
  if (runs.empty()) throw ValidationError("no runs configured");
  std::set<std::string> tags;
  for (const auto& r : runs) {
    r.validate();
    if (!tags.insert(r.run_tag).second)
      throw ValidationError(fmt::format("duplicate run tag '{}'", r.run_tag));
  }
  if (!baseline.empty() && !tags.contains(baseline))
    throw ValidationError(fmt::format("baseline '{}' is not a configured run", baseline));
}

bool PipelineConfig::uses(Component c) const {
  return std::any_of(runs.begin(), runs.end(), [&](const FusionConfig& r) {
    return std::find(r.components.begin(), r.components.end(), c) != r.components.end();
  });
}

void PipelineConfig::validate_paths() const {
  require_file(corpus, "corpus");
  require_file(topics, "topics");
  require_file(qrels, "qrels");
  if (uses(Component::qe_base)) require_file(scores_base, "scores_base");
  if (uses(Component::qe_large)) require_file(scores_large, "scores_large");
  if (!embeddings.empty()) require_file(embeddings, "embeddings");
  if (!candidates.empty()) require_file(candidates, "candidates");
  if (output_dir.empty()) throw ValidationError("config 'output_dir' is required");
}

std::string PipelineConfig::to_manifest() const {
  std::string out = "# resolved run-all configuration; usable as --config\n";
  auto put = [&](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  put("corpus", absolute_string(corpus));
  put("topics", absolute_string(topics));
  put("qrels", absolute_string(qrels));
  put("scores_base", absolute_string(scores_base));
  put("scores_large", absolute_string(scores_large));
  put("embeddings", absolute_string(embeddings));
  put("candidates", absolute_string(candidates));
  put("output_dir", absolute_string(output_dir));
  put("k1", fmt::format("{}", bm25.k1));
  put("b", fmt::format("{}", bm25.b));
  put("depth", std::to_string(depth));
  put("rrf_k", fmt::format("{}", rrf_k));
  put("usefulness_threshold", std::to_string(eval.usefulness_threshold));
  put("max_usefulness", std::to_string(max_usefulness));
  put("eval_depth", std::to_string(eval.depth));
  put("rbo_p", fmt::format("{}", eval.rbo_p));
  put("rbo_depth", std::to_string(eval.rbo_depth));
  put("topic_text", std::string(to_string(topic_text)));
  put("max_sentences", std::to_string(max_sentences));
  put("embedding_dim", std::to_string(embedding_dim));
  put("hash_seed", fmt::format("{:#x}", hash_seed));
  put("baseline", baseline);
  put("workers", std::to_string(workers));
  for (const auto& r : runs) put("run", format_fusion_config(r));
  return out;
}

}  // namespace hmrank
