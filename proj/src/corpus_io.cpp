#include "hmrank/corpus_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "hmrank/error.hpp"

namespace hmrank {

namespace detail {

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  constexpr std::string_view ws = " \t\r\n\f\v";
  std::size_t pos = line.find_first_not_of(ws);
  while (pos != std::string_view::npos) {
    std::size_t end = line.find_first_of(ws, pos);
    if (end == std::string_view::npos) end = line.size();
    fields.push_back(line.substr(pos, end - pos));
    pos = line.find_first_not_of(ws, end);
  }
  return fields;
}

std::optional<long long> parse_int(std::string_view s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot read '{}'", path.string()));
  return in;
}

bool has_whitespace(std::string_view s) {
  return s.find_first_of(" \t\r\n\f\v") != std::string_view::npos;
}

std::string required_string(const nlohmann::json& obj, const char* key, const std::string& path,
                            std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string())
    throw ParseError(path, line_no, fmt::format("missing string field '{}'", key));
  return it->get<std::string>();
}

std::string optional_string(const nlohmann::json& obj, const char* key, const std::string& path,
                            std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string())
    throw ParseError(path, line_no, fmt::format("field '{}' must be a string", key));
  return it->get<std::string>();
}

/// Calls fn(json_object, line_no) for every non-blank line.
template <class Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
  auto in = open_input(path);
  const std::string name = path.string();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object())
      throw ParseError(name, line_no, "not a JSON object");
    fn(obj, line_no);
  }
}

void check_id(std::string_view id, const char* what, const std::string& path,
              std::size_t line_no) {
  if (id.empty()) throw ParseError(path, line_no, fmt::format("empty {}", what));
  if (has_whitespace(id))
    throw ParseError(path, line_no, fmt::format("{} '{}' contains whitespace", what, id));
}

BinaryLabel parse_label(std::string_view field, const char* what, const std::string& path,
                        std::size_t line_no) {
  auto v = detail::parse_int(field);
  if (!v || *v < -1 || *v > 1)
    throw ParseError(path, line_no, fmt::format("{} must be -1, 0 or 1, got '{}'", what, field));
  return static_cast<BinaryLabel>(*v);
}

}  // namespace

DocumentStore::DocumentStore(std::vector<Document> docs) : docs_(std::move(docs)) {
  by_id_.reserve(docs_.size());
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    if (docs_[i].doc_id.empty()) throw ValidationError("document with empty doc_id");
    if (!by_id_.emplace(docs_[i].doc_id, i).second)
      throw ValidationError(fmt::format("duplicate doc_id '{}'", docs_[i].doc_id));
  }
}

const Document* DocumentStore::find(std::string_view doc_id) const {
  auto it = by_id_.find(doc_id);
  return it == by_id_.end() ? nullptr : &docs_[it->second];
}

TopicSet::TopicSet(std::vector<Topic> topics) : topics_(std::move(topics)) {
  for (std::size_t i = 0; i < topics_.size(); ++i) {
    if (topics_[i].topic_id.empty()) throw ValidationError("topic with empty topic_id");
    if (!by_id_.emplace(topics_[i].topic_id, i).second)
      throw ValidationError(fmt::format("duplicate topic_id '{}'", topics_[i].topic_id));
  }
}

const Topic* TopicSet::find(std::string_view topic_id) const {
  auto it = by_id_.find(topic_id);
  return it == by_id_.end() ? nullptr : &topics_[it->second];
}

DocumentStore load_corpus(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::vector<Document> docs;
  StringMap<std::size_t> seen;
  for_each_json_line(path, [&](const nlohmann::json& obj, std::size_t line_no) {
    Document d;
    d.doc_id = required_string(obj, "doc_id", name, line_no);
    d.url = optional_string(obj, "url", name, line_no);
    d.text = required_string(obj, "text", name, line_no);
    check_id(d.doc_id, "doc_id", name, line_no);
    auto [it, inserted] = seen.emplace(d.doc_id, line_no);
    if (!inserted)
      throw ParseError(name, line_no,
                       fmt::format("duplicate doc_id '{}' (first seen on line {})", d.doc_id,
                                   it->second));
    docs.push_back(std::move(d));
  });
  return DocumentStore(std::move(docs));
}

TopicSet load_topics(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::vector<Topic> topics;
  StringMap<std::size_t> seen;
  for_each_json_line(path, [&](const nlohmann::json& obj, std::size_t line_no) {
    Topic t;
    t.topic_id = required_string(obj, "topic_id", name, line_no);
    t.query = required_string(obj, "query", name, line_no);
    t.description = optional_string(obj, "description", name, line_no);
    check_id(t.topic_id, "topic_id", name, line_no);
    if (detail::is_blank(t.query))
      throw ParseError(name, line_no, fmt::format("topic '{}' has an empty query", t.topic_id));
    auto [it, inserted] = seen.emplace(t.topic_id, line_no);
    if (!inserted)
      throw ParseError(name, line_no,
                       fmt::format("duplicate topic_id '{}' (first seen on line {})", t.topic_id,
                                   it->second));
    topics.push_back(std::move(t));
  });
  return TopicSet(std::move(topics));
}

void Qrels::add(AspectJudgment judgment) {
  auto& topic = topics_[judgment.topic_id];
  if (!topic.by_doc.emplace(judgment.doc_id, topic.judgments.size()).second)
    throw ValidationError(fmt::format("duplicate judgment for topic '{}' doc '{}'",
                                      judgment.topic_id, judgment.doc_id));
  topic.judgments.push_back(std::move(judgment));
  ++count_;
}

const std::vector<AspectJudgment>* Qrels::topic(std::string_view topic_id) const {
  auto it = topics_.find(topic_id);
  return it == topics_.end() ? nullptr : &it->second.judgments;
}

const AspectJudgment* Qrels::find(std::string_view topic_id, std::string_view doc_id) const {
  auto it = topics_.find(topic_id);
  if (it == topics_.end()) return nullptr;
  auto d = it->second.by_doc.find(doc_id);
  return d == it->second.by_doc.end() ? nullptr : &it->second.judgments[d->second];
}

std::vector<std::string> Qrels::topic_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, _] : topics_) ids.push_back(id);
  return ids;
}

Qrels load_qrels(const std::filesystem::path& path, int max_usefulness) {
  if (max_usefulness < 0) throw ValidationError("max usefulness grade must be >= 0");
  auto in = open_input(path);
  const std::string name = path.string();
  Qrels qrels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    auto f = detail::split_ws(line);
    if (f.size() != 6)
      throw ParseError(name, line_no, fmt::format("expected 6 fields, got {}", f.size()));
    if (f[1] != "0") throw ParseError(name, line_no, "second field must be the literal 0");
    AspectJudgment j;
    j.topic_id = std::string(f[0]);
    j.doc_id = std::string(f[2]);
    auto grade = detail::parse_int(f[3]);
    if (!grade) throw ParseError(name, line_no, fmt::format("non-integer usefulness '{}'", f[3]));
    if (*grade < 0 || *grade > max_usefulness)
      throw ParseError(name, line_no,
                       fmt::format("usefulness {} outside [0, {}]", *grade, max_usefulness));
    j.usefulness = static_cast<int>(*grade);
    j.correctness = parse_label(f[4], "correctness", name, line_no);
    j.credibility = parse_label(f[5], "credibility", name, line_no);
    try {
      qrels.add(std::move(j));
    } catch (const ValidationError& e) {
      throw ParseError(name, line_no, e.what());
    }
  }
  return qrels;
}

bool aspect_holds(const AspectJudgment& j, Aspect aspect, int usefulness_threshold) {
  switch (aspect) {
    case Aspect::useful:
      return j.usefulness >= usefulness_threshold;
    case Aspect::correct:
      return j.correctness == BinaryLabel::yes;
    case Aspect::credible:
      return j.credibility == BinaryLabel::yes;
  }
  return false;
}

bool is_relevant(const AspectJudgment& j, AspectSet combo, int usefulness_threshold) {
  if (combo.empty()) throw ValidationError("empty aspect combination");
  for (Aspect a : {Aspect::useful, Aspect::correct, Aspect::credible})
    if (combo.contains(a) && !aspect_holds(j, a, usefulness_threshold)) return false;
  return true;
}

BinaryQrels derive_binary_qrels(const Qrels& qrels, AspectSet combo, int usefulness_threshold) {
  if (combo.empty()) throw ValidationError("empty aspect combination");
  if (usefulness_threshold < 1) throw ValidationError("usefulness threshold must be >= 1");
  BinaryQrels out;
  for (const auto& topic_id : qrels.topic_ids()) {
    auto& rel = out[topic_id];
    for (const auto& j : *qrels.topic(topic_id))
      if (is_relevant(j, combo, usefulness_threshold)) rel.insert(j.doc_id);
  }
  return out;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  auto in = open_input(path);
  const std::string name = path.string();
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    auto f = detail::split_ws(line);
    if (!have_header) {
      auto dim = detail::parse_int(f[0]);
      if (f.size() != 1 || !dim || *dim <= 0)
        throw ParseError(name, line_no, "header must be a single positive dimension");
      table.dim = static_cast<std::size_t>(*dim);
      have_header = true;
      continue;
    }
    if (f.size() != table.dim + 1)
      throw ParseError(name, line_no,
                       fmt::format("expected {} values, got {}", table.dim, f.size() - 1));
    std::vector<double> v(table.dim);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < table.dim; ++i) {
      auto x = detail::parse_double(f[i + 1]);
      if (!x || !std::isfinite(*x))
        throw ParseError(name, line_no, fmt::format("bad vector component '{}'", f[i + 1]));
      v[i] = *x;
      norm2 += *x * *x;
    }
    std::string id(f[0]);
    if (norm2 == 0.0) table.zero_norm_ids.push_back(id);
    if (!table.vectors.emplace(id, std::move(v)).second)
      throw ParseError(name, line_no, fmt::format("duplicate id '{}'", id));
  }
  if (!have_header) throw ValidationError(fmt::format("'{}': missing dimension header", name));
  return table;
}

void write_embeddings(const std::filesystem::path& path, std::size_t dim,
                      const std::vector<EmbeddingRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  out << dim << '\n';
  for (const auto& r : records) {
    if (r.vector.size() != dim)
      throw ValidationError(fmt::format("record '{}' has dim {}, expected {}", r.id,
                                        r.vector.size(), dim));
    out << r.id;
    for (double x : r.vector) out << ' ' << fmt::format("{}", x);
    out << '\n';
  }
}

CandidatePools load_candidate_pools(const std::filesystem::path& path) {
  auto in = open_input(path);
  const std::string name = path.string();
  CandidatePools pools;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    auto f = detail::split_ws(line);
    if (f.size() != 2) throw ParseError(name, line_no, "expected 'topic_id doc_id'");
    pools[std::string(f[0])].emplace(f[1]);
  }
  return pools;
}

}  // namespace hmrank
