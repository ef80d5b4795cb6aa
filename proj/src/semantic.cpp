#include "hmrank/semantic.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "hmrank/bm25.hpp"
#include "hmrank/error.hpp"
#include "hmrank/ranking.hpp"

namespace hmrank {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::vector<std::string> segment_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    auto s = trim(text.substr(start, end - start));
    if (!s.empty()) sentences.emplace_back(s);
    start = end;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if ((c == '.' || c == '!' || c == '?') && (i + 1 == text.size() || is_space(text[i + 1])))
      emit(i + 1);
  }
  emit(text.size());
  return sentences;
}

std::string truncate_for_embedding(std::string_view text, std::size_t limit) {
  if (limit == 0) throw ValidationError("sentence limit must be >= 1");
  auto sentences = segment_sentences(text);
  std::string out;
  for (std::size_t i = 0; i < sentences.size() && i < limit; ++i) {
    if (i) out.push_back(' ');
    out += sentences[i];
  }
  return out;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw ValidationError(fmt::format("cosine: dimension mismatch {} vs {}", u.size(), v.size()));
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  const double c = dot / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp(c, -1.0, 1.0);
}

TopicText parse_topic_text(std::string_view s) {
  if (s == "query") return TopicText::query;
  if (s == "description") return TopicText::description;
  if (s == "both") return TopicText::both;
  throw ValidationError(fmt::format("topic text must be query|description|both, got '{}'", s));
}

std::string_view to_string(TopicText t) {
  switch (t) {
    case TopicText::query:
      return "query";
    case TopicText::description:
      return "description";
    case TopicText::both:
      return "both";
  }
  return "query";
}

FileEmbeddingProvider::FileEmbeddingProvider(EmbeddingTable table) : table_(std::move(table)) {
  if (table_.dim == 0) throw ValidationError("embedding table has dimension 0");
}

const std::vector<double>& FileEmbeddingProvider::lookup(const std::string& id) const {
  auto it = table_.vectors.find(id);
  if (it == table_.vectors.end())
    throw ValidationError(fmt::format("no embedding for id '{}'", id));
  return it->second;
}

std::vector<double> FileEmbeddingProvider::document_vector(const Document& doc) const {
  return lookup(doc.doc_id);
}

std::vector<double> FileEmbeddingProvider::topic_vector(const Topic& topic) const {
  return lookup(topic.topic_id);
}

std::uint64_t hash_token(std::string_view token, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (char c : token) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

HashedEmbeddingProvider::HashedEmbeddingProvider(Options options) : options_(options) {
  if (options_.dim == 0) throw ValidationError("hashed embedding dim must be >= 1");
  if (options_.max_sentences == 0) throw ValidationError("max sentences must be >= 1");
}

std::vector<double> HashedEmbeddingProvider::embed_text(std::string_view text) const {
  std::vector<double> v(options_.dim, 0.0);
  for (const auto& tok : tokenize(text)) v[hash_token(tok, options_.seed) % options_.dim] += 1.0;
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
  }
  return v;
}

std::vector<double> HashedEmbeddingProvider::document_vector(const Document& doc) const {
  return embed_text(truncate_for_embedding(doc.text, options_.max_sentences));
}

std::vector<double> HashedEmbeddingProvider::topic_vector(const Topic& topic) const {
  switch (options_.topic_text) {
    case TopicText::query:
      return embed_text(topic.query);
    case TopicText::description:
      return embed_text(topic.description);
    case TopicText::both:
      return embed_text(topic.query + " " + topic.description);
  }
  return embed_text(topic.query);
}

RankedList semantic_rank(const Topic& topic, std::span<const Document* const> candidates,
                         const EmbeddingProvider& provider) {
  RankedList out{topic.topic_id, {}, {}};
  const auto q = provider.topic_vector(topic);
  out.entries.reserve(candidates.size());
  StringSet seen;
  for (const Document* doc : candidates) {
    if (!seen.insert(doc->doc_id).second)
      throw ValidationError(fmt::format("duplicate candidate '{}'", doc->doc_id));
    out.entries.push_back(RunEntry{doc->doc_id, cosine(q, provider.document_vector(*doc)), 0});
  }
  sort_and_rank(out.entries);
  return out;
}

}  // namespace hmrank
