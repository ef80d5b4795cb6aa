#include "hmrank/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <istream>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "hmrank/error.hpp"
#include "hmrank/ranking.hpp"

namespace hmrank {

namespace {

constexpr std::string_view kIndexMagic = "hmrank-index";
constexpr int kIndexVersion = 1;

bool is_alnum(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

struct PartialIndex {
  StringMap<std::vector<InvertedIndex::Posting>> postings;
  std::vector<std::uint32_t> lengths;
};

PartialIndex index_range(const DocumentStore& store, std::size_t begin, std::size_t end) {
  PartialIndex part;
  part.lengths.reserve(end - begin);
  StringMap<std::uint32_t> counts;
  for (std::size_t d = begin; d < end; ++d) {
    counts.clear();
    auto tokens = tokenize(store[d].text);
    for (auto& t : tokens) ++counts[std::move(t)];
    part.lengths.push_back(static_cast<std::uint32_t>(tokens.size()));
    for (auto& [term, tf] : counts)
      part.postings[term].push_back({static_cast<std::uint32_t>(d), tf});
  }
  return part;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_alnum(c)) {
      current.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

void Bm25Params::validate() const {
  if (!(k1 > 0.0) || !std::isfinite(k1))
    throw ValidationError(fmt::format("BM25 k1 must be > 0, got {}", k1));
  if (!(b >= 0.0 && b <= 1.0))
    throw ValidationError(fmt::format("BM25 b must be in [0, 1], got {}", b));
}

InvertedIndex InvertedIndex::build(const DocumentStore& store, Bm25Params params,
                                   unsigned workers) {
  if (store.empty()) throw ValidationError("cannot index an empty document store");
  params.validate();
  if (store.size() > std::numeric_limits<std::uint32_t>::max())
    throw ValidationError("too many documents for 32-bit doc indices");

  const std::size_t n = store.size();
  const std::size_t parts = std::clamp<std::size_t>(workers, 1, n);
  std::vector<PartialIndex> partials(parts);
  auto range_begin = [&](std::size_t p) { return n * p / parts; };
  if (parts == 1) {
    partials[0] = index_range(store, 0, n);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t p = 0; p < parts; ++p)
      threads.emplace_back([&, p] {
        partials[p] = index_range(store, range_begin(p), range_begin(p + 1));
      });
  }

  InvertedIndex index;
  index.params_ = params;
  index.doc_ids_.reserve(n);
  for (const auto& d : store.documents()) index.doc_ids_.push_back(d.doc_id);

  // Ranges are contiguous and ascending, so appending in part order keeps
  // every postings list sorted by doc.
  StringMap<std::vector<Posting>> merged;
  for (auto& part : partials) {
    index.doc_lengths_.insert(index.doc_lengths_.end(), part.lengths.begin(), part.lengths.end());
    for (auto& [term, list] : part.postings) {
      auto& dst = merged[term];
      dst.insert(dst.end(), list.begin(), list.end());
    }
  }
  index.terms_.reserve(merged.size());
  for (const auto& [term, _] : merged) index.terms_.push_back(term);
  std::sort(index.terms_.begin(), index.terms_.end());
  index.postings_.reserve(index.terms_.size());
  for (const auto& term : index.terms_) index.postings_.push_back(std::move(merged[term]));
  index.finalize();
  return index;
}

void InvertedIndex::finalize() {
  std::uint64_t total = 0;
  for (auto len : doc_lengths_) total += len;
  avg_doc_length_ =
      doc_lengths_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(doc_lengths_.size());
  term_lookup_.clear();
  term_lookup_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i)
    term_lookup_.emplace(terms_[i], static_cast<std::uint32_t>(i));
  doc_lookup_.clear();
  doc_lookup_.reserve(doc_ids_.size());
  for (std::size_t i = 0; i < doc_ids_.size(); ++i)
    doc_lookup_.emplace(doc_ids_[i], static_cast<std::uint32_t>(i));
}

std::optional<std::uint32_t> InvertedIndex::find_doc(std::string_view doc_id) const {
  auto it = doc_lookup_.find(doc_id);
  if (it == doc_lookup_.end()) return std::nullopt;
  return it->second;
}

std::span<const InvertedIndex::Posting> InvertedIndex::postings(std::string_view term) const {
  auto it = term_lookup_.find(term);
  if (it == term_lookup_.end()) return {};
  return postings_[it->second];
}

std::uint32_t InvertedIndex::tf(std::string_view term, std::uint32_t doc) const {
  auto list = postings(term);
  auto it = std::lower_bound(list.begin(), list.end(), doc,
                             [](const Posting& p, std::uint32_t d) { return p.doc < d; });
  return (it != list.end() && it->doc == doc) ? it->tf : 0;
}

bool InvertedIndex::operator==(const InvertedIndex& other) const {
  return params_ == other.params_ && doc_ids_ == other.doc_ids_ &&
         doc_lengths_ == other.doc_lengths_ && terms_ == other.terms_ &&
         postings_ == other.postings_;
}

// Line-based format:
//   hmrank-index 1
//   k1 <k1>
//   b <b>
//   documents <N>
//   avgdl <avgdl>
//   terms <T>
//   doc <doc_id> <length>            N lines, index order
//   term <term> <df> <doc>:<tf> ...  T lines, lexicographic order
void InvertedIndex::save(std::ostream& out) const {
  out << kIndexMagic << ' ' << kIndexVersion << '\n';
  out << fmt::format("k1 {}\nb {}\n", params_.k1, params_.b);
  out << "documents " << doc_ids_.size() << '\n';
  out << fmt::format("avgdl {}\n", avg_doc_length_);
  out << "terms " << terms_.size() << '\n';
  for (std::size_t d = 0; d < doc_ids_.size(); ++d)
    out << "doc " << doc_ids_[d] << ' ' << doc_lengths_[d] << '\n';
  std::string line;
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    line = fmt::format("term {} {}", terms_[t], postings_[t].size());
    for (const auto& p : postings_[t]) fmt::format_to(std::back_inserter(line), " {}:{}", p.doc, p.tf);
    line.push_back('\n');
    out << line;
  }
}

InvertedIndex InvertedIndex::load(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&](std::string_view expect_key) {
    if (!std::getline(in, line)) throw ParseError("<index>", line_no + 1, "unexpected end of index");
    ++line_no;
    auto f = detail::split_ws(line);
    if (f.empty() || f[0] != expect_key)
      throw ParseError("<index>", line_no, fmt::format("expected '{}'", expect_key));
    return f;
  };
  auto as_uint = [&](std::string_view s) {
    auto v = detail::parse_int(s);
    if (!v || *v < 0) throw ParseError("<index>", line_no, fmt::format("bad integer '{}'", s));
    return static_cast<std::uint64_t>(*v);
  };
  auto as_double = [&](std::string_view s) {
    auto v = detail::parse_double(s);
    if (!v) throw ParseError("<index>", line_no, fmt::format("bad number '{}'", s));
    return *v;
  };

  auto header = next(kIndexMagic);
  if (header.size() != 2 || as_uint(header[1]) != kIndexVersion)
    throw ParseError("<index>", line_no, "unsupported index version");
  InvertedIndex index;
  index.params_.k1 = as_double(next("k1").at(1));
  index.params_.b = as_double(next("b").at(1));
  index.params_.validate();
  const auto n = as_uint(next("documents").at(1));
  const double avgdl = as_double(next("avgdl").at(1));
  const auto term_count = as_uint(next("terms").at(1));

  index.doc_ids_.reserve(n);
  index.doc_lengths_.reserve(n);
  for (std::uint64_t d = 0; d < n; ++d) {
    auto f = next("doc");
    if (f.size() != 3) throw ParseError("<index>", line_no, "expected 'doc <id> <length>'");
    index.doc_ids_.emplace_back(f[1]);
    index.doc_lengths_.push_back(static_cast<std::uint32_t>(as_uint(f[2])));
  }
  index.terms_.reserve(term_count);
  index.postings_.reserve(term_count);
  for (std::uint64_t t = 0; t < term_count; ++t) {
    auto f = next("term");
    if (f.size() < 3) throw ParseError("<index>", line_no, "expected 'term <term> <df> ...'");
    const auto df = as_uint(f[2]);
    if (f.size() != 3 + df) throw ParseError("<index>", line_no, "df disagrees with postings");
    std::vector<Posting> list;
    list.reserve(df);
    for (std::size_t i = 3; i < f.size(); ++i) {
      auto colon = f[i].find(':');
      if (colon == std::string_view::npos) throw ParseError("<index>", line_no, "bad posting");
      auto doc = as_uint(f[i].substr(0, colon));
      if (doc >= n || (!list.empty() && doc <= list.back().doc))
        throw ParseError("<index>", line_no, "postings not sorted or out of range");
      list.push_back({static_cast<std::uint32_t>(doc),
                      static_cast<std::uint32_t>(as_uint(f[i].substr(colon + 1)))});
    }
    if (!index.terms_.empty() && f[1] <= index.terms_.back())
      throw ParseError("<index>", line_no, "terms not in lexicographic order");
    index.terms_.emplace_back(f[1]);
    index.postings_.push_back(std::move(list));
  }
  index.finalize();
  if (fmt::format("{}", index.avg_doc_length_) != fmt::format("{}", avgdl))
    throw ValidationError("index avgdl disagrees with stored document lengths");
  return index;
}

double bm25_idf(std::size_t doc_count, std::size_t df) {
  const double n = static_cast<double>(doc_count);
  const double f = static_cast<double>(df);
  return std::log(1.0 + (n - f + 0.5) / (f + 0.5));
}

double bm25_tf_component(double tf, double doc_length, double avg_doc_length,
                         const Bm25Params& params) {
  if (tf <= 0.0) return 0.0;
  const double norm = avg_doc_length > 0.0 ? doc_length / avg_doc_length : 0.0;
  return tf * (params.k1 + 1.0) / (tf + params.k1 * (1.0 - params.b + params.b * norm));
}

double bm25_score(std::span<const std::string> query_tokens, std::uint32_t doc,
                  const InvertedIndex& index, const Bm25Params& params) {
  double score = 0.0;
  for (const auto& term : query_tokens) {
    const auto list = index.postings(term);
    if (list.empty()) continue;
    const auto tf = index.tf(term, doc);
    if (tf == 0) continue;
    score += bm25_idf(index.doc_count(), list.size()) *
             bm25_tf_component(tf, index.doc_length(doc), index.avg_doc_length(), params);
  }
  return score;
}

RankedList search(const Topic& topic, const InvertedIndex& index, const Bm25Params& params,
                  std::size_t k, const StringSet* allowlist) {
  if (k == 0) throw ValidationError("search depth k must be >= 1");
  params.validate();
  RankedList result{topic.topic_id, {}, {}};
  const auto tokens = tokenize(topic.query);

  std::vector<char> allowed;
  if (allowlist) {
    allowed.assign(index.doc_count(), 0);
    for (const auto& id : *allowlist)
      if (auto d = index.find_doc(id)) allowed[*d] = 1;
  }

  // Term-at-a-time accumulation in query order, matching bm25_score's
  // summation order exactly.
  std::vector<double> acc(index.doc_count(), 0.0);
  std::vector<std::uint32_t> touched;
  std::vector<char> seen(index.doc_count(), 0);
  for (const auto& term : tokens) {
    const auto list = index.postings(term);
    if (list.empty()) continue;
    const double idf = bm25_idf(index.doc_count(), list.size());
    for (const auto& p : list) {
      if (allowlist && !allowed[p.doc]) continue;
      acc[p.doc] +=
          idf * bm25_tf_component(p.tf, index.doc_length(p.doc), index.avg_doc_length(), params);
      if (!seen[p.doc]) {
        seen[p.doc] = 1;
        touched.push_back(p.doc);
      }
    }
  }

  result.entries.reserve(touched.size());
  for (auto d : touched)
    if (acc[d] > 0.0) result.entries.push_back(RunEntry{index.doc_id(d), acc[d], 0});
  sort_and_rank(result.entries, k);
  return result;
}

}  // namespace hmrank
