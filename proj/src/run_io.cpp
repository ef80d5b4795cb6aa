#include "hmrank/run_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "hmrank/corpus_io.hpp"
#include "hmrank/error.hpp"

namespace hmrank {

std::string format_run_line(const std::string& topic_id, const RunEntry& entry,
                            const std::string& run_tag) {
  return fmt::format("{} Q0 {} {} {:.6f} {}", topic_id, entry.doc_id, entry.rank, entry.score,
                     run_tag);
}

void validate_ranked_list(const RankedList& list) {
  if (list.topic_id.empty()) throw ValidationError("ranked list with empty topic_id");
  if (list.run_tag.empty())
    throw ValidationError(fmt::format("topic '{}': empty run_tag", list.topic_id));
  StringSet seen;
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    const auto& e = list.entries[i];
    if (e.rank != static_cast<int>(i + 1))
      throw ValidationError(fmt::format("topic '{}': entry {} has rank {}", list.topic_id, i + 1,
                                        e.rank));
    if (!seen.insert(e.doc_id).second)
      throw ValidationError(
          fmt::format("topic '{}': duplicate doc_id '{}'", list.topic_id, e.doc_id));
    if (i > 0 && e.score > list.entries[i - 1].score)
      throw ValidationError(fmt::format("topic '{}': score increases at rank {}", list.topic_id,
                                        e.rank));
  }
}

void write_run(std::ostream& out, std::span<const RankedList> lists) {
  for (const auto& list : lists) validate_ranked_list(list);
  for (const auto& list : lists)
    for (const auto& e : list.entries)
      out << format_run_line(list.topic_id, e, list.run_tag) << '\n';
}

void write_run(const std::filesystem::path& path, std::span<const RankedList> lists) {
  std::ostringstream buf;
  write_run(buf, lists);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  out << buf.str();
  if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

std::vector<RankedList> read_run(std::istream& in, const std::string& name) {
  std::vector<RankedList> lists;
  std::map<std::string, std::size_t, std::less<>> index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    auto f = detail::split_ws(line);
    if (f.size() != 6)
      throw ParseError(name, line_no, fmt::format("expected 6 fields, got {}", f.size()));
    auto rank = detail::parse_int(f[3]);
    if (!rank || *rank < 1) throw ParseError(name, line_no, fmt::format("bad rank '{}'", f[3]));
    auto score = detail::parse_double(f[4]);
    if (!score) throw ParseError(name, line_no, fmt::format("bad score '{}'", f[4]));
    auto [it, inserted] = index.try_emplace(std::string(f[0]), lists.size());
    if (inserted) {
      lists.push_back(RankedList{std::string(f[0]), std::string(f[5]), {}});
    } else if (lists[it->second].run_tag != f[5]) {
      throw ParseError(name, line_no,
                       fmt::format("run_tag '{}' differs from '{}' earlier in topic '{}'", f[5],
                                   lists[it->second].run_tag, f[0]));
    }
    lists[it->second].entries.push_back(
        RunEntry{std::string(f[2]), *score, static_cast<int>(*rank)});
  }
  for (auto& list : lists) {
    std::stable_sort(list.entries.begin(), list.entries.end(),
                     [](const RunEntry& a, const RunEntry& b) { return a.rank < b.rank; });
    try {
      validate_ranked_list(list);
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("{}: {}", name, e.what()));
    }
  }
  return lists;
}

std::vector<RankedList> read_run(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot read '{}'", path.string()));
  return read_run(in, path.string());
}

}  // namespace hmrank
