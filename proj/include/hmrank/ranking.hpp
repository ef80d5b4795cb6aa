#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "hmrank/types.hpp"

namespace hmrank {

/// Strict weak order used for every ranking in the toolkit: descending score,
/// then ascending doc_id.
inline bool ranks_before(const RunEntry& a, const RunEntry& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.doc_id < b.doc_id;
}

/// Sorts by `ranks_before`, keeps at most `depth` entries, and renumbers
/// ranks from 1.
inline void sort_and_rank(std::vector<RunEntry>& entries,
                          std::size_t depth = static_cast<std::size_t>(-1)) {
  if (depth < entries.size()) {
    std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(depth),
                      entries.end(), ranks_before);
    entries.resize(depth);
  } else {
    std::sort(entries.begin(), entries.end(), ranks_before);
  }
  for (std::size_t i = 0; i < entries.size(); ++i) entries[i].rank = static_cast<int>(i + 1);
}

inline std::vector<std::string> doc_ids(const RankedList& list) {
  std::vector<std::string> ids;
  ids.reserve(list.entries.size());
  for (const auto& e : list.entries) ids.push_back(e.doc_id);
  return ids;
}

}  // namespace hmrank
