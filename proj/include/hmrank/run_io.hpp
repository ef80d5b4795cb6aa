#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hmrank/types.hpp"

namespace hmrank {

/// Formats one entry as "topic_id Q0 doc_id rank score run_tag", score with
/// six decimals.
std::string format_run_line(const std::string& topic_id, const RunEntry& entry,
                            const std::string& run_tag);

/// Checks the RankedList invariants: ranks 1..n in order, unique doc_ids,
/// scores non-increasing. Throws ValidationError.
void validate_ranked_list(const RankedList& list);

/// Writes lists in the given order. Every list is validated first; nothing is
/// written on failure.
void write_run(std::ostream& out, std::span<const RankedList> lists);
void write_run(const std::filesystem::path& path, std::span<const RankedList> lists);

/// Reads a run file into one RankedList per topic, in order of first
/// appearance. Lines of one topic may appear in any order; they are sorted by
/// rank, which must then be contiguous from 1 with non-increasing scores.
/// Round trip through write_run is exact when scores lie on the 1e-6 grid.
std::vector<RankedList> read_run(std::istream& in, const std::string& name = "<stream>");
std::vector<RankedList> read_run(const std::filesystem::path& path);

}  // namespace hmrank
