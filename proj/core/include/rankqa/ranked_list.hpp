#pragma once

#include <string>
#include <vector>

namespace rankqa {

enum class Stage { FullRank, ReRank };

std::string to_string(Stage stage);

struct ScoredEntry {
  std::string passage_id;
  double score = 0.0;

  bool operator==(const ScoredEntry&) const = default;
};

/// Ordered results for one query: scores non-increasing, passage ids
/// distinct, tagged with the stage that produced it.
struct RankedList {
  std::string query_id;
  Stage stage = Stage::FullRank;
  std::vector<ScoredEntry> entries;

  bool operator==(const RankedList&) const = default;
};

/// Appends one TREC run line per entry:
///   qid Q0 passage_id rank score run_tag
/// space-separated, rank 1-based, score with 6 decimal places.
std::string to_trec_lines(const RankedList& list, const std::string& run_tag);

/// Writes a whole run (query order preserved) to `path`.
void write_trec_run(const std::vector<RankedList>& run, const std::string& run_tag,
                    const std::string& path);

/// Reads a TREC run file back into per-query RankedLists (file order).
/// The stage tag is not part of the format; `stage` is applied to all lists.
std::vector<RankedList> read_trec_run(const std::string& path, Stage stage = Stage::FullRank);

}  // namespace rankqa
