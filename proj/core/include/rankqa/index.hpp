#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rankqa/corpus.hpp"
#include "rankqa/ranked_list.hpp"

namespace rankqa {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;

  bool operator==(const Bm25Params&) const = default;
};

struct Posting {
  std::uint32_t ordinal = 0;
  std::uint32_t tf = 0;

  bool operator==(const Posting&) const = default;
};

struct IndexBuildOptions {
  Bm25Params params;
  bool store_texts = true;  // lets rerank/QA stages fetch candidate text
};

/// In-memory inverted index with Okapi BM25 scoring. Immutable after
/// build; concurrent searches are safe.
///
///   score(q, D) = sum over q in query of
///       idf(q) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * |D| / avgdl))
///   idf(q) = ln(1 + (N - df + 0.5) / (df + 0.5))
///
/// The +1-inside-log idf keeps every contribution positive, so documents
/// matching at least one query term always outscore non-matching ones.
class InvertedIndex {
public:
  /// Builds from a passage stream. Throws DuplicatePassageId.
  static InvertedIndex build(std::span<const Passage> passages,
                             const IndexBuildOptions& options = {});

  std::size_t doc_count() const { return doc_lengths_.size(); }
  double avg_doc_length() const { return avg_doc_length_; }
  const Bm25Params& params() const { return params_; }
  bool has_texts() const { return !texts_.empty() || doc_count() == 0; }

  /// Document frequency of a term (0 when absent).
  std::size_t df(const std::string& term) const;
  /// idf(term) in the ln(1 + .) form; 0 for unseen terms.
  double idf(const std::string& term) const;

  const std::string& passage_id(std::uint32_t ordinal) const;
  std::optional<std::uint32_t> ordinal_of(const std::string& passage_id) const;
  /// Stored passage text; throws Error when the index was built without texts.
  const std::string& passage_text(std::uint32_t ordinal) const;
  std::size_t doc_length(std::uint32_t ordinal) const;

  /// BM25 score of one passage for a pre-tokenized query. Terms are summed
  /// in list order (duplicates contribute twice). Throws EmptyIndex on an
  /// empty index and UnknownOrdinal for a bad ordinal.
  double bm25_score(std::span<const std::string> query_terms, std::uint32_t ordinal) const;

  /// Top-n passages by BM25 over the whole corpus, ties broken by
  /// ascending passage_id. Only passages matching at least one query term
  /// appear; an empty index or fully out-of-vocabulary query yields an
  /// empty list. top_n must be >= 1.
  RankedList search(const std::string& query_id, const std::string& query,
                    std::size_t top_n) const;

  /// Versioned binary format, magic "RKQAIDX1". Throws CorruptIndex /
  /// VersionMismatch on load.
  void save(const std::string& path) const;
  static InvertedIndex load(const std::string& path);

  bool operator==(const InvertedIndex& other) const;

private:
  Bm25Params params_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::vector<std::uint64_t> doc_lengths_;
  double avg_doc_length_ = 0.0;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::uint32_t> id_to_ordinal_;
  std::vector<std::string> texts_;

  double term_doc_score(const std::vector<Posting>& postings, double idf,
                        std::uint32_t ordinal) const;
};

}  // namespace rankqa
