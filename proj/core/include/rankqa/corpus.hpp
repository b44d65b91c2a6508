#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rankqa/errors.hpp"

namespace rankqa {

struct Document {
  std::string doc_id;
  std::string title;
  std::string body;
};

/// An indexable text unit. Native passages keep chunk_index 0 and
/// passage_id == doc_id; chunks get "<doc_id>#<chunk_index>".
struct Passage {
  std::string passage_id;
  std::string doc_id;
  std::size_t chunk_index = 0;
  std::string text;
  std::size_t token_begin = 0;  // token offsets into the source document body
  std::size_t token_end = 0;

  bool operator==(const Passage&) const = default;
};

struct Query {
  std::string query_id;
  std::string text;
};

/// query_id -> set of relevant passage ids (only rel > 0 kept).
using RelevanceJudgments = std::map<std::string, std::set<std::string>>;

/// query_id -> reference answer strings.
using ReferenceAnswers = std::map<std::string, std::vector<std::string>>;

struct ReaderOptions {
  bool fail_fast = true;  // otherwise malformed lines are skipped and counted
};

struct ReaderStats {
  std::size_t read = 0;
  std::size_t skipped = 0;
};

/// Reads `pid<TAB>text` lines; one Passage per line in file order.
/// Throws MalformedLine (fail_fast) or counts the line as skipped.
std::vector<Passage> read_passage_collection(const std::string& path,
                                             const ReaderOptions& options = {},
                                             ReaderStats* stats = nullptr);

/// Streaming variant; `sink` is called once per passage in file order.
ReaderStats for_each_passage(const std::string& path,
                             const std::function<void(Passage&&)>& sink,
                             const ReaderOptions& options = {});

/// Reads `qid<TAB>text` lines.
std::vector<Query> read_queries(const std::string& path, const ReaderOptions& options = {},
                                ReaderStats* stats = nullptr);

/// Reads whitespace-separated `qid 0 pid rel` lines, dropping rel <= 0.
RelevanceJudgments read_qrels(const std::string& path, const ReaderOptions& options = {},
                              ReaderStats* stats = nullptr);

/// Reads `qid<TAB>answer` lines; repeated qid accumulates references.
ReferenceAnswers read_answers(const std::string& path, const ReaderOptions& options = {},
                              ReaderStats* stats = nullptr);

/// Reads a `doc_id<TAB>title` manifest plus `<fulltext_dir>/<doc_id>.json`
/// files of the form {"paragraphs": ["...", ...]}. body = title and the
/// paragraphs joined with single newlines; a missing full-text file
/// degrades to a title-only document.
std::vector<Document> read_cord_corpus(const std::string& metadata_path,
                                       const std::string& fulltext_dir);

struct ChunkParams {
  std::size_t window = 60;
  std::size_t overlap = 15;
};

/// Splits a document body into overlapping token windows. Chunk k covers
/// tokens [k*(window-overlap), k*(window-overlap)+window) clipped to the
/// document; chunks are generated while their start is inside the body.
/// Tokenization is plain whitespace split.
std::vector<Passage> chunk_document(const Document& doc, const ChunkParams& params = {});

}  // namespace rankqa
