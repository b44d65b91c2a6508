#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rankqa/corpus.hpp"

namespace rankqa {

/// Sentence intervals in codepoint offsets, [begin, end). Splits after
/// '.', '!' or '?' when followed by whitespace and an uppercase letter or
/// digit, or by end of text. An abbreviation guard suppresses the split
/// after initials ("J.") and common titles ("Dr."). The intervals are
/// disjoint, ordered, and cover exactly the non-whitespace extent of the
/// text (leading/trailing whitespace of each sentence is excluded).
std::vector<std::pair<std::size_t, std::size_t>> segment_sentences(const std::string& text);

struct ExtractedSpan {
  std::size_t begin = 0;  // codepoint offsets into the context
  std::size_t end = 0;
  double confidence = 0.0;
};

/// Span extractor over a (query, context) pair. Implementations must be
/// shareable across concurrent queries.
class Extractor {
public:
  virtual ~Extractor() = default;
  virtual ExtractedSpan extract(const std::string& query, const std::string& context) = 0;
  virtual std::string name() const = 0;
};

using IdfFn = std::function<double(const std::string&)>;

/// Deterministic stand-in extractor: each sentence scores the sum of idf
/// over distinct query terms it contains divided by sqrt(sentence token
/// count); the best sentence (earliest on ties) is returned as the span.
/// Confidence is that score normalized by the sum of idf over all distinct
/// query terms, so it lies in [0, 1].
class BaselineExtractor : public Extractor {
public:
  explicit BaselineExtractor(IdfFn idf) : idf_(std::move(idf)) {}

  ExtractedSpan extract(const std::string& query, const std::string& context) override;
  std::string name() const override { return "baseline"; }

private:
  IdfFn idf_;
};

/// One wire call of the extraction protocol:
///   POST {endpoint}/v1/extract {"query": "...", "context": "..."}
///   -> 200 {"begin": b, "end": e, "score": s}
/// Offsets are validated against the context length (codepoints);
/// violations are ProtocolError.
ExtractedSpan remote_extract(const std::string& endpoint, const std::string& query,
                             const std::string& context, std::chrono::milliseconds timeout);

class RemoteExtractor : public Extractor {
public:
  explicit RemoteExtractor(std::string endpoint,
                           std::chrono::milliseconds timeout = std::chrono::milliseconds(5000),
                           std::size_t max_in_flight = 8);
  ~RemoteExtractor() override;

  ExtractedSpan extract(const std::string& query, const std::string& context) override;
  std::string name() const override { return "remote"; }

  const std::string& endpoint() const { return endpoint_; }

private:
  struct Impl;
  std::string endpoint_;
  std::unique_ptr<Impl> impl_;
};

struct AnswerPrediction {
  std::string query_id;
  std::string passage_id;
  std::size_t span_begin = 0;
  std::size_t span_end = 0;
  std::string span_text;
  std::size_t sentence_begin = 0;
  std::size_t sentence_end = 0;
  std::string sentence_text;  // full sentence(s) containing the span
  double confidence = 0.0;
};

/// Runs the extractor on the top passage and expands the returned span to
/// its enclosing sentence (the union of touched sentences when the span
/// straddles a boundary). Throws EmptyContext on an empty passage and
/// ExtractorFailure when the extractor fails or returns invalid offsets.
AnswerPrediction answer_question(Extractor& extractor, const Query& query,
                                 const Passage& top_passage);

/// Predictions file: one `qid<TAB>passage_id<TAB>sentence_text` line per
/// prediction. Tabs/newlines inside the sentence are flattened to spaces.
void write_predictions(const std::vector<AnswerPrediction>& predictions,
                       const std::string& path);

struct PredictionRow {
  std::string query_id;
  std::string passage_id;
  std::string sentence_text;
};

std::vector<PredictionRow> read_predictions(const std::string& path);

}  // namespace rankqa
