#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "rankqa/index.hpp"
#include "rankqa/ranked_list.hpp"

namespace rankqa {

struct ScoredPassage {
  std::string passage_id;
  std::string text;
};

/// A query-passage scorer invoked in batches. Implementations must be
/// safely shareable across concurrent queries.
class Scorer {
public:
  virtual ~Scorer() = default;
  /// One score per passage, order-aligned with the input.
  virtual std::vector<double> score_batch(const std::string& query,
                                          const std::vector<ScoredPassage>& passages) = 0;
  virtual std::string name() const = 0;
};

/// Deterministic lexical scorer: sum of index idf over distinct query
/// terms present in the passage, divided by sqrt(passage token count).
class LexicalScorer : public Scorer {
public:
  explicit LexicalScorer(std::shared_ptr<const InvertedIndex> index)
      : index_(std::move(index)) {}

  std::vector<double> score_batch(const std::string& query,
                                  const std::vector<ScoredPassage>& passages) override;
  std::string name() const override { return "lexical"; }

  /// Scoring rule for a single passage, exposed for oracle checks.
  double score_one(const std::string& query, const std::string& passage_text) const;

private:
  std::shared_ptr<const InvertedIndex> index_;
};

/// Client for the HTTP scoring protocol:
///   POST {endpoint}/v1/score
///   {"query": "...", "candidates": [{"id": "...", "text": "..."}]}
///   -> 200 {"scores": [s1, ...]} positionally aligned.
/// Any non-200 status is a TransportError; a response of the wrong length
/// or with non-numeric entries is a ProtocolError; expiry is a Timeout.
/// In-flight requests across threads are bounded by `max_in_flight`.
class RemoteScorer : public Scorer {
public:
  explicit RemoteScorer(std::string endpoint,
                        std::chrono::milliseconds timeout = std::chrono::milliseconds(5000),
                        std::size_t max_in_flight = 8);
  ~RemoteScorer() override;

  std::vector<double> score_batch(const std::string& query,
                                  const std::vector<ScoredPassage>& passages) override;
  std::string name() const override { return "remote"; }

  const std::string& endpoint() const { return endpoint_; }

private:
  struct Impl;
  std::string endpoint_;
  std::unique_ptr<Impl> impl_;
};

/// Standalone protocol call (one wire request). Used by RemoteScorer and
/// directly testable against the stub server.
std::vector<double> remote_score_batch(const std::string& endpoint, const std::string& query,
                                       const std::vector<ScoredPassage>& passages,
                                       std::chrono::milliseconds timeout);

struct RerankConfig {
  std::size_t rerank_size = 10;  // R
  std::size_t batch_size = 16;

  void validate() const;
};

/// Re-scores the first min(R, |candidates|) entries and sorts them by
/// (score desc, passage_id asc). Entries beyond R keep their full-ranker
/// relative order after the re-scored block, with sentinel scores strictly
/// below it so the RankedList score invariant holds. The scorer sees
/// exactly ceil(min(R, |candidates|) / batch_size) batches; on any scorer
/// error the whole operation fails without partial reordering
/// (ScorerFailure carries the failing batch index).
///
/// `texts` supplies the candidate passage texts, aligned with
/// candidates.entries.
RankedList rerank(Scorer& scorer, const std::string& query, const RankedList& candidates,
                  const std::vector<std::string>& texts, const RerankConfig& config);

}  // namespace rankqa
