#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rankqa/answer.hpp"
#include "rankqa/config.hpp"
#include "rankqa/corpus.hpp"
#include "rankqa/datapack.hpp"
#include "rankqa/eval.hpp"
#include "rankqa/index.hpp"
#include "rankqa/ranked_list.hpp"
#include "rankqa/reranker.hpp"

namespace rankqa {

/// Everything one query accumulates while flowing through the stages. The
/// MultiPack carries the annotation view (query pack, passage packs,
/// cross-links); the typed fields mirror it for direct access.
struct QueryState {
  Query query;
  MultiPack pack;
  RankedList full_rank;
  RankedList re_rank;
  std::optional<AnswerPrediction> prediction;
  std::map<std::string, double> stage_seconds;
};

/// A pipeline stage. Processors annotate (never delete) and must be
/// shareable across concurrent queries.
class Processor {
public:
  virtual ~Processor() = default;
  virtual std::string name() const = 0;
  virtual void process(QueryState& state) const = 0;
};

struct BatchResult {
  std::vector<RankedList> full_rank_run;
  std::vector<RankedList> re_rank_run;
  std::vector<AnswerPrediction> predictions;

  bool evaluated = false;
  EvalReport full_rank_report;
  EvalReport re_rank_report;
  EvalReport qa_report;

  std::size_t processed = 0;
  std::size_t failed = 0;
  std::vector<std::string> failures;  // "qid: stage: message"

  double time_per_query_s = 0.0;
  std::map<std::string, double> stage_time_s;

  // populated when an output directory was given
  std::string full_rank_path;
  std::string re_rank_path;
  std::string predictions_path;
  std::string report_path;
};

/// The composed three-stage flow. Construction loads the index, wires the
/// configured scorer/extractor (probing remote endpoints), and loads
/// qrels/answers when configured. Safe for concurrent process_query calls.
class Pipeline {
public:
  /// Throws ConfigError on invalid configuration and EndpointUnreachable
  /// when a remote scorer/extractor does not answer the probe.
  static Pipeline build(const PipelineConfig& config);

  const PipelineConfig& config() const { return config_; }
  const InvertedIndex& index() const { return *index_; }
  std::vector<std::string> processor_names() const;

  /// Runs all stages for one query; stage errors propagate with the stage
  /// name attached.
  QueryState process_query_state(const Query& query) const;
  /// Spec surface: the annotated MultiPack for one query.
  MultiPack process_query(const Query& query) const;

  /// Processes queries with config.workers threads (per-query isolation,
  /// input order preserved in all outputs). Per-query failures are counted
  /// and the batch continues. When `out_dir` is non-empty, writes
  /// fullrank.run, rerank.run, predictions.tsv and report.json there.
  BatchResult run_batch(const std::vector<Query>& queries, const RelevanceJudgments& qrels,
                        const ReferenceAnswers& answers, const std::string& out_dir = "") const;

private:
  PipelineConfig config_;
  std::shared_ptr<const InvertedIndex> index_;
  std::shared_ptr<Scorer> scorer_;
  std::shared_ptr<Extractor> extractor_;
  std::shared_ptr<const EmbeddingTable> embeddings_;
  RelevanceJudgments qrels_;
  ReferenceAnswers answers_;
  bool has_eval_ = false;
  std::vector<std::shared_ptr<const Processor>> processors_;
};

}  // namespace rankqa
