#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rankqa/answer.hpp"
#include "rankqa/corpus.hpp"
#include "rankqa/metrics.hpp"
#include "rankqa/ranked_list.hpp"

namespace rankqa {

/// Per-query and aggregate metric values for one stage. Aggregates are the
/// arithmetic means of the per-query values over evaluated queries.
struct EvalReport {
  std::vector<std::pair<std::string, std::map<std::string, double>>> per_query;
  std::map<std::string, double> aggregate;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // queries lacking judgments / references
  std::map<std::string, std::string> config_echo;

  /// Recomputes `aggregate` from per_query; called by the evaluators.
  void finalize();
};

/// RR@n and Recall@n per query for each n in n_values, keyed "mrr@{n}" /
/// "recall@{n}". Queries missing from qrels are skipped and counted.
EvalReport evaluate_run(const std::vector<RankedList>& run, const RelevanceJudgments& qrels,
                        const std::vector<std::size_t>& n_values);

/// BLEU-1..4, ROUGE-L, token precision/recall/F1 and (when a table is
/// given) semantic similarity per prediction, keyed "bleu1".."bleu4",
/// "rouge_l", "precision", "recall", "f1", "semantic_sim". Queries lacking
/// references are skipped and counted.
EvalReport evaluate_qa(const std::vector<PredictionRow>& predictions,
                       const ReferenceAnswers& answers,
                       const EmbeddingTable* table = nullptr);

/// Report JSON for one or more stages; field names are the metric keys
/// above. `timing` entries (e.g. "time_per_query_s") are copied verbatim.
std::string report_to_json(const std::map<std::string, EvalReport>& stages,
                           const std::map<std::string, double>& timing = {},
                           bool include_per_query = true);

/// One row of the fixed-width sweep tables.
struct SweepRow {
  std::size_t rerank_size = 0;
  double time_per_query_s = 0.0;
  std::map<std::string, double> full_rank;  // metric -> aggregate
  std::map<std::string, double> re_rank;
  std::map<std::string, double> qa;
};

/// Ranking table: one row per rerank size, full-ranker and re-ranker
/// MRR@n / Recall@n columns side by side.
std::string render_ranking_table(const std::vector<SweepRow>& rows,
                                 const std::vector<std::size_t>& n_values);

/// QA table: BLEU-1..4, ROUGE-L, precision, recall, F1 and semantic
/// similarity per rerank size.
std::string render_qa_table(const std::vector<SweepRow>& rows, bool with_semantic);

}  // namespace rankqa
