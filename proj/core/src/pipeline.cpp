#include "rankqa/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "rankqa/errors.hpp"
#include "rankqa/text.hpp"

namespace rankqa {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string passage_pack_name(const std::string& passage_id) {
  return "passage_" + passage_id;
}

class QueryPackProcessor : public Processor {
public:
  std::string name() const override { return "query_pack"; }

  void process(QueryState& state) const override {
    DataPack pack(state.query.text);
    pack.set_metadata("query_id", state.query.query_id);
    pack.add_span("Query", 0, pack.length());
    state.pack.add_pack("query", std::move(pack));
  }
};

class FullRankProcessor : public Processor {
public:
  FullRankProcessor(std::shared_ptr<const InvertedIndex> index, std::size_t top_n)
      : index_(std::move(index)), top_n_(top_n) {}

  std::string name() const override { return "full_rank"; }

  void process(QueryState& state) const override {
    state.full_rank = index_->search(state.query.query_id, state.query.text, top_n_);

    DataPack& query_pack = state.pack.pack("query");
    if (state.full_rank.entries.empty()) {
      query_pack.set_metadata("empty_results", "true");
      return;
    }
    const AnnotationId query_span = query_pack.get_spans("Query").front().id;
    std::size_t rank = 1;
    for (const auto& entry : state.full_rank.entries) {
      const auto ordinal = index_->ordinal_of(entry.passage_id);
      DataPack passage_pack(index_->passage_text(*ordinal));
      passage_pack.set_metadata("passage_id", entry.passage_id);
      passage_pack.set_metadata("fullrank_rank", std::to_string(rank));
      passage_pack.set_metadata("fullrank_score", format_double(entry.score));
      const AnnotationId passage_span =
          passage_pack.add_span("Passage", 0, passage_pack.length());
      const std::string pack_name = passage_pack_name(entry.passage_id);
      state.pack.add_pack(pack_name, std::move(passage_pack));
      state.pack.add_cross_link("Retrieval", {"query", query_span},
                                {pack_name, passage_span});
      ++rank;
    }
  }

private:
  std::shared_ptr<const InvertedIndex> index_;
  std::size_t top_n_;
};

class RerankProcessor : public Processor {
public:
  RerankProcessor(std::shared_ptr<const InvertedIndex> index, std::shared_ptr<Scorer> scorer,
                  RerankConfig config)
      : index_(std::move(index)), scorer_(std::move(scorer)), config_(config) {}

  std::string name() const override { return "rerank"; }

  void process(QueryState& state) const override {
    state.re_rank.query_id = state.query.query_id;
    state.re_rank.stage = Stage::ReRank;
    if (state.full_rank.entries.empty()) return;

    std::vector<std::string> texts;
    texts.reserve(state.full_rank.entries.size());
    for (const auto& entry : state.full_rank.entries) {
      texts.push_back(index_->passage_text(*index_->ordinal_of(entry.passage_id)));
    }
    state.re_rank = rerank(*scorer_, state.query.text, state.full_rank, texts, config_);

    std::size_t rank = 1;
    for (const auto& entry : state.re_rank.entries) {
      DataPack& pack = state.pack.pack(passage_pack_name(entry.passage_id));
      pack.set_metadata("rerank_rank", std::to_string(rank));
      pack.set_metadata("rerank_score", format_double(entry.score));
      ++rank;
    }
  }

private:
  std::shared_ptr<const InvertedIndex> index_;
  std::shared_ptr<Scorer> scorer_;
  RerankConfig config_;
};

class AnswerProcessor : public Processor {
public:
  AnswerProcessor(std::shared_ptr<const InvertedIndex> index,
                  std::shared_ptr<Extractor> extractor, std::size_t top_k)
      : index_(std::move(index)), extractor_(std::move(extractor)), top_k_(top_k) {}

  std::string name() const override { return "answer"; }

  void process(QueryState& state) const override {
    if (state.re_rank.entries.empty()) return;  // nothing retrieved, no QA

    const std::size_t k = std::min(top_k_, state.re_rank.entries.size());
    std::optional<AnswerPrediction> best;
    for (std::size_t i = 0; i < k; ++i) {
      const auto& entry = state.re_rank.entries[i];
      Passage passage;
      passage.passage_id = entry.passage_id;
      const auto hash = entry.passage_id.find('#');
      passage.doc_id = entry.passage_id.substr(0, hash);
      passage.text = index_->passage_text(*index_->ordinal_of(entry.passage_id));
      if (passage.text.empty()) continue;
      AnswerPrediction prediction = answer_question(*extractor_, state.query, passage);
      // highest confidence wins; ties keep the higher-ranked passage
      if (!best || prediction.confidence > best->confidence) best = std::move(prediction);
    }
    if (!best) return;

    DataPack& pack = state.pack.pack(passage_pack_name(best->passage_id));
    pack.add_span("AnswerSpan", best->span_begin, best->span_end,
                  {{"confidence", AttrValue(best->confidence)}});
    pack.add_span("AnswerSentence", best->sentence_begin, best->sentence_end);
    state.prediction = std::move(best);
  }

private:
  std::shared_ptr<const InvertedIndex> index_;
  std::shared_ptr<Extractor> extractor_;
  std::size_t top_k_;
};

class EvaluateProcessor : public Processor {
public:
  EvaluateProcessor(const RelevanceJudgments* qrels, const ReferenceAnswers* answers,
                    std::vector<std::size_t> n_values,
                    std::shared_ptr<const EmbeddingTable> table)
      : qrels_(qrels), answers_(answers), n_values_(std::move(n_values)),
        table_(std::move(table)) {}

  std::string name() const override { return "evaluate"; }

  void process(QueryState& state) const override {
    DataPack& query_pack = state.pack.pack("query");
    if (qrels_ != nullptr) {
      auto judged = qrels_->find(state.query.query_id);
      if (judged != qrels_->end() && !judged->second.empty()) {
        annotate_ranking(query_pack, "fullrank", state.full_rank, judged->second);
        annotate_ranking(query_pack, "rerank", state.re_rank, judged->second);
      }
    }
    if (answers_ != nullptr && state.prediction) {
      auto refs = answers_->find(state.query.query_id);
      if (refs != answers_->end() && !refs->second.empty()) {
        const auto& sentence = state.prediction->sentence_text;
        for (int n = 1; n <= 4; ++n) {
          query_pack.set_metadata("qa.bleu" + std::to_string(n),
                                  format_double(bleu_n(sentence, refs->second, n)));
        }
        query_pack.set_metadata("qa.rouge_l",
                                format_double(rouge_l(sentence, refs->second)));
        const TokenPrf prf = token_prf(sentence, refs->second);
        query_pack.set_metadata("qa.f1", format_double(prf.f1));
        if (table_) {
          double best = 0.0;
          for (const auto& reference : refs->second) {
            best = std::max(best, semantic_similarity(sentence, reference, *table_));
          }
          query_pack.set_metadata("qa.semantic_sim", format_double(best));
        }
      }
    }
  }

private:
  void annotate_ranking(DataPack& query_pack, const std::string& prefix,
                        const RankedList& list, const std::set<std::string>& relevant) const {
    std::vector<std::string> ranking;
    ranking.reserve(list.entries.size());
    for (const auto& entry : list.entries) ranking.push_back(entry.passage_id);
    for (std::size_t n : n_values_) {
      query_pack.set_metadata(
          prefix + ".mrr@" + std::to_string(n),
          format_double(reciprocal_rank_at_n(ranking, relevant, n)));
      query_pack.set_metadata(prefix + ".recall@" + std::to_string(n),
                              format_double(recall_at_n(ranking, relevant, n)));
    }
  }

  const RelevanceJudgments* qrels_;
  const ReferenceAnswers* answers_;
  std::vector<std::size_t> n_values_;
  std::shared_ptr<const EmbeddingTable> table_;
};

}  // namespace

Pipeline Pipeline::build(const PipelineConfig& config) {
  config.validate();
  if (config.index.empty()) throw ConfigError("index", "path required");

  Pipeline pipeline;
  pipeline.config_ = config;
  try {
    pipeline.index_ = std::make_shared<const InvertedIndex>(InvertedIndex::load(config.index));
  } catch (const CorruptIndex&) {
    throw;
  } catch (const VersionMismatch&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("index", e.what());
  }
  if (!pipeline.index_->has_texts()) {
    throw ConfigError("index", "built without stored texts; rerank/QA need them");
  }

  const auto timeout = std::chrono::milliseconds(config.timeout_ms);
  if (config.scorer == "builtin") {
    pipeline.scorer_ = std::make_shared<LexicalScorer>(pipeline.index_);
  } else {
    auto remote = std::make_shared<RemoteScorer>(config.scorer, timeout, config.max_in_flight);
    try {
      remote->score_batch("", {});  // reachability probe, a legal empty request
    } catch (const Error& e) {
      throw EndpointUnreachable("scorer endpoint " + config.scorer + ": " + e.what());
    }
    pipeline.scorer_ = std::move(remote);
  }
  if (config.extractor == "builtin") {
    auto index = pipeline.index_;
    pipeline.extractor_ = std::make_shared<BaselineExtractor>(
        [index](const std::string& term) { return index->idf(term); });
  } else {
    auto remote =
        std::make_shared<RemoteExtractor>(config.extractor, timeout, config.max_in_flight);
    try {
      remote->extract("", "");
    } catch (const Error& e) {
      throw EndpointUnreachable("extractor endpoint " + config.extractor + ": " + e.what());
    }
    pipeline.extractor_ = std::move(remote);
  }

  if (!config.embeddings.empty()) {
    pipeline.embeddings_ =
        std::make_shared<const EmbeddingTable>(EmbeddingTable::load(config.embeddings));
  }
  if (!config.qrels.empty()) pipeline.qrels_ = read_qrels(config.qrels);
  if (!config.answers.empty()) pipeline.answers_ = read_answers(config.answers);
  pipeline.has_eval_ = !config.qrels.empty() || !config.answers.empty();

  pipeline.processors_.push_back(std::make_shared<QueryPackProcessor>());
  pipeline.processors_.push_back(
      std::make_shared<FullRankProcessor>(pipeline.index_, config.full_rank_top_n));
  pipeline.processors_.push_back(std::make_shared<RerankProcessor>(
      pipeline.index_, pipeline.scorer_,
      RerankConfig{config.rerank_size, config.rerank_batch_size}));
  pipeline.processors_.push_back(
      std::make_shared<AnswerProcessor>(pipeline.index_, pipeline.extractor_, config.qa_top_k));
  if (pipeline.has_eval_) {
    pipeline.processors_.push_back(std::make_shared<EvaluateProcessor>(
        config.qrels.empty() ? nullptr : &pipeline.qrels_,
        config.answers.empty() ? nullptr : &pipeline.answers_, config.n_values,
        pipeline.embeddings_));
  }
  return pipeline;
}

std::vector<std::string> Pipeline::processor_names() const {
  std::vector<std::string> names;
  names.reserve(processors_.size());
  for (const auto& processor : processors_) names.push_back(processor->name());
  return names;
}

QueryState Pipeline::process_query_state(const Query& query) const {
  QueryState state;
  state.query = query;
  for (const auto& processor : processors_) {
    const auto start = Clock::now();
    try {
      processor->process(state);
    } catch (const std::exception& e) {
      throw Error("stage " + processor->name() + ": " + e.what());
    }
    state.stage_seconds[processor->name()] += seconds_since(start);
  }
  return state;
}

MultiPack Pipeline::process_query(const Query& query) const {
  return process_query_state(query).pack;
}

BatchResult Pipeline::run_batch(const std::vector<Query>& queries,
                                const RelevanceJudgments& qrels,
                                const ReferenceAnswers& answers,
                                const std::string& out_dir) const {
  std::vector<std::optional<QueryState>> states(queries.size());
  std::vector<std::string> errors(queries.size());
  std::vector<double> totals(queries.size(), 0.0);

  const std::size_t worker_count =
      std::max<std::size_t>(1, std::min(config_.workers, std::max<std::size_t>(queries.size(), 1)));
  std::atomic<std::size_t> cursor{0};
  auto work = [&]() {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= queries.size()) return;
      const auto start = Clock::now();
      try {
        states[i] = process_query_state(queries[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
      totals[i] = seconds_since(start);
    }
  };
  if (worker_count == 1) {
    work();
  } else {
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (std::size_t w = 0; w < worker_count; ++w) workers.emplace_back(work);
    for (auto& thread : workers) thread.join();
  }

  BatchResult result;
  double total_seconds = 0.0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (!states[i]) {
      ++result.failed;
      result.failures.push_back(queries[i].query_id + ": " + errors[i]);
      continue;
    }
    QueryState& state = *states[i];
    total_seconds += totals[i];
    for (const auto& [stage, seconds] : state.stage_seconds) {
      result.stage_time_s[stage] += seconds;
    }
    result.full_rank_run.push_back(std::move(state.full_rank));
    result.re_rank_run.push_back(std::move(state.re_rank));
    if (state.prediction) result.predictions.push_back(std::move(*state.prediction));
    ++result.processed;
  }
  if (result.processed > 0) {
    result.time_per_query_s = total_seconds / static_cast<double>(result.processed);
    for (auto& [stage, seconds] : result.stage_time_s) {
      seconds /= static_cast<double>(result.processed);
    }
  }

  std::map<std::string, std::string> echo = {
      {"full_rank_top_n", std::to_string(config_.full_rank_top_n)},
      {"rerank_size", std::to_string(config_.rerank_size)},
      {"run_tag", config_.run_tag},
      {"scorer", config_.scorer},
      {"extractor", config_.extractor},
  };
  if (!qrels.empty()) {
    result.full_rank_report = evaluate_run(result.full_rank_run, qrels, config_.n_values);
    result.re_rank_report = evaluate_run(result.re_rank_run, qrels, config_.n_values);
    result.full_rank_report.config_echo = echo;
    result.re_rank_report.config_echo = echo;
    result.evaluated = true;
  }
  if (!answers.empty()) {
    std::vector<PredictionRow> rows;
    rows.reserve(result.predictions.size());
    for (const auto& p : result.predictions) {
      rows.push_back({p.query_id, p.passage_id, p.sentence_text});
    }
    result.qa_report = evaluate_qa(rows, answers, embeddings_.get());
    result.qa_report.config_echo = echo;
    result.evaluated = true;
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    result.full_rank_path = (fs::path(out_dir) / "fullrank.run").string();
    result.re_rank_path = (fs::path(out_dir) / "rerank.run").string();
    result.predictions_path = (fs::path(out_dir) / "predictions.tsv").string();
    result.report_path = (fs::path(out_dir) / "report.json").string();
    write_trec_run(result.full_rank_run, config_.run_tag + "-full", result.full_rank_path);
    write_trec_run(result.re_rank_run, config_.run_tag + "-rerank", result.re_rank_path);
    write_predictions(result.predictions, result.predictions_path);

    std::map<std::string, EvalReport> stages;
    if (result.evaluated) {
      if (!qrels.empty()) {
        stages["full_rank"] = result.full_rank_report;
        stages["re_rank"] = result.re_rank_report;
      }
      if (!answers.empty()) stages["qa"] = result.qa_report;
    }
    std::map<std::string, double> timing = {{"time_per_query_s", result.time_per_query_s}};
    for (const auto& [stage, seconds] : result.stage_time_s) {
      timing["stage_" + stage + "_s"] = seconds;
    }
    timing["failed_queries"] = static_cast<double>(result.failed);
    std::ofstream out(result.report_path, std::ios::binary);
    if (!out) throw Error("cannot write " + result.report_path);
    out << report_to_json(stages, timing) << '\n';
  }
  return result;
}

}  // namespace rankqa
