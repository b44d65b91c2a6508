#include "rankqa/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rankqa/errors.hpp"
#include "rankqa/text.hpp"

namespace rankqa {

using nlohmann::json;

void EvalReport::finalize() {
  aggregate.clear();
  evaluated = per_query.size();
  if (per_query.empty()) return;
  for (const auto& [query_id, values] : per_query) {
    for (const auto& [metric, value] : values) aggregate[metric] += value;
  }
  for (auto& [metric, value] : aggregate) value /= static_cast<double>(per_query.size());
}

EvalReport evaluate_run(const std::vector<RankedList>& run, const RelevanceJudgments& qrels,
                        const std::vector<std::size_t>& n_values) {
  EvalReport report;
  for (const auto& list : run) {
    auto judged = qrels.find(list.query_id);
    if (judged == qrels.end() || judged->second.empty()) {
      ++report.skipped;
      continue;
    }
    std::vector<std::string> ranking;
    ranking.reserve(list.entries.size());
    for (const auto& entry : list.entries) ranking.push_back(entry.passage_id);

    std::map<std::string, double> values;
    for (std::size_t n : n_values) {
      values["mrr@" + std::to_string(n)] = reciprocal_rank_at_n(ranking, judged->second, n);
      values["recall@" + std::to_string(n)] = recall_at_n(ranking, judged->second, n);
    }
    report.per_query.emplace_back(list.query_id, std::move(values));
  }
  report.finalize();
  return report;
}

EvalReport evaluate_qa(const std::vector<PredictionRow>& predictions,
                       const ReferenceAnswers& answers, const EmbeddingTable* table) {
  EvalReport report;
  for (const auto& prediction : predictions) {
    auto refs = answers.find(prediction.query_id);
    if (refs == answers.end() || refs->second.empty()) {
      ++report.skipped;
      continue;
    }
    std::map<std::string, double> values;
    for (int n = 1; n <= 4; ++n) {
      values["bleu" + std::to_string(n)] = bleu_n(prediction.sentence_text, refs->second, n);
    }
    values["rouge_l"] = rouge_l(prediction.sentence_text, refs->second);
    const TokenPrf prf = token_prf(prediction.sentence_text, refs->second);
    values["precision"] = prf.precision;
    values["recall"] = prf.recall;
    values["f1"] = prf.f1;
    if (table != nullptr) {
      double best = 0.0;
      for (const auto& reference : refs->second) {
        best = std::max(best, semantic_similarity(prediction.sentence_text, reference, *table));
      }
      values["semantic_sim"] = best;
    }
    report.per_query.emplace_back(prediction.query_id, std::move(values));
  }
  report.finalize();
  return report;
}

std::string report_to_json(const std::map<std::string, EvalReport>& stages,
                           const std::map<std::string, double>& timing,
                           bool include_per_query) {
  json j = json::object();
  for (const auto& [stage, report] : stages) {
    json node;
    node["aggregate"] = report.aggregate;
    node["counts"] = {{"evaluated", report.evaluated}, {"skipped", report.skipped}};
    if (!report.config_echo.empty()) node["config"] = report.config_echo;
    if (include_per_query) {
      json per = json::object();
      for (const auto& [query_id, values] : report.per_query) per[query_id] = values;
      node["per_query"] = std::move(per);
    }
    j[stage] = std::move(node);
  }
  for (const auto& [key, value] : timing) j[key] = value;
  return j.dump(2);
}

namespace {

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string cell(double value) { return format_fixed(value, 2); }

std::string metric_or_dash(const std::map<std::string, double>& values,
                           const std::string& key) {
  auto it = values.find(key);
  return it == values.end() ? "-" : cell(it->second);
}

}  // namespace

std::string render_ranking_table(const std::vector<SweepRow>& rows,
                                 const std::vector<std::size_t>& n_values) {
  std::vector<std::string> headers = {"Re-Ranking Size", "Time per query (s)"};
  std::vector<std::string> metrics;
  for (const char* prefix : {"mrr@", "recall@"}) {
    for (std::size_t n : n_values) metrics.push_back(prefix + std::to_string(n));
  }
  for (const char* stage : {"Full-Ranker", "Re-ranker"}) {
    for (const auto& metric : metrics) headers.push_back(std::string(stage) + " " + metric);
  }

  std::vector<std::vector<std::string>> body;
  for (const auto& row : rows) {
    std::vector<std::string> line = {std::to_string(row.rerank_size),
                                     format_fixed(row.time_per_query_s, 2)};
    for (const auto& metric : metrics) line.push_back(metric_or_dash(row.full_rank, metric));
    for (const auto& metric : metrics) line.push_back(metric_or_dash(row.re_rank, metric));
    body.push_back(std::move(line));
  }

  std::vector<std::size_t> widths;
  for (std::size_t c = 0; c < headers.size(); ++c) {
    std::size_t w = headers[c].size();
    for (const auto& line : body) w = std::max(w, line[c].size());
    widths.push_back(w);
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c > 0) out << "  ";
      out << pad(line[c], widths[c]);
    }
    out << '\n';
  };
  emit(headers);
  for (const auto& line : body) emit(line);
  return out.str();
}

std::string render_qa_table(const std::vector<SweepRow>& rows, bool with_semantic) {
  std::vector<std::string> headers = {"Re-Ranking Size", "BLEU-1",    "BLEU-2", "BLEU-3",
                                      "BLEU-4",          "ROUGE-L",   "PRECISION",
                                      "RECALL",          "F1"};
  std::vector<std::string> keys = {"bleu1", "bleu2",     "bleu3",  "bleu4",
                                   "rouge_l", "precision", "recall", "f1"};
  if (with_semantic) {
    headers.push_back("Semantic Sim");
    keys.push_back("semantic_sim");
  }

  std::vector<std::vector<std::string>> body;
  for (const auto& row : rows) {
    std::vector<std::string> line = {std::to_string(row.rerank_size)};
    for (const auto& key : keys) line.push_back(metric_or_dash(row.qa, key));
    body.push_back(std::move(line));
  }
  std::vector<std::size_t> widths;
  for (std::size_t c = 0; c < headers.size(); ++c) {
    std::size_t w = headers[c].size();
    for (const auto& line : body) w = std::max(w, line[c].size());
    widths.push_back(w);
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c > 0) out << "  ";
      out << pad(line[c], widths[c]);
    }
    out << '\n';
  };
  emit(headers);
  for (const auto& line : body) emit(line);
  return out.str();
}

}  // namespace rankqa
