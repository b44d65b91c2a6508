#include "rankqa/reranker.hpp"

#include <algorithm>
#include <cmath>
#include <semaphore>
#include <set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "rankqa/errors.hpp"
#include "rankqa/text.hpp"

namespace rankqa {

using nlohmann::json;

double LexicalScorer::score_one(const std::string& query, const std::string& passage_text) const {
  const std::vector<std::string> passage_terms = tokenize(passage_text);
  if (passage_terms.empty()) return 0.0;
  const std::set<std::string> present(passage_terms.begin(), passage_terms.end());

  std::set<std::string> seen;
  double sum = 0.0;
  for (const auto& term : tokenize(query)) {
    if (!seen.insert(term).second) continue;
    if (present.count(term) > 0) sum += index_->idf(term);
  }
  return sum / std::sqrt(static_cast<double>(passage_terms.size()));
}

std::vector<double> LexicalScorer::score_batch(const std::string& query,
                                               const std::vector<ScoredPassage>& passages) {
  std::vector<double> scores;
  scores.reserve(passages.size());
  for (const auto& passage : passages) scores.push_back(score_one(query, passage.text));
  return scores;
}

namespace {

// endpoint may be "http://host:port" or "host:port"; httplib wants the
// scheme-qualified form.
std::string normalize_endpoint(const std::string& endpoint) {
  if (endpoint.rfind("http://", 0) == 0 || endpoint.rfind("https://", 0) == 0) return endpoint;
  return "http://" + endpoint;
}

json post_json(const std::string& endpoint, const std::string& path, const json& body,
               std::chrono::milliseconds timeout) {
  httplib::Client client(normalize_endpoint(endpoint));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  const auto started = std::chrono::steady_clock::now();
  httplib::Result res = client.Post(path, body.dump(), "application/json");
  if (!res) {
    const auto elapsed = std::chrono::steady_clock::now() - started;
    const bool timed_out =
        res.error() == httplib::Error::ConnectionTimeout ||
        ((res.error() == httplib::Error::Read || res.error() == httplib::Error::Connection) &&
         elapsed >= timeout);
    if (timed_out) {
      throw Timeout("request to " + endpoint + path + " timed out");
    }
    throw TransportError("request to " + endpoint + path + " failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("request to " + endpoint + path + " returned status " +
                         std::to_string(res->status));
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("response is not valid JSON: ") + e.what());
  }
}

}  // namespace

std::vector<double> remote_score_batch(const std::string& endpoint, const std::string& query,
                                       const std::vector<ScoredPassage>& passages,
                                       std::chrono::milliseconds timeout) {
  json candidates = json::array();
  for (const auto& passage : passages) {
    candidates.push_back({{"id", passage.passage_id}, {"text", passage.text}});
  }
  const json body = {{"query", query}, {"candidates", std::move(candidates)}};
  const json response = post_json(endpoint, "/v1/score", body, timeout);

  auto it = response.find("scores");
  if (it == response.end() || !it->is_array()) {
    throw ProtocolError("response lacks a 'scores' array");
  }
  if (it->size() != passages.size()) {
    throw ProtocolError("expected " + std::to_string(passages.size()) + " scores, got " +
                        std::to_string(it->size()));
  }
  std::vector<double> scores;
  scores.reserve(passages.size());
  for (const auto& value : *it) {
    if (!value.is_number()) throw ProtocolError("non-numeric score in response");
    scores.push_back(value.get<double>());
  }
  return scores;
}

struct RemoteScorer::Impl {
  std::chrono::milliseconds timeout;
  std::counting_semaphore<> in_flight;

  Impl(std::chrono::milliseconds t, std::size_t limit)
      : timeout(t), in_flight(static_cast<std::ptrdiff_t>(limit)) {}
};

RemoteScorer::RemoteScorer(std::string endpoint, std::chrono::milliseconds timeout,
                           std::size_t max_in_flight)
    : endpoint_(std::move(endpoint)),
      impl_(std::make_unique<Impl>(timeout, max_in_flight == 0 ? 1 : max_in_flight)) {}

RemoteScorer::~RemoteScorer() = default;

std::vector<double> RemoteScorer::score_batch(const std::string& query,
                                              const std::vector<ScoredPassage>& passages) {
  impl_->in_flight.acquire();
  try {
    auto scores = remote_score_batch(endpoint_, query, passages, impl_->timeout);
    impl_->in_flight.release();
    return scores;
  } catch (...) {
    impl_->in_flight.release();
    throw;
  }
}

void RerankConfig::validate() const {
  if (rerank_size < 1) throw ConfigError("rerank_size", "must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size", "must be >= 1");
}

RankedList rerank(Scorer& scorer, const std::string& query, const RankedList& candidates,
                  const std::vector<std::string>& texts, const RerankConfig& config) {
  config.validate();
  if (texts.size() != candidates.entries.size()) {
    throw Error("texts must align with candidate entries");
  }

  const std::size_t head = std::min(config.rerank_size, candidates.entries.size());

  // score all batches up front; any failure leaves the input untouched
  std::vector<double> scores;
  scores.reserve(head);
  std::size_t batch_index = 0;
  for (std::size_t offset = 0; offset < head; offset += config.batch_size, ++batch_index) {
    const std::size_t batch_end = std::min(offset + config.batch_size, head);
    std::vector<ScoredPassage> batch;
    batch.reserve(batch_end - offset);
    for (std::size_t i = offset; i < batch_end; ++i) {
      batch.push_back({candidates.entries[i].passage_id, texts[i]});
    }
    std::vector<double> batch_scores;
    try {
      batch_scores = scorer.score_batch(query, batch);
    } catch (const std::exception& e) {
      throw ScorerFailure(batch_index, e.what());
    }
    if (batch_scores.size() != batch.size()) {
      throw ScorerFailure(batch_index, "scorer returned " + std::to_string(batch_scores.size()) +
                                           " scores for " + std::to_string(batch.size()) +
                                           " passages");
    }
    scores.insert(scores.end(), batch_scores.begin(), batch_scores.end());
  }

  RankedList result{candidates.query_id, Stage::ReRank, {}};
  result.entries.reserve(candidates.entries.size());
  for (std::size_t i = 0; i < head; ++i) {
    result.entries.push_back({candidates.entries[i].passage_id, scores[i]});
  }
  std::sort(result.entries.begin(), result.entries.end(),
            [](const ScoredEntry& a, const ScoredEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.passage_id < b.passage_id;
            });

  // tail keeps full-ranker relative order, sentinel scores strictly below
  // the re-scored block
  if (head < candidates.entries.size()) {
    const double floor = head > 0 ? result.entries.back().score : 0.0;
    std::size_t offset = 1;
    for (std::size_t i = head; i < candidates.entries.size(); ++i, ++offset) {
      result.entries.push_back(
          {candidates.entries[i].passage_id, floor - static_cast<double>(offset)});
    }
  }
  return result;
}

}  // namespace rankqa
