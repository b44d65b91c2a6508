#include "rankqa/answer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <semaphore>
#include <set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "rankqa/errors.hpp"
#include "rankqa/line_reader.hpp"
#include "rankqa/text.hpp"

namespace rankqa {

using nlohmann::json;

namespace {

// Lenient decode to one element per codepoint. Non-ASCII codepoints are
// mapped to 0x80: the segmentation rules only inspect ASCII classes.
std::vector<char> decode_classes(const std::string& text) {
  std::vector<char> cps;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto lead = static_cast<unsigned char>(text[pos]);
    std::size_t len = 1;
    if (lead >= 0xF0)
      len = 4;
    else if (lead >= 0xE0)
      len = 3;
    else if (lead >= 0xC0)
      len = 2;
    std::size_t have = 1;
    while (have < len && pos + have < text.size() &&
           (static_cast<unsigned char>(text[pos + have]) & 0xC0) == 0x80) {
      ++have;
    }
    cps.push_back(lead < 0x80 ? static_cast<char>(lead) : static_cast<char>(0x80u));
    pos += have;
  }
  return cps;
}

bool is_space_cp(char c) {
  return static_cast<unsigned char>(c) < 0x80 && std::isspace(static_cast<unsigned char>(c));
}

bool is_alpha_cp(char c) {
  return static_cast<unsigned char>(c) < 0x80 && std::isalpha(static_cast<unsigned char>(c));
}

// titles that end with '.' mid-sentence; initials ("J.") are handled by
// the single-uppercase-letter rule
const std::set<std::string> kTitleAbbreviations = {"Dr", "Mr",   "Mrs", "Ms",
                                                   "St", "Prof", "Jr",  "Sr"};

bool abbreviation_guard(const std::vector<char>& cps, std::size_t period) {
  std::size_t start = period;
  while (start > 0 && is_alpha_cp(cps[start - 1])) --start;
  const std::size_t len = period - start;
  if (len == 0) return false;
  if (len == 1) return std::isupper(static_cast<unsigned char>(cps[start])) != 0;
  std::string word(cps.begin() + static_cast<std::ptrdiff_t>(start),
                   cps.begin() + static_cast<std::ptrdiff_t>(period));
  return kTitleAbbreviations.count(word) > 0;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> segment_sentences(const std::string& text) {
  const std::vector<char> cps = decode_classes(text);
  const std::size_t n = cps.size();
  std::vector<std::pair<std::size_t, std::size_t>> sentences;

  auto next_non_space = [&](std::size_t from) {
    while (from < n && is_space_cp(cps[from])) ++from;
    return from;
  };

  std::size_t start = next_non_space(0);
  for (std::size_t i = start; i < n; ++i) {
    const char c = cps[i];
    if (c != '.' && c != '!' && c != '?') continue;

    const std::size_t after = next_non_space(i + 1);
    bool split = false;
    if (after == n) {
      split = true;  // terminal punctuation at (effective) end of text
    } else if (after > i + 1) {
      const auto uc = static_cast<unsigned char>(cps[after]);
      split = uc < 0x80 && (std::isupper(uc) != 0 || std::isdigit(uc) != 0);
    }
    if (split && c == '.' && abbreviation_guard(cps, i)) split = false;

    if (split) {
      sentences.emplace_back(start, i + 1);
      start = after;
      i = after == n ? n : after - 1;  // resume scanning at the next sentence
    }
  }
  if (start < n) {
    std::size_t last = n;
    while (last > start && is_space_cp(cps[last - 1])) --last;
    if (last > start) sentences.emplace_back(start, last);
  }
  return sentences;
}

ExtractedSpan BaselineExtractor::extract(const std::string& query, const std::string& context) {
  const auto sentences = segment_sentences(context);
  if (sentences.empty()) return {0, 0, 0.0};

  std::set<std::string> query_terms;
  for (const auto& term : tokenize(query)) query_terms.insert(term);

  double idf_total = 0.0;
  for (const auto& term : query_terms) idf_total += idf_(term);

  double best_score = -1.0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const std::string sentence =
        utf8_substr(context, sentences[i].first, sentences[i].second);
    const std::vector<std::string> tokens = tokenize(sentence);
    double score = 0.0;
    if (!tokens.empty()) {
      const std::set<std::string> present(tokens.begin(), tokens.end());
      double sum = 0.0;
      for (const auto& term : query_terms) {
        if (present.count(term) > 0) sum += idf_(term);
      }
      score = sum / std::sqrt(static_cast<double>(tokens.size()));
    }
    if (score > best_score) {  // strict: ties keep the earliest sentence
      best_score = score;
      best = i;
    }
  }
  const double confidence = idf_total > 0.0 ? best_score / idf_total : 0.0;
  return {sentences[best].first, sentences[best].second, confidence};
}

ExtractedSpan remote_extract(const std::string& endpoint, const std::string& query,
                             const std::string& context, std::chrono::milliseconds timeout) {
  std::string url = endpoint;
  if (url.rfind("http://", 0) != 0 && url.rfind("https://", 0) != 0) url = "http://" + url;
  httplib::Client client(url);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  const json body = {{"query", query}, {"context", context}};
  const auto started = std::chrono::steady_clock::now();
  httplib::Result res = client.Post("/v1/extract", body.dump(), "application/json");
  if (!res) {
    const auto elapsed = std::chrono::steady_clock::now() - started;
    const bool timed_out =
        res.error() == httplib::Error::ConnectionTimeout ||
        ((res.error() == httplib::Error::Read || res.error() == httplib::Error::Connection) &&
         elapsed >= timeout);
    if (timed_out) throw Timeout("request to " + endpoint + "/v1/extract timed out");
    throw TransportError("request to " + endpoint + "/v1/extract failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("request to " + endpoint + "/v1/extract returned status " +
                         std::to_string(res->status));
  }
  json response;
  try {
    response = json::parse(res->body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("response is not valid JSON: ") + e.what());
  }
  if (!response.contains("begin") || !response.contains("end") ||
      !response["begin"].is_number_integer() || !response["end"].is_number_integer()) {
    throw ProtocolError("response lacks integer 'begin'/'end'");
  }
  const auto begin_signed = response["begin"].get<long long>();
  const auto end_signed = response["end"].get<long long>();
  const std::size_t context_len = utf8_length(context);
  if (begin_signed < 0 || end_signed < begin_signed ||
      static_cast<std::size_t>(end_signed) > context_len) {
    throw ProtocolError("span [" + std::to_string(begin_signed) + "," +
                        std::to_string(end_signed) + ") invalid for context of length " +
                        std::to_string(context_len));
  }
  double score = 0.0;
  if (response.contains("score")) {
    if (!response["score"].is_number()) throw ProtocolError("non-numeric 'score'");
    score = response["score"].get<double>();
  }
  return {static_cast<std::size_t>(begin_signed), static_cast<std::size_t>(end_signed), score};
}

struct RemoteExtractor::Impl {
  std::chrono::milliseconds timeout;
  std::counting_semaphore<> in_flight;

  Impl(std::chrono::milliseconds t, std::size_t limit)
      : timeout(t), in_flight(static_cast<std::ptrdiff_t>(limit)) {}
};

RemoteExtractor::RemoteExtractor(std::string endpoint, std::chrono::milliseconds timeout,
                                 std::size_t max_in_flight)
    : endpoint_(std::move(endpoint)),
      impl_(std::make_unique<Impl>(timeout, max_in_flight == 0 ? 1 : max_in_flight)) {}

RemoteExtractor::~RemoteExtractor() = default;

ExtractedSpan RemoteExtractor::extract(const std::string& query, const std::string& context) {
  impl_->in_flight.acquire();
  try {
    auto span = remote_extract(endpoint_, query, context, impl_->timeout);
    impl_->in_flight.release();
    return span;
  } catch (...) {
    impl_->in_flight.release();
    throw;
  }
}

AnswerPrediction answer_question(Extractor& extractor, const Query& query,
                                 const Passage& top_passage) {
  if (top_passage.text.empty()) {
    throw EmptyContext("passage '" + top_passage.passage_id + "' has no text");
  }

  ExtractedSpan span;
  try {
    span = extractor.extract(query.text, top_passage.text);
  } catch (const std::exception& e) {
    throw ExtractorFailure(std::string(extractor.name()) + ": " + e.what());
  }
  const std::size_t context_len = utf8_length(top_passage.text);
  if (span.begin > span.end || span.end > context_len) {
    throw ExtractorFailure(extractor.name() + " returned span [" +
                           std::to_string(span.begin) + "," + std::to_string(span.end) +
                           ") for context of length " + std::to_string(context_len));
  }

  const auto sentences = segment_sentences(top_passage.text);
  std::size_t first = sentences.size();
  std::size_t last = sentences.size();
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto [sb, se] = sentences[i];
    const bool overlaps = span.begin < se && span.end > sb;
    const bool point_inside = span.begin == span.end && span.begin >= sb && span.begin < se;
    if (overlaps || point_inside) {
      if (first == sentences.size()) first = i;
      last = i;
    }
  }
  AnswerPrediction prediction;
  prediction.query_id = query.query_id;
  prediction.passage_id = top_passage.passage_id;
  prediction.span_begin = span.begin;
  prediction.span_end = span.end;
  prediction.span_text = utf8_substr(top_passage.text, span.begin, span.end);
  prediction.confidence = span.confidence;
  if (first == sentences.size()) {
    if (sentences.empty()) {
      // all-whitespace context: degenerate empty sentence
      prediction.sentence_begin = prediction.sentence_end = span.begin;
      prediction.sentence_text.clear();
      return prediction;
    }
    // span falls in an inter-sentence gap or at the very end; use the
    // nearest following sentence, or the last one
    std::size_t pick = sentences.size() - 1;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      if (sentences[i].first >= span.begin) {
        pick = i;
        break;
      }
    }
    first = last = pick;
  }
  prediction.sentence_begin = sentences[first].first;
  prediction.sentence_end = sentences[last].second;
  prediction.sentence_text =
      utf8_substr(top_passage.text, prediction.sentence_begin, prediction.sentence_end);
  return prediction;
}

void write_predictions(const std::vector<AnswerPrediction>& predictions,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (const auto& p : predictions) {
    std::string sentence = p.sentence_text;
    for (char& c : sentence) {
      if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    out << p.query_id << '\t' << p.passage_id << '\t' << sentence << '\n';
  }
}

std::vector<PredictionRow> read_predictions(const std::string& path) {
  LineReader reader(path);
  std::vector<PredictionRow> rows;
  std::string line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      throw MalformedLine(path, reader.line_no(), "expected qid<TAB>passage_id<TAB>sentence");
    }
    rows.push_back({line.substr(0, tab1), line.substr(tab1 + 1, tab2 - tab1 - 1),
                    line.substr(tab2 + 1)});
  }
  return rows;
}

}  // namespace rankqa
