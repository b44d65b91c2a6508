#include "rankqa/config.hpp"

#include <algorithm>

#include "rankqa/errors.hpp"
#include "rankqa/line_reader.hpp"
#include "rankqa/text.hpp"

namespace rankqa {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  try {
    const long long v = std::stoll(value);
    if (v < 0) throw ConfigError(key, "must be non-negative");
    return static_cast<std::size_t>(v);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError(key, "'" + value + "' is not an integer");
  }
}

std::vector<std::size_t> parse_count_list(const std::string& key, const std::string& value) {
  std::vector<std::size_t> out;
  std::string item;
  for (char c : value + ",") {
    if (c == ',') {
      const std::string t = trim(item);
      if (!t.empty()) out.push_back(parse_count(key, t));
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  if (out.empty()) throw ConfigError(key, "list must be non-empty");
  return out;
}

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value) {
  if (key == "collection")
    collection = value;
  else if (key == "cord_metadata")
    cord_metadata = value;
  else if (key == "cord_fulltext")
    cord_fulltext = value;
  else if (key == "queries")
    queries = value;
  else if (key == "qrels")
    qrels = value;
  else if (key == "answers")
    answers = value;
  else if (key == "index")
    index = value;
  else if (key == "chunk_window")
    chunk_window = parse_count(key, value);
  else if (key == "chunk_overlap")
    chunk_overlap = parse_count(key, value);
  else if (key == "full_rank_top_n")
    full_rank_top_n = parse_count(key, value);
  else if (key == "rerank_size")
    rerank_size = parse_count(key, value);
  else if (key == "rerank_batch_size")
    rerank_batch_size = parse_count(key, value);
  else if (key == "scorer")
    scorer = value;
  else if (key == "extractor")
    extractor = value;
  else if (key == "qa_top_k")
    qa_top_k = parse_count(key, value);
  else if (key == "n_values")
    n_values = parse_count_list(key, value);
  else if (key == "embeddings")
    embeddings = value;
  else if (key == "output_dir")
    output_dir = value;
  else if (key == "run_tag")
    run_tag = value;
  else if (key == "workers")
    workers = parse_count(key, value);
  else if (key == "timeout_ms")
    timeout_ms = parse_count(key, value);
  else if (key == "max_in_flight")
    max_in_flight = parse_count(key, value);
  else
    throw ConfigError(key, "unknown key");
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  PipelineConfig config;
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    const std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(stripped, "expected 'key = value' at " + path + ":" +
                                      std::to_string(reader.line_no()));
    }
    config.set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  return config;
}

void PipelineConfig::validate() const {
  if (rerank_size < 1) throw ConfigError("rerank_size", "must be >= 1");
  if (full_rank_top_n < rerank_size) {
    throw ConfigError("full_rank_top_n", "must be >= rerank_size (" +
                                             std::to_string(rerank_size) + ")");
  }
  if (chunk_window <= chunk_overlap) {
    throw ConfigError("chunk_window", "must exceed chunk_overlap (" +
                                          std::to_string(chunk_overlap) + ")");
  }
  if (rerank_batch_size < 1) throw ConfigError("rerank_batch_size", "must be >= 1");
  if (qa_top_k < 1) throw ConfigError("qa_top_k", "must be >= 1");
  if (workers < 1) throw ConfigError("workers", "must be >= 1");
  if (n_values.empty()) throw ConfigError("n_values", "must be non-empty");
  if (scorer.empty()) throw ConfigError("scorer", "must be 'builtin' or an endpoint");
  if (extractor.empty()) throw ConfigError("extractor", "must be 'builtin' or an endpoint");
}

}  // namespace rankqa
