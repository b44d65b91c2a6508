#include "rankqa/corpus.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rankqa/line_reader.hpp"
#include "rankqa/text.hpp"

namespace rankqa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

// Runs `parse` on every line, honoring fail-fast vs skip-and-count.
ReaderStats scan_lines(const std::string& path, const ReaderOptions& options,
                       const std::function<void(const std::string&, std::size_t)>& parse) {
  LineReader reader(path);
  ReaderStats stats;
  std::string line;
  while (reader.next(line)) {
    try {
      parse(line, reader.line_no());
      ++stats.read;
    } catch (const MalformedLine&) {
      if (options.fail_fast) throw;
      ++stats.skipped;
    }
  }
  return stats;
}

void validate_id(const std::string& id, const std::string& path, std::size_t line_no) {
  if (id.empty()) throw MalformedLine(path, line_no, "empty id");
  if (id.find('#') != std::string::npos) {
    // '#' is reserved as the chunk separator in passage ids
    throw MalformedLine(path, line_no, "id '" + id + "' contains reserved '#'");
  }
}

}  // namespace

ReaderStats for_each_passage(const std::string& path,
                             const std::function<void(Passage&&)>& sink,
                             const ReaderOptions& options) {
  return scan_lines(path, options, [&](const std::string& line, std::size_t line_no) {
    auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw MalformedLine(path, line_no,
                          "expected 2 tab-separated fields, got " +
                              std::to_string(fields.size()));
    }
    validate_id(fields[0], path, line_no);
    Passage p;
    p.passage_id = fields[0];
    p.doc_id = fields[0];
    p.chunk_index = 0;
    p.text = fields[1];
    p.token_end = split_whitespace(p.text).size();
    sink(std::move(p));
  });
}

std::vector<Passage> read_passage_collection(const std::string& path,
                                             const ReaderOptions& options, ReaderStats* stats) {
  std::vector<Passage> out;
  ReaderStats s = for_each_passage(
      path, [&](Passage&& p) { out.push_back(std::move(p)); }, options);
  if (stats != nullptr) *stats = s;
  return out;
}

std::vector<Query> read_queries(const std::string& path, const ReaderOptions& options,
                                ReaderStats* stats) {
  std::vector<Query> out;
  ReaderStats s = scan_lines(path, options, [&](const std::string& line, std::size_t line_no) {
    auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw MalformedLine(path, line_no,
                          "expected 2 tab-separated fields, got " +
                              std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw MalformedLine(path, line_no, "empty query id");
    out.push_back({fields[0], fields[1]});
  });
  if (stats != nullptr) *stats = s;
  return out;
}

RelevanceJudgments read_qrels(const std::string& path, const ReaderOptions& options,
                              ReaderStats* stats) {
  RelevanceJudgments out;
  ReaderStats s = scan_lines(path, options, [&](const std::string& line, std::size_t line_no) {
    auto fields = split_whitespace(line);
    if (fields.size() != 4) {
      throw MalformedLine(path, line_no,
                          "expected 4 whitespace-separated fields, got " +
                              std::to_string(fields.size()));
    }
    long rel = 0;
    try {
      rel = std::stol(fields[3]);
    } catch (const std::exception&) {
      throw MalformedLine(path, line_no, "relevance '" + fields[3] + "' is not an integer");
    }
    if (rel > 0) out[fields[0]].insert(fields[2]);
  });
  if (stats != nullptr) *stats = s;
  return out;
}

ReferenceAnswers read_answers(const std::string& path, const ReaderOptions& options,
                              ReaderStats* stats) {
  ReferenceAnswers out;
  ReaderStats s = scan_lines(path, options, [&](const std::string& line, std::size_t line_no) {
    auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw MalformedLine(path, line_no,
                          "expected 2 tab-separated fields, got " +
                              std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw MalformedLine(path, line_no, "empty query id");
    out[fields[0]].push_back(fields[1]);
  });
  if (stats != nullptr) *stats = s;
  return out;
}

std::vector<Document> read_cord_corpus(const std::string& metadata_path,
                                       const std::string& fulltext_dir) {
  std::error_code ec;
  if (!fs::is_directory(fulltext_dir, ec)) {
    throw MalformedManifest("full-text directory '" + fulltext_dir + "' is not readable");
  }
  std::vector<Document> docs;
  LineReader reader(metadata_path);
  std::string line;
  while (reader.next(line)) {
    auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw MalformedManifest(metadata_path + ":" + std::to_string(reader.line_no()) +
                              ": expected doc_id<TAB>title");
    }
    if (fields[0].empty() || fields[0].find('#') != std::string::npos) {
      throw MalformedManifest(metadata_path + ":" + std::to_string(reader.line_no()) +
                              ": bad doc id '" + fields[0] + "'");
    }
    Document doc;
    doc.doc_id = fields[0];
    doc.title = fields[1];
    doc.body = doc.title;

    const fs::path fulltext = fs::path(fulltext_dir) / (doc.doc_id + ".json");
    std::ifstream in(fulltext);
    if (in) {
      json j;
      try {
        in >> j;
        for (const auto& para : j.at("paragraphs")) {
          doc.body += '\n';
          doc.body += para.get<std::string>();
        }
      } catch (const json::exception& e) {
        throw MalformedManifest(fulltext.string() + ": " + e.what());
      }
    }
    // missing full text is not an error: keep the title-only document
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Passage> chunk_document(const Document& doc, const ChunkParams& params) {
  if (params.window <= params.overlap) {
    throw InvalidChunkParams("window (" + std::to_string(params.window) +
                             ") must exceed overlap (" + std::to_string(params.overlap) + ")");
  }
  const std::vector<std::string> tokens = split_whitespace(doc.body);
  const std::size_t step = params.window - params.overlap;

  std::vector<Passage> chunks;
  std::size_t start = 0;
  std::size_t k = 0;
  do {
    const std::size_t end = std::min(start + params.window, tokens.size());
    Passage p;
    p.doc_id = doc.doc_id;
    p.chunk_index = k;
    p.passage_id = doc.doc_id + "#" + std::to_string(k);
    p.token_begin = start;
    p.token_end = end;
    std::string text;
    for (std::size_t i = start; i < end; ++i) {
      if (i > start) text += ' ';
      text += tokens[i];
    }
    p.text = std::move(text);
    chunks.push_back(std::move(p));
    start += step;
    ++k;
  } while (start < tokens.size());
  return chunks;
}

}  // namespace rankqa
