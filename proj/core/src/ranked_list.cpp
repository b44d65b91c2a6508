#include "rankqa/ranked_list.hpp"

#include <fstream>

#include "rankqa/errors.hpp"
#include "rankqa/line_reader.hpp"
#include "rankqa/text.hpp"

namespace rankqa {

std::string to_string(Stage stage) {
  return stage == Stage::FullRank ? "full_rank" : "re_rank";
}

std::string to_trec_lines(const RankedList& list, const std::string& run_tag) {
  std::string out;
  std::size_t rank = 1;
  for (const auto& entry : list.entries) {
    out += list.query_id;
    out += " Q0 ";
    out += entry.passage_id;
    out += ' ';
    out += std::to_string(rank++);
    out += ' ';
    out += format_fixed(entry.score, 6);
    out += ' ';
    out += run_tag;
    out += '\n';
  }
  return out;
}

void write_trec_run(const std::vector<RankedList>& run, const std::string& run_tag,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (const auto& list : run) out << to_trec_lines(list, run_tag);
}

std::vector<RankedList> read_trec_run(const std::string& path, Stage stage) {
  LineReader reader(path);
  std::vector<RankedList> run;
  std::string line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto fields = split_whitespace(line);
    if (fields.size() != 6) {
      throw MalformedLine(path, reader.line_no(),
                          "expected 6 fields in TREC run line, got " +
                              std::to_string(fields.size()));
    }
    double score = 0.0;
    try {
      score = std::stod(fields[4]);
    } catch (const std::exception&) {
      throw MalformedLine(path, reader.line_no(), "score '" + fields[4] + "' is not a number");
    }
    if (run.empty() || run.back().query_id != fields[0]) {
      run.push_back({fields[0], stage, {}});
    }
    run.back().entries.push_back({fields[2], score});
  }
  return run;
}

}  // namespace rankqa
