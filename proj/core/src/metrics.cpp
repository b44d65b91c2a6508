#include "rankqa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "rankqa/errors.hpp"
#include "rankqa/line_reader.hpp"
#include "rankqa/text.hpp"

namespace rankqa {

namespace {
constexpr double kBleuEpsilon = 1e-9;
}

double reciprocal_rank_at_n(const std::vector<std::string>& ranking,
                            const std::set<std::string>& relevant, std::size_t n) {
  const std::size_t limit = std::min(n, ranking.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (relevant.count(ranking[i]) > 0) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double recall_at_n(const std::vector<std::string>& ranking,
                   const std::set<std::string>& relevant, std::size_t n) {
  if (relevant.empty()) throw NoJudgments("recall undefined without relevance judgments");
  const std::size_t limit = std::min(n, ranking.size());
  std::size_t hit = 0;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < limit; ++i) {
    if (relevant.count(ranking[i]) > 0 && seen.insert(ranking[i]).second) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(relevant.size());
}

namespace {

using TokenList = std::vector<std::string>;

std::map<std::string, std::size_t> ngram_counts(const TokenList& tokens, int n) {
  std::map<std::string, std::size_t> counts;
  if (tokens.size() < static_cast<std::size_t>(n)) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (int k = 0; k < n; ++k) {
      if (k > 0) key += '\x1f';  // unit separator avoids token-join collisions
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

std::size_t lcs_length(const TokenList& a, const TokenList& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

}  // namespace

double bleu_n(const std::string& prediction, const std::vector<std::string>& references,
              int max_n) {
  if (max_n < 1 || max_n > 4) throw Error("bleu_n supports max_n in 1..4");
  const TokenList pred = qa_tokens(prediction);
  if (pred.empty() || references.empty()) return 0.0;

  std::vector<TokenList> refs;
  refs.reserve(references.size());
  for (const auto& r : references) refs.push_back(qa_tokens(r));

  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    const auto pred_counts = ngram_counts(pred, n);
    std::size_t total = 0;
    for (const auto& [gram, count] : pred_counts) total += count;

    // clip against the max count of each gram across references
    std::map<std::string, std::size_t> ref_max;
    for (const auto& ref : refs) {
      for (const auto& [gram, count] : ngram_counts(ref, n)) {
        ref_max[gram] = std::max(ref_max[gram], count);
      }
    }
    std::size_t matched = 0;
    for (const auto& [gram, count] : pred_counts) {
      auto it = ref_max.find(gram);
      if (it != ref_max.end()) matched += std::min(count, it->second);
    }
    const double p =
        (matched == 0 || total == 0)
            ? kBleuEpsilon
            : static_cast<double>(matched) / static_cast<double>(total);
    log_sum += std::log(p);
  }

  // closest reference length; ties go to the shorter reference
  const auto pred_len = static_cast<double>(pred.size());
  std::size_t closest = refs[0].size();
  for (const auto& ref : refs) {
    const auto diff = [&](std::size_t len) {
      return std::abs(static_cast<double>(len) - pred_len);
    };
    if (diff(ref.size()) < diff(closest) ||
        (diff(ref.size()) == diff(closest) && ref.size() < closest)) {
      closest = ref.size();
    }
  }
  const double bp = std::min(1.0, std::exp(1.0 - static_cast<double>(closest) / pred_len));
  return bp * std::exp(log_sum / max_n);
}

double rouge_l(const std::string& prediction, const std::vector<std::string>& references) {
  const TokenList pred = qa_tokens(prediction);
  if (pred.empty()) return 0.0;
  double best = 0.0;
  for (const auto& reference : references) {
    const TokenList ref = qa_tokens(reference);
    if (ref.empty()) continue;
    const auto l = static_cast<double>(lcs_length(pred, ref));
    if (l == 0.0) continue;
    const double p = l / static_cast<double>(pred.size());
    const double r = l / static_cast<double>(ref.size());
    best = std::max(best, 2.0 * p * r / (p + r));
  }
  return best;
}

TokenPrf token_prf(const std::string& prediction, const std::vector<std::string>& references) {
  const TokenList pred = qa_tokens(prediction);
  std::map<std::string, std::size_t> pred_counts;
  for (const auto& t : pred) ++pred_counts[t];

  TokenPrf best;
  bool first = true;
  for (const auto& reference : references) {
    const TokenList ref = qa_tokens(reference);
    std::map<std::string, std::size_t> ref_counts;
    for (const auto& t : ref) ++ref_counts[t];

    std::size_t matched = 0;
    for (const auto& [token, count] : pred_counts) {
      auto it = ref_counts.find(token);
      if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    TokenPrf current;
    current.precision =
        pred.empty() ? 0.0 : static_cast<double>(matched) / static_cast<double>(pred.size());
    current.recall =
        ref.empty() ? 0.0 : static_cast<double>(matched) / static_cast<double>(ref.size());
    current.f1 = (current.precision + current.recall) > 0.0
                     ? 2.0 * current.precision * current.recall /
                           (current.precision + current.recall)
                     : 0.0;
    if (first || current.f1 > best.f1) {
      best = current;
      first = false;
    }
  }
  return best;
}

EmbeddingTable EmbeddingTable::load(const std::string& path) {
  LineReader reader(path);
  std::vector<std::pair<std::string, std::vector<double>>> entries;
  std::string line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto fields = split_whitespace(line);
    if (fields.size() < 2) {
      throw DimensionMismatch(path + ":" + std::to_string(reader.line_no()) +
                              ": entry has no vector components");
    }
    std::vector<double> vec;
    vec.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      try {
        vec.push_back(std::stod(fields[i]));
      } catch (const std::exception&) {
        throw DimensionMismatch(path + ":" + std::to_string(reader.line_no()) +
                                ": component '" + fields[i] + "' is not a number");
      }
    }
    entries.emplace_back(fields[0], std::move(vec));
  }
  return from_entries(entries);
}

EmbeddingTable EmbeddingTable::from_entries(
    const std::vector<std::pair<std::string, std::vector<double>>>& entries) {
  EmbeddingTable table;
  for (const auto& [word, vec] : entries) {
    if (table.vectors_.empty()) {
      table.dimension_ = vec.size();
    } else if (vec.size() != table.dimension_) {
      throw DimensionMismatch("entry '" + word + "' has dimension " +
                              std::to_string(vec.size()) + ", table has " +
                              std::to_string(table.dimension_));
    }
    table.vectors_[ascii_lower(word)] = vec;
  }
  return table;
}

const std::vector<double>* EmbeddingTable::find(const std::string& word) const {
  auto it = vectors_.find(ascii_lower(word));
  return it == vectors_.end() ? nullptr : &it->second;
}

namespace {

// mean vector over in-vocabulary tokens; empty when all are OOV
std::vector<double> mean_vector(const std::vector<std::string>& tokens,
                                const EmbeddingTable& table) {
  std::vector<double> mean;
  std::size_t found = 0;
  for (const auto& token : tokens) {
    const auto* vec = table.find(token);
    if (vec == nullptr) continue;
    if (mean.empty()) mean.assign(vec->size(), 0.0);
    for (std::size_t i = 0; i < vec->size(); ++i) mean[i] += (*vec)[i];
    ++found;
  }
  if (found > 0) {
    for (double& v : mean) v /= static_cast<double>(found);
  }
  return mean;
}

}  // namespace

double semantic_similarity(const std::string& prediction, const std::string& reference,
                           const EmbeddingTable& table) {
  const auto pred_mean = mean_vector(qa_tokens(prediction), table);
  const auto ref_mean = mean_vector(qa_tokens(reference), table);
  if (pred_mean.empty() || ref_mean.empty()) return 0.0;

  double dot = 0.0;
  double norm_p = 0.0;
  double norm_r = 0.0;
  for (std::size_t i = 0; i < pred_mean.size(); ++i) {
    dot += pred_mean[i] * ref_mean[i];
    norm_p += pred_mean[i] * pred_mean[i];
    norm_r += ref_mean[i] * ref_mean[i];
  }
  if (norm_p == 0.0 || norm_r == 0.0) return 0.0;
  return dot / (std::sqrt(norm_p) * std::sqrt(norm_r));
}

}  // namespace rankqa
