#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace rankqa {

/// 1/rank of the first relevant id within the top n (1-based); 0 when no
/// relevant id appears there.
double reciprocal_rank_at_n(const std::vector<std::string>& ranking,
                            const std::set<std::string>& relevant, std::size_t n);

/// |top-n ∩ relevant| / |relevant|. Throws NoJudgments when relevant is
/// empty.
double recall_at_n(const std::vector<std::string>& ranking,
                   const std::set<std::string>& relevant, std::size_t n);

/// Sentence BLEU: geometric mean of clipped modified n-gram precisions
/// p_1..p_max_n times the brevity penalty min(1, e^(1 - r/c)) with the
/// closest-reference length r (ties prefer the shorter reference). An
/// order with zero matches (or no n-grams at all) contributes epsilon
/// 1e-9. Tokens come from QA normalization. Empty prediction -> 0.
double bleu_n(const std::string& prediction, const std::vector<std::string>& references,
              int max_n);

/// ROUGE-L F1 (beta = 1) over QA-normalized tokens, max over references.
double rouge_l(const std::string& prediction, const std::vector<std::string>& references);

struct TokenPrf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Bag-of-tokens overlap after QA normalization; the reference with the
/// best F1 is selected.
TokenPrf token_prf(const std::string& prediction, const std::vector<std::string>& references);

/// word -> dense vector table, fixed dimension, lowercase keys. File
/// format: one `word v1 v2 ... vd` line per entry, space-separated.
class EmbeddingTable {
public:
  static EmbeddingTable load(const std::string& path);
  /// Builds from in-memory entries (tests); throws DimensionMismatch on
  /// ragged rows.
  static EmbeddingTable from_entries(
      const std::vector<std::pair<std::string, std::vector<double>>>& entries);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }
  /// Case-insensitive lookup; nullptr when out of vocabulary.
  const std::vector<double>* find(const std::string& word) const;

private:
  std::size_t dimension_ = 0;
  std::map<std::string, std::vector<double>> vectors_;
};

/// Cosine of the mean vectors of in-vocabulary tokens on each side; 0 when
/// either side has no in-vocabulary tokens.
double semantic_similarity(const std::string& prediction, const std::string& reference,
                           const EmbeddingTable& table);

}  // namespace rankqa
