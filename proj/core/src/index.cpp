#include "rankqa/index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "rankqa/errors.hpp"
#include "rankqa/text.hpp"

namespace rankqa {

namespace {

constexpr char kMagic[8] = {'R', 'K', 'Q', 'A', 'I', 'D', 'X', '1'};
constexpr std::uint8_t kVersion = 1;
constexpr std::uint8_t kFlagTexts = 0x01;

// explicit little-endian encoding keeps the file format host-independent

void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_string(std::string& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

class ByteCursor {
public:
  explicit ByteCursor(std::string data) : data_(std::move(data)) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }

  std::uint32_t u32() {
    const char* p = take(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(p[i]);
    return v;
  }

  std::uint64_t u64() {
    const char* p = take(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(p[i]);
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string str() {
    const std::uint32_t len = u32();
    return std::string(take(len), len);
  }

  void raw(char* dst, std::size_t n) { std::memcpy(dst, take(n), n); }

  bool at_end() const { return pos_ == data_.size(); }

private:
  const char* take(std::size_t n) {
    if (pos_ + n > data_.size()) throw CorruptIndex("truncated index file");
    const char* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }

  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace

InvertedIndex InvertedIndex::build(std::span<const Passage> passages,
                                   const IndexBuildOptions& options) {
  InvertedIndex index;
  index.params_ = options.params;

  std::uint64_t total_tokens = 0;
  for (const Passage& passage : passages) {
    if (index.id_to_ordinal_.count(passage.passage_id) > 0) {
      throw DuplicatePassageId("duplicate passage id '" + passage.passage_id + "'");
    }
    const auto ordinal = static_cast<std::uint32_t>(index.ids_.size());
    index.id_to_ordinal_.emplace(passage.passage_id, ordinal);
    index.ids_.push_back(passage.passage_id);

    const std::vector<std::string> terms = tokenize(passage.text);
    index.doc_lengths_.push_back(terms.size());
    total_tokens += terms.size();

    std::unordered_map<std::string, std::uint32_t> counts;
    for (const auto& term : terms) ++counts[term];
    for (auto& [term, tf] : counts) {
      index.postings_[term].push_back({ordinal, tf});
    }
    if (options.store_texts) index.texts_.push_back(passage.text);
  }
  // postings arrive in ordinal order per term already; keep the invariant
  // explicit for merged builds
  for (auto& [term, list] : index.postings_) {
    std::sort(list.begin(), list.end(),
              [](const Posting& a, const Posting& b) { return a.ordinal < b.ordinal; });
  }
  index.avg_doc_length_ =
      index.doc_lengths_.empty()
          ? 0.0
          : static_cast<double>(total_tokens) / static_cast<double>(index.doc_lengths_.size());
  return index;
}

std::size_t InvertedIndex::df(const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? 0 : it->second.size();
}

double InvertedIndex::idf(const std::string& term) const {
  const auto d = static_cast<double>(df(term));
  if (d == 0.0) return 0.0;
  const auto n = static_cast<double>(doc_count());
  return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

const std::string& InvertedIndex::passage_id(std::uint32_t ordinal) const {
  if (ordinal >= ids_.size()) {
    throw UnknownOrdinal("ordinal " + std::to_string(ordinal) + " out of range");
  }
  return ids_[ordinal];
}

std::optional<std::uint32_t> InvertedIndex::ordinal_of(const std::string& passage_id) const {
  auto it = id_to_ordinal_.find(passage_id);
  if (it == id_to_ordinal_.end()) return std::nullopt;
  return it->second;
}

const std::string& InvertedIndex::passage_text(std::uint32_t ordinal) const {
  if (ordinal >= ids_.size()) {
    throw UnknownOrdinal("ordinal " + std::to_string(ordinal) + " out of range");
  }
  if (texts_.empty()) throw Error("index was built without stored texts");
  return texts_[ordinal];
}

std::size_t InvertedIndex::doc_length(std::uint32_t ordinal) const {
  if (ordinal >= doc_lengths_.size()) {
    throw UnknownOrdinal("ordinal " + std::to_string(ordinal) + " out of range");
  }
  return doc_lengths_[ordinal];
}

double InvertedIndex::term_doc_score(const std::vector<Posting>& postings, double idf,
                                     std::uint32_t ordinal) const {
  auto it = std::lower_bound(
      postings.begin(), postings.end(), ordinal,
      [](const Posting& p, std::uint32_t ord) { return p.ordinal < ord; });
  if (it == postings.end() || it->ordinal != ordinal) return 0.0;
  const double tf = it->tf;
  const double len_norm =
      1.0 - params_.b + params_.b * static_cast<double>(doc_lengths_[ordinal]) / avg_doc_length_;
  return idf * tf * (params_.k1 + 1.0) / (tf + params_.k1 * len_norm);
}

double InvertedIndex::bm25_score(std::span<const std::string> query_terms,
                                 std::uint32_t ordinal) const {
  if (doc_count() == 0) throw EmptyIndex("cannot score against an empty index");
  if (ordinal >= doc_count()) {
    throw UnknownOrdinal("ordinal " + std::to_string(ordinal) + " out of range");
  }
  double score = 0.0;
  for (const auto& term : query_terms) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;  // unseen terms contribute 0
    score += term_doc_score(it->second, idf(term), ordinal);
  }
  return score;
}

RankedList InvertedIndex::search(const std::string& query_id, const std::string& query,
                                 std::size_t top_n) const {
  if (top_n < 1) throw Error("top_n must be >= 1");
  RankedList result{query_id, Stage::FullRank, {}};
  if (doc_count() == 0) return result;

  const std::vector<std::string> terms = tokenize(query);
  // term-at-a-time accumulation; per-document addition order equals query
  // term order, so scores are bit-identical to a direct per-document sum
  std::unordered_map<std::uint32_t, double> acc;
  for (const auto& term : terms) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const double term_idf = idf(term);
    for (const Posting& posting : it->second) {
      const double tf = posting.tf;
      const double len_norm = 1.0 - params_.b +
                              params_.b * static_cast<double>(doc_lengths_[posting.ordinal]) /
                                  avg_doc_length_;
      acc[posting.ordinal] +=
          term_idf * tf * (params_.k1 + 1.0) / (tf + params_.k1 * len_norm);
    }
  }
  if (acc.empty()) return result;

  std::vector<std::pair<std::uint32_t, double>> scored(acc.begin(), acc.end());
  auto better = [this](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return ids_[a.first] < ids_[b.first];
  };
  const std::size_t keep = std::min(top_n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), better);
  scored.resize(keep);

  result.entries.reserve(keep);
  for (const auto& [ordinal, score] : scored) {
    result.entries.push_back({ids_[ordinal], score});
  }
  return result;
}

void InvertedIndex::save(const std::string& path) const {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u8(out, kVersion);
  put_u8(out, texts_.empty() && doc_count() > 0 ? 0 : kFlagTexts);
  put_f64(out, params_.k1);
  put_f64(out, params_.b);
  put_u64(out, doc_count());
  put_f64(out, avg_doc_length_);
  for (const auto& id : ids_) put_string(out, id);
  for (std::uint64_t len : doc_lengths_) put_u64(out, len);
  if (!(texts_.empty() && doc_count() > 0)) {
    for (const auto& text : texts_) put_string(out, text);
  }
  // deterministic term order on disk
  std::vector<const std::string*> terms;
  terms.reserve(postings_.size());
  for (const auto& [term, list] : postings_) terms.push_back(&term);
  std::sort(terms.begin(), terms.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  put_u64(out, terms.size());
  for (const std::string* term : terms) {
    put_string(out, *term);
    const auto& list = postings_.at(*term);
    put_u64(out, list.size());
    for (const Posting& posting : list) {
      put_u32(out, posting.ordinal);
      put_u32(out, posting.tf);
    }
  }

  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error("short write to " + path);
}

InvertedIndex InvertedIndex::load(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error("cannot read " + path);
  std::string data((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  ByteCursor cursor(std::move(data));

  char magic[8];
  cursor.raw(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CorruptIndex("bad magic bytes in " + path);
  }
  const std::uint8_t version = cursor.u8();
  if (version != kVersion) {
    throw VersionMismatch("index version " + std::to_string(version) + ", expected " +
                          std::to_string(kVersion));
  }
  const std::uint8_t flags = cursor.u8();

  InvertedIndex index;
  index.params_.k1 = cursor.f64();
  index.params_.b = cursor.f64();
  const std::uint64_t n = cursor.u64();
  index.avg_doc_length_ = cursor.f64();
  index.ids_.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string id = cursor.str();
    index.id_to_ordinal_.emplace(id, static_cast<std::uint32_t>(i));
    index.ids_.push_back(std::move(id));
  }
  index.doc_lengths_.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) index.doc_lengths_.push_back(cursor.u64());
  if ((flags & kFlagTexts) != 0) {
    index.texts_.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) index.texts_.push_back(cursor.str());
  }
  const std::uint64_t term_count = cursor.u64();
  for (std::uint64_t t = 0; t < term_count; ++t) {
    std::string term = cursor.str();
    const std::uint64_t posting_count = cursor.u64();
    std::vector<Posting> list;
    list.reserve(posting_count);
    for (std::uint64_t p = 0; p < posting_count; ++p) {
      Posting posting;
      posting.ordinal = cursor.u32();
      posting.tf = cursor.u32();
      if (posting.ordinal >= n) throw CorruptIndex("posting ordinal out of range");
      list.push_back(posting);
    }
    index.postings_.emplace(std::move(term), std::move(list));
  }
  if (!cursor.at_end()) throw CorruptIndex("trailing bytes in " + path);
  return index;
}

bool InvertedIndex::operator==(const InvertedIndex& other) const {
  return params_ == other.params_ && postings_ == other.postings_ &&
         doc_lengths_ == other.doc_lengths_ && avg_doc_length_ == other.avg_doc_length_ &&
         ids_ == other.ids_ && texts_ == other.texts_;
}

}  // namespace rankqa
