#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace rankqa {

/// Flat key = value configuration ('#' comments, blank lines allowed).
/// Unknown keys are ConfigErrors so typos surface immediately. Field names
/// are the file keys, bit-exact.
struct PipelineConfig {
  // corpus inputs
  std::string collection;     // pid<TAB>text passage file
  std::string cord_metadata;  // doc_id<TAB>title manifest
  std::string cord_fulltext;  // directory of <doc_id>.json paragraph files
  std::string queries;
  std::string qrels;
  std::string answers;

  std::string index;  // index file path
  std::size_t chunk_window = 60;
  std::size_t chunk_overlap = 15;

  std::size_t full_rank_top_n = 100;
  std::size_t rerank_size = 10;
  std::size_t rerank_batch_size = 16;
  std::string scorer = "builtin";     // "builtin" or an http endpoint
  std::string extractor = "builtin";  // same
  std::size_t qa_top_k = 1;

  std::vector<std::size_t> n_values = {10, 100};
  std::string embeddings;  // optional word-vector table

  std::string output_dir = "out";
  std::string run_tag = "rankqa";
  std::size_t workers = 1;
  std::size_t timeout_ms = 5000;
  std::size_t max_in_flight = 8;

  static PipelineConfig from_file(const std::string& path);
  /// Applies one `key = value` assignment (CLI overrides reuse this).
  void set(const std::string& key, const std::string& value);
  /// Cross-field invariants; throws ConfigError naming the field.
  void validate() const;
};

}  // namespace rankqa
