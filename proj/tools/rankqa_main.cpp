// rankqa command line: index building, single-query search, end-to-end
// batch runs, file-based evaluation, and the rerank-size sweep.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rankqa/answer.hpp"
#include "rankqa/config.hpp"
#include "rankqa/corpus.hpp"
#include "rankqa/errors.hpp"
#include "rankqa/eval.hpp"
#include "rankqa/index.hpp"
#include "rankqa/pipeline.hpp"
#include "rankqa/ranked_list.hpp"
#include "rankqa/text.hpp"

namespace fs = std::filesystem;
using namespace rankqa;

namespace {

PipelineConfig load_config(const std::string& path) {
  return path.empty() ? PipelineConfig{} : PipelineConfig::from_file(path);
}

std::vector<std::size_t> parse_sizes(const std::string& csv) {
  std::vector<std::size_t> sizes;
  std::string item;
  for (char c : csv + ",") {
    if (c == ',') {
      if (!item.empty()) sizes.push_back(std::stoull(item));
      item.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      item.push_back(c);
    }
  }
  if (sizes.empty()) throw ConfigError("sizes", "must list at least one rerank size");
  return sizes;
}

int cmd_index(const PipelineConfig& base, const std::string& collection,
              const std::string& cord_metadata, const std::string& cord_fulltext,
              const std::string& out, bool chunk, std::size_t window, std::size_t overlap,
              double k1, double b, bool no_store_text) {
  PipelineConfig config = base;
  if (!collection.empty()) config.collection = collection;
  if (!cord_metadata.empty()) config.cord_metadata = cord_metadata;
  if (!cord_fulltext.empty()) config.cord_fulltext = cord_fulltext;
  if (window != 0) config.chunk_window = window;
  config.chunk_overlap = overlap;

  std::vector<Passage> passages;
  if (!config.cord_metadata.empty()) {
    const auto docs = read_cord_corpus(config.cord_metadata, config.cord_fulltext);
    for (const auto& doc : docs) {
      auto chunks = chunk_document(doc, {config.chunk_window, config.chunk_overlap});
      passages.insert(passages.end(), std::make_move_iterator(chunks.begin()),
                      std::make_move_iterator(chunks.end()));
    }
  } else if (!config.collection.empty()) {
    if (chunk) {
      for_each_passage(config.collection, [&](Passage&& p) {
        Document doc{p.doc_id, "", p.text};
        auto chunks = chunk_document(doc, {config.chunk_window, config.chunk_overlap});
        passages.insert(passages.end(), std::make_move_iterator(chunks.begin()),
                        std::make_move_iterator(chunks.end()));
      });
    } else {
      passages = read_passage_collection(config.collection);
    }
  } else {
    throw ConfigError("collection", "need --collection or --cord-metadata");
  }

  IndexBuildOptions options;
  options.params = {k1, b};
  options.store_texts = !no_store_text;
  const InvertedIndex index = InvertedIndex::build(passages, options);
  index.save(out);
  std::cout << "indexed " << index.doc_count() << " passages (avgdl "
            << format_fixed(index.avg_doc_length(), 2) << ") -> " << out << "\n";
  return 0;
}

int cmd_search(const PipelineConfig& base, const std::string& index_path,
               const std::string& query, std::size_t top_n, bool trec,
               const std::string& query_id, const std::string& tag) {
  const std::string path = index_path.empty() ? base.index : index_path;
  if (path.empty()) throw ConfigError("index", "path required");
  const InvertedIndex index = InvertedIndex::load(path);
  const RankedList results = index.search(query_id, query, top_n);
  if (trec) {
    std::cout << to_trec_lines(results, tag);
  } else {
    std::size_t rank = 1;
    for (const auto& entry : results.entries) {
      std::cout << rank++ << "\t" << entry.passage_id << "\t"
                << format_fixed(entry.score, 6) << "\n";
    }
  }
  return 0;
}

void print_batch_summary(const PipelineConfig& config, const BatchResult& batch) {
  std::cout << "processed " << batch.processed << " queries";
  if (batch.failed > 0) std::cout << " (" << batch.failed << " failed)";
  std::cout << ", time per query " << format_fixed(batch.time_per_query_s, 4) << "s\n";
  for (const auto& failure : batch.failures) std::cerr << "failed: " << failure << "\n";
  if (!batch.evaluated) return;

  SweepRow row;
  row.rerank_size = config.rerank_size;
  row.time_per_query_s = batch.time_per_query_s;
  row.full_rank = batch.full_rank_report.aggregate;
  row.re_rank = batch.re_rank_report.aggregate;
  row.qa = batch.qa_report.aggregate;
  if (!batch.full_rank_report.aggregate.empty()) {
    std::cout << render_ranking_table({row}, config.n_values);
  }
  if (!batch.qa_report.aggregate.empty()) {
    std::cout << render_qa_table({row}, batch.qa_report.aggregate.count("semantic_sim") > 0);
  }
}

int cmd_run(PipelineConfig config, const std::string& out_dir) {
  if (config.queries.empty()) throw ConfigError("queries", "path required");
  Pipeline pipeline = Pipeline::build(config);
  const auto queries = read_queries(config.queries);
  RelevanceJudgments qrels;
  ReferenceAnswers answers;
  if (!config.qrels.empty()) qrels = read_qrels(config.qrels);
  if (!config.answers.empty()) answers = read_answers(config.answers);

  const std::string out = out_dir.empty() ? config.output_dir : out_dir;
  const BatchResult batch = pipeline.run_batch(queries, qrels, answers, out);
  print_batch_summary(config, batch);
  std::cout << "run files in " << out << "\n";
  return batch.failed == queries.size() && !queries.empty() ? 2 : 0;
}

int cmd_eval(const PipelineConfig& base, const std::string& run_path,
             const std::string& qrels_path, const std::string& predictions_path,
             const std::string& answers_path, const std::string& embeddings_path,
             const std::string& n_values_csv, const std::string& out_path) {
  PipelineConfig config = base;
  if (!n_values_csv.empty()) config.set("n_values", n_values_csv);
  if (!embeddings_path.empty()) config.embeddings = embeddings_path;

  std::map<std::string, EvalReport> stages;
  if (!run_path.empty()) {
    if (qrels_path.empty()) throw ConfigError("qrels", "required with --run");
    const auto run = read_trec_run(run_path);
    stages["ranking"] = evaluate_run(run, read_qrels(qrels_path), config.n_values);
  }
  if (!predictions_path.empty()) {
    if (answers_path.empty()) throw ConfigError("answers", "required with --predictions");
    const auto predictions = read_predictions(predictions_path);
    const auto answers = read_answers(answers_path);
    if (!config.embeddings.empty()) {
      const EmbeddingTable table = EmbeddingTable::load(config.embeddings);
      stages["qa"] = evaluate_qa(predictions, answers, &table);
    } else {
      stages["qa"] = evaluate_qa(predictions, answers);
    }
  }
  if (stages.empty()) {
    throw ConfigError("run", "nothing to evaluate: pass --run/--qrels or --predictions/--answers");
  }
  const std::string json = report_to_json(stages);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Error("cannot write " + out_path);
    out << json << '\n';
  }
  std::cout << json << "\n";
  return 0;
}

int cmd_sweep(PipelineConfig config, const std::string& sizes_csv, const std::string& out_dir) {
  if (config.queries.empty()) throw ConfigError("queries", "path required");
  const auto sizes = parse_sizes(sizes_csv);
  const auto queries = read_queries(config.queries);
  RelevanceJudgments qrels;
  ReferenceAnswers answers;
  if (!config.qrels.empty()) qrels = read_qrels(config.qrels);
  if (!config.answers.empty()) answers = read_answers(config.answers);

  const std::string out = out_dir.empty() ? config.output_dir : out_dir;
  fs::create_directories(out);

  std::vector<SweepRow> rows;
  bool with_semantic = false;
  for (std::size_t size : sizes) {
    PipelineConfig per_size = config;
    per_size.rerank_size = size;
    per_size.full_rank_top_n = std::max(config.full_rank_top_n, size);
    Pipeline pipeline = Pipeline::build(per_size);
    const std::string size_dir = (fs::path(out) / ("size_" + std::to_string(size))).string();
    const BatchResult batch = pipeline.run_batch(queries, qrels, answers, size_dir);

    SweepRow row;
    row.rerank_size = size;
    row.time_per_query_s = batch.time_per_query_s;
    row.full_rank = batch.full_rank_report.aggregate;
    row.re_rank = batch.re_rank_report.aggregate;
    row.qa = batch.qa_report.aggregate;
    with_semantic = with_semantic || row.qa.count("semantic_sim") > 0;
    rows.push_back(std::move(row));
    for (const auto& failure : batch.failures) std::cerr << "failed: " << failure << "\n";
  }

  const std::string ranking_table = render_ranking_table(rows, config.n_values);
  const std::string qa_table = render_qa_table(rows, with_semantic);
  std::cout << ranking_table << "\n" << qa_table;
  std::ofstream rt(fs::path(out) / "sweep_ranking.txt");
  rt << ranking_table;
  std::ofstream qt(fs::path(out) / "sweep_qa.txt");
  qt << qa_table;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"three-stage ranking and question answering pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "flat key = value configuration file");

  // index
  auto* index_cmd = app.add_subcommand("index", "build and save an inverted index");
  std::string collection, cord_metadata, cord_fulltext, index_out;
  std::size_t chunk_window = 0, chunk_overlap = 15;
  double k1 = 1.2, b = 0.75;
  bool no_store_text = false;
  index_cmd->add_option("--collection", collection, "pid<TAB>text passage file");
  index_cmd->add_option("--cord-metadata", cord_metadata, "doc_id<TAB>title manifest");
  index_cmd->add_option("--cord-fulltext", cord_fulltext, "directory of <doc_id>.json files");
  index_cmd->add_option("--out", index_out, "index output path")->required();
  auto* window_opt =
      index_cmd->add_option("--chunk-window", chunk_window, "token window (default 60)");
  auto* overlap_opt =
      index_cmd->add_option("--chunk-overlap", chunk_overlap, "token overlap (default 15)");
  index_cmd->add_option("--k1", k1, "BM25 k1 (default 1.2)");
  index_cmd->add_option("--b", b, "BM25 b (default 0.75)");
  index_cmd->add_flag("--no-store-text", no_store_text, "do not store passage texts");

  // search
  auto* search_cmd = app.add_subcommand("search", "run one query, print the top-N");
  std::string search_index, search_query, search_qid = "q", search_tag = "rankqa";
  std::size_t search_top_n = 10;
  bool search_trec = false;
  search_cmd->add_option("--index", search_index, "index file");
  search_cmd->add_option("--query", search_query, "query text")->required();
  search_cmd->add_option("--top-n", search_top_n, "results to print (default 10)");
  search_cmd->add_flag("--trec", search_trec, "print TREC run lines");
  search_cmd->add_option("--query-id", search_qid, "query id for TREC output");
  search_cmd->add_option("--tag", search_tag, "run tag for TREC output");

  // run
  auto* run_cmd = app.add_subcommand("run", "end-to-end batch over a query file");
  std::string run_queries, run_qrels, run_answers, run_out, run_index, run_scorer,
      run_extractor, run_embeddings;
  std::size_t run_rerank_size = 0, run_workers = 0, run_top_n = 0;
  run_cmd->add_option("--queries", run_queries, "qid<TAB>text query file");
  run_cmd->add_option("--qrels", run_qrels, "relevance judgments");
  run_cmd->add_option("--answers", run_answers, "qid<TAB>answer references");
  run_cmd->add_option("--out", run_out, "output directory");
  run_cmd->add_option("--index", run_index, "index file");
  run_cmd->add_option("--rerank-size", run_rerank_size, "candidates to re-score");
  run_cmd->add_option("--full-rank-top-n", run_top_n, "first-stage depth");
  run_cmd->add_option("--scorer", run_scorer, "'builtin' or scoring endpoint");
  run_cmd->add_option("--extractor", run_extractor, "'builtin' or extraction endpoint");
  run_cmd->add_option("--embeddings", run_embeddings, "word-vector table for semantic_sim");
  run_cmd->add_option("--workers", run_workers, "parallel query workers");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "metrics from files only");
  std::string eval_run, eval_qrels, eval_predictions, eval_answers, eval_embeddings,
      eval_n_values, eval_out;
  eval_cmd->add_option("--run", eval_run, "TREC run file");
  eval_cmd->add_option("--qrels", eval_qrels, "relevance judgments");
  eval_cmd->add_option("--predictions", eval_predictions, "predictions TSV");
  eval_cmd->add_option("--answers", eval_answers, "reference answers TSV");
  eval_cmd->add_option("--embeddings", eval_embeddings, "word-vector table");
  eval_cmd->add_option("--n-values", eval_n_values, "cutoffs, e.g. 10,100");
  eval_cmd->add_option("--out", eval_out, "also write the report here");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "repeat run across rerank sizes");
  std::string sweep_sizes, sweep_queries, sweep_qrels, sweep_answers, sweep_out, sweep_index;
  sweep_cmd->add_option("--sizes", sweep_sizes, "rerank sizes, e.g. 1,10,50,100")->required();
  sweep_cmd->add_option("--queries", sweep_queries, "qid<TAB>text query file");
  sweep_cmd->add_option("--qrels", sweep_qrels, "relevance judgments");
  sweep_cmd->add_option("--answers", sweep_answers, "reference answers TSV");
  sweep_cmd->add_option("--out", sweep_out, "output directory");
  sweep_cmd->add_option("--index", sweep_index, "index file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems are config errors
  }

  try {
    PipelineConfig config = load_config(config_path);
    if (app.got_subcommand(index_cmd)) {
      const bool chunk = window_opt->count() > 0 || overlap_opt->count() > 0;
      if (chunk_window == 0) chunk_window = 60;
      return cmd_index(config, collection, cord_metadata, cord_fulltext, index_out, chunk,
                       chunk_window, chunk_overlap, k1, b, no_store_text);
    }
    if (app.got_subcommand(search_cmd)) {
      return cmd_search(config, search_index, search_query, search_top_n, search_trec,
                        search_qid, search_tag);
    }
    if (app.got_subcommand(run_cmd)) {
      if (!run_queries.empty()) config.queries = run_queries;
      if (!run_qrels.empty()) config.qrels = run_qrels;
      if (!run_answers.empty()) config.answers = run_answers;
      if (!run_index.empty()) config.index = run_index;
      if (!run_scorer.empty()) config.scorer = run_scorer;
      if (!run_extractor.empty()) config.extractor = run_extractor;
      if (!run_embeddings.empty()) config.embeddings = run_embeddings;
      if (run_rerank_size != 0) config.rerank_size = run_rerank_size;
      if (run_top_n != 0) config.full_rank_top_n = run_top_n;
      if (run_workers != 0) config.workers = run_workers;
      return cmd_run(std::move(config), run_out);
    }
    if (app.got_subcommand(eval_cmd)) {
      return cmd_eval(config, eval_run, eval_qrels, eval_predictions, eval_answers,
                      eval_embeddings, eval_n_values, eval_out);
    }
    if (app.got_subcommand(sweep_cmd)) {
      if (!sweep_queries.empty()) config.queries = sweep_queries;
      if (!sweep_qrels.empty()) config.qrels = sweep_qrels;
      if (!sweep_answers.empty()) config.answers = sweep_answers;
      if (!sweep_index.empty()) config.index = sweep_index;
      return cmd_sweep(std::move(config), sweep_sizes, sweep_out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
