#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coderec/corpus.hpp"
#include "coderec/embedder.hpp"
#include "coderec/error.hpp"
#include "coderec/evaluation.hpp"
#include "coderec/index_files.hpp"
#include "coderec/timing.hpp"
#include "coderec/vector_store.hpp"

namespace coderec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

namespace fs = std::filesystem;

inline std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return in;
}

inline std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  return out;
}

inline void require_store(const fs::path& base) {
  if (!fs::exists(evec_path(base))) throw Error(ErrorCode::kIoError, "missing vector file " + evec_path(base).string());
  if (!fs::exists(ids_path(base))) throw Error(ErrorCode::kIoError, "missing id file " + ids_path(base).string());
}

inline std::string preview(const std::string& code, std::size_t width = 60) {
  std::string out;
  bool space = false;
  for (char c : code) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(c);
    if (utf8_length(out) >= width) break;
  }
  return out;
}

inline std::map<ExampleId, std::string> load_previews(const EmbedderInfo& info) {
  std::map<ExampleId, std::string> previews;
  if (!info.corpus_path || !fs::exists(*info.corpus_path)) return previews;
  auto in = open_input(*info.corpus_path);
  for (auto& ex : read_corpus(in)) previews.emplace(ex.example_id, preview(ex.code_text));
  return previews;
}

inline std::vector<QueryRecord> load_queries(const fs::path& path) {
  auto in = open_input(path);
  return read_queries(in);
}

/// Query text must be embedded by the encoder that produced the store.
inline std::vector<double> embed_query(const EmbedderInfo& store_info, const std::string& text) {
  if (store_info.kind != "fallback") {
    throw Error(ErrorCode::kInvalidArgument,
                "store was embedded by an external encoder; text queries need --query-vectors from that encoder");
  }
  return embed_text(text, store_info.fallback);
}

inline std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline std::vector<std::size_t> parse_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      long long v = std::stoll(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw CLI::ValidationError("list", "expected comma-separated positive integers, got '" + text + "'");
    }
  }
  if (out.empty()) throw CLI::ValidationError("list", "empty list");
  return out;
}

inline std::vector<double> read_score_column(const fs::path& path) {
  auto in = open_input(path);
  std::vector<double> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.rfind('\t');
    std::string cell = tab == std::string::npos ? line : line.substr(tab + 1);
    try {
      std::size_t used = 0;
      double v = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      scores.push_back(v);
    } catch (const std::exception&) {
      if (scores.empty() && line_no == 1) continue;  // header row
      throw Error(ErrorCode::kParseError, path.string() + " line " + std::to_string(line_no) + ": not a number");
    }
  }
  return scores;
}

struct IngestArgs {
  std::string posts, out;
  std::int64_t min_score = 2;
  std::size_t min_len = 100;
  std::string cutoff;
  bool strict = false;
};

inline int run_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
  CorpusOptions opts;
  opts.min_score = a.min_score;
  opts.min_len = a.min_len;
  opts.strict = a.strict;
  if (!a.cutoff.empty()) {
    opts.cutoff_date = parse_timestamp(a.cutoff);
    if (!opts.cutoff_date) throw Error(ErrorCode::kInvalidArgument, "bad --cutoff-date '" + a.cutoff + "'");
  }
  auto in = open_input(a.posts);
  auto result = build_corpus(in, opts);
  auto corpus_out = open_output(a.out);
  write_corpus(corpus_out, result.examples);
  write_funnel(out, result.funnel);
  err << "examples\t" << result.examples.size() << "\n"
      << "dangling_references\t" << result.dangling_references << "\n"
      << "malformed_records\t" << result.malformed_records << "\n"
      << "malformed_blocks\t" << result.malformed_blocks << "\n";
  return kExitOk;
}

struct EmbedArgs {
  std::string corpus, out;
  std::uint64_t seed = 42;
};

inline int run_embed(const EmbedArgs& a, std::ostream& out, std::ostream&) {
  auto in = open_input(a.corpus);
  auto examples = read_corpus(in);
  FallbackEmbedderConfig cfg;
  cfg.seed = a.seed;
  std::vector<float> matrix;
  matrix.reserve(examples.size() * cfg.dimension);
  std::vector<ExampleId> ids;
  for (const auto& ex : examples) {
    auto v = embed_text(ex.code_text, cfg);
    matrix.insert(matrix.end(), v.begin(), v.end());
    ids.push_back(ex.example_id);
  }
  VectorStore store(cfg.dimension, std::move(matrix), std::move(ids));
  write_store(store, a.out);
  EmbedderInfo info;
  info.kind = "fallback";
  info.fallback = cfg;
  info.corpus_path = fs::absolute(a.corpus);
  write_embedder_info(a.out, info);
  out << "vectors\t" << store.count() << "\n" << "dimension\t" << store.dimension() << "\n";
  return kExitOk;
}

struct BuildArgs {
  std::string vectors, algo = "qa", out;
  std::size_t tables = 10, bits = 10;
  double width_fraction = 0.1;
  std::optional<std::size_t> l;
  std::uint64_t seed = 42;
};

inline int run_build(const BuildArgs& a, std::ostream& out, std::ostream&) {
  require_store(a.vectors);
  IndexSpec spec;
  spec.store_path = fs::absolute(a.vectors);
  if (a.algo == "rh") {
    spec.params = RhParams{a.tables, a.bits, a.seed};
  } else {
    QaParams p;
    p.tables = a.tables;
    p.seed = a.seed;
    p.width_fraction = a.width_fraction;
    p.l = a.l;
    spec.params = p;
  }
  std::visit([](const auto& p) { p.validate(); }, spec.params);
  auto index = load_index(spec);
  write_index_params(a.out, spec);
  out << "algo\t" << index.algo() << "\n"
      << "rows\t" << index.store().count() << "\n"
      << "build_seconds\t" << format_score(index.build_seconds()) << "\n";
  return kExitOk;
}

struct QueryArgs {
  std::string index, text, query_file, query_vectors;
  std::size_t top = 10;
};

inline int run_query(const QueryArgs& a, std::ostream& out, std::ostream& err) {
  auto spec = read_index_params(a.index);
  require_store(spec.store_path);
  auto info = read_embedder_info(spec.store_path);
  auto index = load_index(spec);
  auto previews = load_previews(info);

  auto emit = [&](const std::string* label, const std::vector<double>& q) {
    auto result = index.query(q, a.top);
    if (result.exhausted) {
      err << "note: only " << result.candidate_count << " candidates" << (label ? " for " + *label : "") << "\n";
    }
    for (std::size_t r = 0; r < result.ranked.size(); ++r) {
      const auto& hit = result.ranked[r];
      if (label) out << *label << '\t';
      auto p = previews.find(hit.example_id);
      out << (r + 1) << '\t' << hit.example_id << '\t' << format_score(hit.score) << '\t'
          << (p == previews.end() ? "" : p->second) << '\n';
    }
  };

  if (!a.text.empty()) {
    emit(nullptr, embed_query(info, a.text));
  } else if (!a.query_file.empty()) {
    for (const auto& q : load_queries(a.query_file)) emit(&q.query_id, embed_query(info, q.text));
  } else {
    require_store(a.query_vectors);
    auto qinfo = read_embedder_info(a.query_vectors);
    if (!qinfo.same_encoder(info)) {
      throw Error(ErrorCode::kInvalidArgument, "query vectors and store come from different encoders");
    }
    auto qstore = read_store(a.query_vectors);
    for (std::size_t i = 0; i < qstore.count(); ++i) {
      auto row = qstore.row(i);
      std::string label = std::to_string(qstore.id(i));
      emit(&label, std::vector<double>(row.begin(), row.end()));
    }
  }
  return kExitOk;
}

struct BenchArgs {
  std::string index, queries, judgments, ks = "10,20,30";
};

inline int run_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  auto ks = parse_list(a.ks);
  std::size_t depth = *std::max_element(ks.begin(), ks.end());
  auto spec = read_index_params(a.index);
  require_store(spec.store_path);
  auto info = read_embedder_info(spec.store_path);
  auto index = load_index(spec);
  auto queries = load_queries(a.queries);
  auto jin = open_input(a.judgments);
  auto judgments = read_judgments(jin);

  std::vector<RankedList> lists;
  for (const auto& q : queries) {
    auto result = index.query(embed_query(info, q.text), depth);
    RankedList list{q.query_id, {}};
    for (const auto& hit : result.ranked) list.examples.push_back(hit.example_id);
    lists.push_back(std::move(list));
  }

  std::size_t moved = 0;
  std::map<std::pair<std::string, ExampleId>, std::size_t> position;
  for (const auto& l : lists) {
    for (std::size_t r = 0; r < l.examples.size(); ++r) position[{l.query_id, l.examples[r]}] = r + 1;
  }
  for (const auto& j : judgments) {
    auto it = position.find({j.query_id, j.example_id});
    if (it != position.end() && it->second != j.rank) ++moved;
  }
  if (moved > 0) err << "note: " << moved << " judged items appear at a different rank than recorded\n";

  out << "group\tqueries";
  for (auto k : ks) out << "\thitrate@" << k;
  out << "\tmrr\trelevance\tsuccess_rate\tprecision@5\n";

  auto report = [&](const std::string& group, std::optional<QueryKind> kind) {
    std::vector<RankedList> subset;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      if (!kind || queries[i].kind == *kind) subset.push_back(lists[i]);
    }
    if (subset.empty()) return;
    EvalRun run(std::move(subset), judgments, 3, false);
    std::vector<double> relevance;
    for (std::size_t q = 0; q < run.size(); ++q) relevance.push_back(query_relevance(run, q));
    out << group << '\t' << run.size();
    for (auto k : ks) out << '\t' << format_score(hitrate_at_k(run, k));
    out << '\t' << format_score(mrr(run)) << '\t' << format_score(relevance_summary(relevance).mean) << '\t'
        << format_score(success_rate(run)) << '\t' << format_score(precision_at5(run)) << '\n';
  };
  report("natural_language", QueryKind::kNaturalLanguage);
  report("api_name", QueryKind::kApiName);
  report("all", std::nullopt);
  return kExitOk;
}

struct CompareArgs {
  std::string a, b;
  double alpha = 0.05;
};

inline int run_compare(const CompareArgs& a, std::ostream& out, std::ostream&) {
  auto xs = read_score_column(a.a);
  auto ys = read_score_column(a.b);
  auto w = wilcoxon_rank_sum(xs, ys);
  auto crit = critical_u(xs.size(), ys.size(), a.alpha);
  out << "n_a\tn_b\tcritical_u\tu\tz\tcritical_p\tp\tresult\n";
  out << xs.size() << '\t' << ys.size() << '\t' << (crit ? std::to_string(*crit) : std::string("NA")) << '\t'
      << format_score(w.u) << '\t' << format_score(w.z) << '\t' << format_score(a.alpha) << '\t'
      << format_score(w.p_two_sided) << '\t' << (w.p_two_sided < a.alpha ? "Significant" : "Not Significant") << '\n';
  return kExitOk;
}

struct TimingArgs {
  std::string vectors, tables = "2,5,10,20,30,40,50", queries;
  std::size_t top = 10;
  std::uint64_t seed = 42;
};

inline int run_timing(const TimingArgs& a, std::ostream& out, std::ostream&) {
  auto ms = parse_list(a.tables);
  require_store(a.vectors);
  auto info = read_embedder_info(a.vectors);
  auto store = std::make_shared<const VectorStore>(read_store(a.vectors));
  std::vector<std::vector<double>> qs;
  for (const auto& q : load_queries(a.queries)) qs.push_back(embed_query(info, q.text));
  RhParams rh;
  rh.seed = a.seed;
  QaParams qa;
  qa.seed = a.seed;
  write_timing_report(out, timing_sweep(store, ms, qs, a.top, rh, qa));
  return kExitOk;
}

}  // namespace detail

/// Entry point shared by the coderec binary and the tests. Exit codes: 0 on
/// success, 1 for runtime or data errors, 2 for usage errors.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Code example recommendation with random-hyperplane and query-aware LSH", "coderec"};
  app.require_subcommand(1, 1);
  app.failure_message(CLI::FailureMessage::help);

  detail::IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Extract a code-example corpus from a Posts.xml dump");
  c_ingest->add_option("--posts", ingest.posts, "Posts.xml rows file")->required();
  c_ingest->add_option("--out", ingest.out, "Output corpus (JSON Lines)")->required();
  c_ingest->add_option("--min-score", ingest.min_score, "Minimum answer score")->capture_default_str();
  c_ingest->add_option("--min-len", ingest.min_len, "Code blocks must be longer than this")->capture_default_str();
  c_ingest->add_option("--cutoff-date", ingest.cutoff, "Drop posts created after this ISO-8601 time");
  c_ingest->add_flag("--strict", ingest.strict, "Abort on the first malformed row");

  detail::EmbedArgs embed;
  auto* c_embed = app.add_subcommand("embed", "Embed a corpus with the built-in n-gram encoder");
  c_embed->add_option("--corpus", embed.corpus, "Corpus file")->required();
  c_embed->add_option("--out", embed.out, "Output base path (.evec/.ids)")->required();
  c_embed->add_option("--seed", embed.seed, "Hash seed")->capture_default_str();

  detail::BuildArgs build;
  auto* c_build = app.add_subcommand("build", "Build an index and write its parameter file");
  c_build->add_option("--vectors", build.vectors, "Vector store base path")->required();
  c_build->add_option("--algo", build.algo, "rh or qa")->check(CLI::IsMember({"rh", "qa"}))->capture_default_str();
  c_build->add_option("--tables", build.tables, "Number of hash tables M")->capture_default_str();
  c_build->add_option("--bits", build.bits, "Bits per table K (rh)")->capture_default_str();
  c_build->add_option("--width-fraction", build.width_fraction, "Window as a fraction of the max hash distance (qa)")
      ->capture_default_str();
  c_build->add_option("--l", build.l, "Collision threshold (qa), default ceil(M/2)");
  c_build->add_option("--seed", build.seed, "Projection seed")->capture_default_str();
  c_build->add_option("--out", build.out, "Parameter file to write")->required();

  detail::QueryArgs query;
  auto* c_query = app.add_subcommand("query", "Query an index");
  c_query->add_option("--index", query.index, "Index parameter file")->required();
  auto* text_opt = c_query->add_option("--text", query.text, "Query text");
  auto* file_opt = c_query->add_option("--query-file", query.query_file, "Queries TSV (query_id, kind, text)");
  auto* vec_opt = c_query->add_option("--query-vectors", query.query_vectors, "Pre-embedded query store base path");
  text_opt->excludes(file_opt)->excludes(vec_opt);
  file_opt->excludes(vec_opt);
  c_query->add_option("--top", query.top, "Results per query")->check(CLI::PositiveNumber)->capture_default_str();
  c_query->callback([&] {
    if (query.text.empty() && query.query_file.empty() && query.query_vectors.empty()) {
      throw CLI::RequiredError("one of --text, --query-file, --query-vectors");
    }
  });

  detail::BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "HitRate, MRR, relevance, success rate and precision");
  c_bench->add_option("--index", bench.index, "Index parameter file")->required();
  c_bench->add_option("--queries", bench.queries, "Queries TSV")->required();
  c_bench->add_option("--judgments", bench.judgments, "Judgments TSV")->required();
  c_bench->add_option("--k", bench.ks, "Comma-separated cutoffs")->capture_default_str();

  detail::CompareArgs compare;
  auto* c_compare = app.add_subcommand("compare", "Wilcoxon rank-sum test on two score columns");
  c_compare->add_option("--a", compare.a, "First scores file")->required();
  c_compare->add_option("--b", compare.b, "Second scores file")->required();
  c_compare->add_option("--alpha", compare.alpha, "Significance level")->check(CLI::Range(0.0, 1.0))->capture_default_str();

  detail::TimingArgs timing;
  auto* c_timing = app.add_subcommand("timing", "Build and query timings for both indices over a sweep of M");
  c_timing->add_option("--vectors", timing.vectors, "Vector store base path")->required();
  c_timing->add_option("--tables", timing.tables, "Comma-separated table counts")->capture_default_str();
  c_timing->add_option("--queries", timing.queries, "Queries TSV")->required();
  c_timing->add_option("--top", timing.top, "Results per query")->check(CLI::PositiveNumber)->capture_default_str();
  c_timing->add_option("--seed", timing.seed, "Projection seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_ingest->parsed()) return detail::run_ingest(ingest, out, err);
    if (c_embed->parsed()) return detail::run_embed(embed, out, err);
    if (c_build->parsed()) return detail::run_build(build, out, err);
    if (c_query->parsed()) return detail::run_query(query, out, err);
    if (c_bench->parsed()) return detail::run_bench(bench, out, err);
    if (c_compare->parsed()) return detail::run_compare(compare, out, err);
    if (c_timing->parsed()) return detail::run_timing(timing, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace coderec::cli
