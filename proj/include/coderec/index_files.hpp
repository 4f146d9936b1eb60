#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "coderec/embedder.hpp"
#include "coderec/error.hpp"
#include "coderec/qa_index.hpp"
#include "coderec/rh_index.hpp"
#include "coderec/vector_store.hpp"

namespace coderec {

namespace detail {

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Embedder sidecar: <base>.embedder.json records how a store was produced, so
// queries can be embedded the same way. Stores without a sidecar (for example
// ones exported by an external encoder) are tagged "external".

struct EmbedderInfo {
  std::string kind = "external";  // "fallback" or "external"
  FallbackEmbedderConfig fallback;
  std::optional<std::filesystem::path> corpus_path;

  bool same_encoder(const EmbedderInfo& other) const {
    if (kind != other.kind) return false;
    if (kind != "fallback") return true;
    return fallback.seed == other.fallback.seed && fallback.dimension == other.fallback.dimension &&
           fallback.ngram_sizes == other.fallback.ngram_sizes;
  }
};

inline std::filesystem::path embedder_path(const std::filesystem::path& base) {
  return std::filesystem::path(base.string() + ".embedder.json");
}

inline void write_embedder_info(const std::filesystem::path& base, const EmbedderInfo& info) {
  nlohmann::ordered_json j;
  j["kind"] = info.kind;
  if (info.kind == "fallback") {
    j["seed"] = info.fallback.seed;
    j["dimension"] = info.fallback.dimension;
    j["ngram_sizes"] = info.fallback.ngram_sizes;
  }
  if (info.corpus_path) j["corpus_path"] = info.corpus_path->string();
  detail::write_text_file(embedder_path(base), j.dump(2) + "\n");
}

inline EmbedderInfo read_embedder_info(const std::filesystem::path& base) {
  EmbedderInfo info;
  if (!std::filesystem::exists(embedder_path(base))) return info;
  auto j = detail::read_json_file(embedder_path(base));
  try {
    info.kind = j.at("kind").get<std::string>();
    if (info.kind == "fallback") {
      info.fallback.seed = j.at("seed").get<std::uint64_t>();
      info.fallback.dimension = j.at("dimension").get<std::size_t>();
      info.fallback.ngram_sizes = j.at("ngram_sizes").get<std::vector<std::size_t>>();
    }
    if (j.contains("corpus_path")) info.corpus_path = j["corpus_path"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, embedder_path(base).string() + ": " + e.what());
  }
  return info;
}

// ---------------------------------------------------------------------------
// Index parameter files. Only parameters and the store path are persisted;
// loading rebuilds the index from the store, which is exact because the
// projections are regenerated from the seed.

struct IndexSpec {
  std::variant<RhParams, QaParams> params;
  std::filesystem::path store_path;

  bool is_rh() const { return std::holds_alternative<RhParams>(params); }
};

inline std::string index_params_text(const IndexSpec& spec) {
  nlohmann::ordered_json j;
  if (const auto* rh = std::get_if<RhParams>(&spec.params)) {
    j["algo"] = "rh";
    j["seed"] = rh->seed;
    j["M"] = rh->tables;
    j["K"] = rh->bits;
  } else {
    const auto& qa = std::get<QaParams>(spec.params);
    j["algo"] = "qa";
    j["seed"] = qa.seed;
    j["M"] = qa.tables;
    j["width_fraction"] = qa.width_fraction;
    j["l"] = qa.threshold();
  }
  j["store_path"] = spec.store_path.string();
  return j.dump(2) + "\n";
}

inline void write_index_params(const std::filesystem::path& path, const IndexSpec& spec) {
  detail::write_text_file(path, index_params_text(spec));
}

inline IndexSpec read_index_params(const std::filesystem::path& path) {
  auto j = detail::read_json_file(path);
  IndexSpec spec;
  try {
    auto algo = j.at("algo").get<std::string>();
    if (algo == "rh") {
      RhParams p;
      p.seed = j.at("seed").get<std::uint64_t>();
      p.tables = j.at("M").get<std::size_t>();
      p.bits = j.at("K").get<std::size_t>();
      p.validate();
      spec.params = p;
    } else if (algo == "qa") {
      QaParams p;
      p.seed = j.at("seed").get<std::uint64_t>();
      p.tables = j.at("M").get<std::size_t>();
      p.width_fraction = j.at("width_fraction").get<double>();
      if (j.contains("l")) p.l = j["l"].get<std::size_t>();
      p.validate();
      spec.params = p;
    } else {
      throw Error(ErrorCode::kParseError, path.string() + ": unknown algo '" + algo + "'");
    }
    spec.store_path = j.at("store_path").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  return spec;
}

/// Either index behind one query interface.
class AnyIndex {
 public:
  AnyIndex(RhIndex index) : index_(std::move(index)) {}
  AnyIndex(QaIndex index) : index_(std::move(index)) {}

  static AnyIndex build(std::shared_ptr<const VectorStore> store, const std::variant<RhParams, QaParams>& params) {
    if (const auto* rh = std::get_if<RhParams>(&params)) return AnyIndex(RhIndex::build(std::move(store), *rh));
    return AnyIndex(QaIndex::build(std::move(store), std::get<QaParams>(params)));
  }

  bool is_rh() const { return std::holds_alternative<RhIndex>(index_); }
  std::string_view algo() const { return is_rh() ? "rh" : "qa"; }
  /// What Neighbor::score means for this index.
  std::string_view score_name() const { return is_rh() ? "cosine" : "distance"; }

  const VectorStore& store() const {
    return std::visit([](const auto& i) -> const VectorStore& { return i.store(); }, index_);
  }

  double build_seconds() const {
    return std::visit([](const auto& i) { return i.build_seconds(); }, index_);
  }

  template <NumericVector Q>
  QueryResult query(const Q& q, std::size_t top_n) const {
    return std::visit([&](const auto& i) -> QueryResult { return i.query(q, top_n); }, index_);
  }

  const RhIndex* rh() const { return std::get_if<RhIndex>(&index_); }
  const QaIndex* qa() const { return std::get_if<QaIndex>(&index_); }

 private:
  std::variant<RhIndex, QaIndex> index_;
};

inline AnyIndex load_index(const IndexSpec& spec) {
  auto store = std::make_shared<const VectorStore>(read_store(spec.store_path));
  return AnyIndex::build(std::move(store), spec.params);
}

}  // namespace coderec
