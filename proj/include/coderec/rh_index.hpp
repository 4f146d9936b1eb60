#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "coderec/error.hpp"
#include "coderec/neighbors.hpp"
#include "coderec/projection.hpp"
#include "coderec/vector_store.hpp"

namespace coderec {

struct RhParams {
  std::size_t tables = 10;  // M
  std::size_t bits = 10;    // K
  std::uint64_t seed = 42;

  void validate() const {
    if (tables < 1) throw Error(ErrorCode::kInvalidArgument, "M must be at least 1");
    if (bits < 1 || bits > 30) throw Error(ErrorCode::kInvalidArgument, "K must be in [1, 30]");
  }
};

/// Negative projections map to 0, everything else (including zero) to 1.
inline std::vector<std::uint8_t> sign_bits(std::span<const double> projected) {
  std::vector<std::uint8_t> bits(projected.size());
  for (std::size_t i = 0; i < projected.size(); ++i) bits[i] = projected[i] < 0.0 ? 0 : 1;
  return bits;
}

/// Sum of 2^i * bits[i].
inline std::uint32_t bucket_id(std::span<const std::uint8_t> bits) {
  std::uint32_t id = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) throw Error(ErrorCode::kInvalidArgument, "bit values must be 0 or 1");
    id |= static_cast<std::uint32_t>(bits[i]) << i;
  }
  return id;
}

/// Random-hyperplane LSH over a vector store.
///
/// Table t hashes a vector to the K-bit bucket formed by the signs of its
/// projections onto the columns of the table's Gaussian matrix. A query
/// collects every row sharing its bucket in any table, then ranks that
/// candidate set by exact cosine similarity.
class RhIndex {
 public:
  using BucketMap = std::unordered_map<std::uint32_t, std::vector<std::uint32_t>>;

  static RhIndex build(std::shared_ptr<const VectorStore> store, const RhParams& params) {
    params.validate();
    if (!store || store->count() == 0) throw Error(ErrorCode::kEmptyStore, "cannot index an empty store");
    auto start = std::chrono::steady_clock::now();

    RhIndex index;
    index.params_ = params;
    index.store_ = std::move(store);
    const auto& s = *index.store_;
    index.projections_ = ProjectionSet(params.seed, params.tables, s.dimension(), params.bits);
    index.tables_.resize(params.tables);
    std::vector<double> projected(params.bits);
    for (std::size_t t = 0; t < params.tables; ++t) {
      auto& buckets = index.tables_[t];
      for (std::size_t r = 0; r < s.count(); ++r) {
        index.projections_.project(t, s.row(r).data(), projected);
        buckets[bucket_from(projected)].push_back(static_cast<std::uint32_t>(r));
      }
    }

    index.build_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return index;
  }

  const RhParams& params() const noexcept { return params_; }
  const VectorStore& store() const noexcept { return *store_; }
  std::shared_ptr<const VectorStore> store_ptr() const noexcept { return store_; }
  const ProjectionSet& projections() const noexcept { return projections_; }
  const BucketMap& table(std::size_t t) const { return tables_.at(t); }
  double build_seconds() const noexcept { return build_seconds_; }

  template <NumericVector Q>
  std::uint32_t query_bucket(std::size_t t, const Q& q) const {
    check_query(q);
    std::vector<double> projected(params_.bits);
    projections_.project(t, std::ranges::data(q), projected);
    return bucket_from(projected);
  }

  /// Ascending, deduplicated row indices sharing a bucket with q in any table.
  template <NumericVector Q>
  std::vector<std::uint32_t> candidates(const Q& q) const {
    check_query(q);
    std::vector<double> projected(params_.bits);
    std::vector<std::uint32_t> rows;
    for (std::size_t t = 0; t < tables_.size(); ++t) {
      projections_.project(t, std::ranges::data(q), projected);
      auto it = tables_[t].find(bucket_from(projected));
      if (it != tables_[t].end()) rows.insert(rows.end(), it->second.begin(), it->second.end());
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    return rows;
  }

  template <NumericVector Q>
  QueryResult query(const Q& q, std::size_t top_n) const {
    if (top_n == 0) throw Error(ErrorCode::kInvalidArgument, "top_n must be positive");
    auto rows = candidates(q);
    QueryResult result;
    result.candidate_count = rows.size();
    result.exhausted = rows.size() < top_n;
    result.ranked.reserve(rows.size());
    for (auto r : rows) result.ranked.push_back({store_->id(r), cosine_similarity(q, store_->row(r))});
    detail::keep_top(result.ranked, top_n, [](double a, double b) { return a > b; });
    return result;
  }

 private:
  static std::uint32_t bucket_from(std::span<const double> projected) {
    std::uint32_t id = 0;
    for (std::size_t i = 0; i < projected.size(); ++i) {
      if (!(projected[i] < 0.0)) id |= 1u << i;
    }
    return id;
  }

  template <class Q>
  void check_query(const Q& q) const {
    if (std::ranges::size(q) != store_->dimension()) {
      throw Error(ErrorCode::kDimensionMismatch, "query has dimension " + std::to_string(std::ranges::size(q)) +
                                                     ", store has " + std::to_string(store_->dimension()));
    }
    if (dot(q, q) == 0.0) throw Error(ErrorCode::kZeroQuery, "query vector is zero");
  }

  RhParams params_;
  std::shared_ptr<const VectorStore> store_;
  ProjectionSet projections_;
  std::vector<BucketMap> tables_;
  double build_seconds_ = 0.0;
};

inline RhIndex build_rh(std::shared_ptr<const VectorStore> store, const RhParams& params) {
  return RhIndex::build(std::move(store), params);
}

template <NumericVector Q>
QueryResult query_rh(const RhIndex& index, const Q& q, std::size_t top_n) {
  return index.query(q, top_n);
}

}  // namespace coderec
