#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "coderec/error.hpp"
#include "coderec/neighbors.hpp"
#include "coderec/projection.hpp"
#include "coderec/vector_store.hpp"

namespace coderec {

struct QaParams {
  std::size_t tables = 10;  // M
  std::uint64_t seed = 42;
  double width_fraction = 0.1;
  std::optional<std::size_t> l;  // collision threshold, defaults to ceil(M / 2)
  bool auto_relax = true;

  std::size_t threshold() const { return l.value_or((tables + 1) / 2); }

  void validate() const {
    if (tables < 1) throw Error(ErrorCode::kInvalidArgument, "M must be at least 1");
    if (!(width_fraction > 0.0 && width_fraction <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "width_fraction must be in (0, 1]");
    }
    std::size_t lv = threshold();
    if (lv < 1 || lv > tables) throw Error(ErrorCode::kInvalidArgument, "l must be in [1, M]");
  }
};

struct QaQueryState {
  std::vector<std::uint32_t> collision_counts;  // per row
  std::vector<std::uint32_t> candidates;        // ascending rows
  std::vector<double> effective_w;              // per table
  std::size_t effective_l = 0;
};

struct QaQueryResult : QueryResult {
  std::size_t effective_l = 0;
};

/// w = 2 * fraction * max_j |h(o_j) - h(q)|, so the collision test
/// |h(o) - h(q)| <= w/2 admits objects within fraction of the farthest one.
inline double resolve_width(std::span<const double> table_hashes, double query_hash, double fraction) {
  if (!(fraction > 0.0)) throw Error(ErrorCode::kInvalidArgument, "width fraction must be positive");
  double max_delta = 0.0;
  for (double h : table_hashes) max_delta = std::max(max_delta, std::abs(h - query_hash));
  return 2.0 * fraction * max_delta;
}

/// Query-aware LSH with one-dimensional Gaussian projections.
///
/// Building only records h_i(o_j) = <o_j, a_i> for every table i and row j.
/// Bucket boundaries are decided per query: in table i an object collides
/// with q when its hash lies within w_i/2 of h_i(q), and objects colliding in
/// at least l tables are ranked by exact Euclidean distance.
class QaIndex {
 public:
  static QaIndex build(std::shared_ptr<const VectorStore> store, const QaParams& params) {
    params.validate();
    if (!store || store->count() == 0) throw Error(ErrorCode::kEmptyStore, "cannot index an empty store");
    auto start = std::chrono::steady_clock::now();

    QaIndex index;
    index.params_ = params;
    index.store_ = std::move(store);
    const auto& s = *index.store_;
    index.projections_ = ProjectionSet(params.seed, params.tables, s.dimension(), 1);
    index.hashes_.resize(params.tables * s.count());
    index.order_.resize(params.tables * s.count());
    index.sorted_.resize(params.tables * s.count());
    for (std::size_t t = 0; t < params.tables; ++t) {
      auto a = index.projections_.column(t, 0);
      double* out = index.hashes_.data() + t * s.count();
      for (std::size_t r = 0; r < s.count(); ++r) out[r] = detail::dot(s.row(r).data(), a.data(), a.size());

      // rows ordered by hash value, so a query window is a contiguous range
      auto order = index.order_.begin() + static_cast<std::ptrdiff_t>(t * s.count());
      std::iota(order, order + static_cast<std::ptrdiff_t>(s.count()), 0u);
      std::stable_sort(order, order + static_cast<std::ptrdiff_t>(s.count()),
                       [out](std::uint32_t x, std::uint32_t y) { return out[x] < out[y]; });
      for (std::size_t k = 0; k < s.count(); ++k) index.sorted_[t * s.count() + k] = out[order[static_cast<std::ptrdiff_t>(k)]];
    }

    index.build_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return index;
  }

  const QaParams& params() const noexcept { return params_; }
  const VectorStore& store() const noexcept { return *store_; }
  std::shared_ptr<const VectorStore> store_ptr() const noexcept { return store_; }
  const ProjectionSet& projections() const noexcept { return projections_; }
  double build_seconds() const noexcept { return build_seconds_; }

  /// h_t(o_j) for every row j.
  std::span<const double> hashes(std::size_t t) const {
    if (t >= params_.tables) throw Error(ErrorCode::kIndexOutOfRange, "table " + std::to_string(t));
    return {hashes_.data() + t * store_->count(), store_->count()};
  }

  template <NumericVector Q>
  double query_hash(std::size_t t, const Q& q) const {
    check_query(q);
    auto a = projections_.column(t, 0);
    return detail::dot(std::ranges::data(q), a.data(), a.size());
  }

  template <NumericVector Q>
  QaQueryState collect_candidates(const Q& q) const {
    return collect_candidates(q, params_.width_fraction, params_.threshold());
  }

  /// Same as above with the width fraction and l overridden for this call.
  template <NumericVector Q>
  QaQueryState collect_candidates(const Q& q, double width_fraction, std::size_t l) const {
    check_query(q);
    if (l < 1 || l > params_.tables) throw Error(ErrorCode::kInvalidArgument, "l must be in [1, M]");
    const std::size_t n = store_->count();
    QaQueryState state;
    state.collision_counts.assign(n, 0);
    state.effective_w.resize(params_.tables);
    std::uint32_t max_count = 0;
    for (std::size_t t = 0; t < params_.tables; ++t) {
      double hq = query_hash(t, q);
      auto sorted = std::span<const double>(sorted_).subspan(t * n, n);
      // |h - hq| is monotone in h on either side of hq, so the farthest hash
      // is an end of the sorted run and the colliding rows are contiguous.
      double max_delta = std::max(std::abs(sorted.front() - hq), std::abs(sorted.back() - hq));
      double w = 2.0 * width_fraction * max_delta;
      state.effective_w[t] = w;
      double half = w / 2.0;
      auto collides = [&](double h) { return std::abs(h - hq) <= half; };
      auto first = std::partition_point(sorted.begin(), sorted.end(),
                                        [&](double h) { return h < hq && !collides(h); });
      auto last = std::partition_point(first, sorted.end(), [&](double h) { return h <= hq || collides(h); });
      const std::uint32_t* rows = order_.data() + t * n;
      for (auto k = static_cast<std::size_t>(first - sorted.begin()); k < static_cast<std::size_t>(last - sorted.begin());
           ++k) {
        std::uint32_t c = ++state.collision_counts[rows[k]];
        if (c == l) state.candidates.push_back(rows[k]);
        max_count = std::max(max_count, c);
      }
    }

    std::size_t threshold = l;
    if (state.candidates.empty() && params_.auto_relax && max_count > 0) {
      // lowering l one step at a time stops exactly at the largest count
      threshold = max_count;
      for (std::size_t j = 0; j < n; ++j) {
        if (state.collision_counts[j] >= threshold) state.candidates.push_back(static_cast<std::uint32_t>(j));
      }
    } else if (state.candidates.empty() && params_.auto_relax) {
      threshold = 1;
    }
    std::sort(state.candidates.begin(), state.candidates.end());
    state.effective_l = threshold;
    return state;
  }

  template <NumericVector Q>
  QaQueryResult query(const Q& q, std::size_t top_n) const {
    if (top_n == 0) throw Error(ErrorCode::kInvalidArgument, "top_n must be positive");
    auto state = collect_candidates(q);
    QaQueryResult result;
    result.effective_l = state.effective_l;
    result.candidate_count = state.candidates.size();
    result.exhausted = state.candidates.size() < top_n;
    result.ranked.reserve(state.candidates.size());
    for (auto r : state.candidates) result.ranked.push_back({store_->id(r), euclidean_distance(q, store_->row(r))});
    detail::keep_top(result.ranked, top_n, [](double a, double b) { return a < b; });
    return result;
  }

 private:
  template <class Q>
  void check_query(const Q& q) const {
    if (std::ranges::size(q) != store_->dimension()) {
      throw Error(ErrorCode::kDimensionMismatch, "query has dimension " + std::to_string(std::ranges::size(q)) +
                                                     ", store has " + std::to_string(store_->dimension()));
    }
  }

  QaParams params_;
  std::shared_ptr<const VectorStore> store_;
  ProjectionSet projections_;
  std::vector<double> hashes_;        // tables x rows
  std::vector<std::uint32_t> order_;  // per table, rows sorted by hash
  std::vector<double> sorted_;        // per table, hashes in that order
  double build_seconds_ = 0.0;
};

inline QaIndex build_qa(std::shared_ptr<const VectorStore> store, const QaParams& params) {
  return QaIndex::build(std::move(store), params);
}

template <NumericVector Q>
QaQueryResult query_qa(const QaIndex& index, const Q& q, std::size_t top_n) {
  return index.query(q, top_n);
}

}  // namespace coderec
