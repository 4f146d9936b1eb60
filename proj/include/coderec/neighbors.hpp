#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "coderec/vector_store.hpp"

namespace coderec {

/// One ranked hit. score is a cosine similarity for the hyperplane index and
/// a Euclidean distance for the query-aware index.
struct Neighbor {
  ExampleId example_id = 0;
  double score = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct QueryResult {
  std::vector<Neighbor> ranked;
  std::size_t candidate_count = 0;
  bool exhausted = false;  // fewer candidates than requested
};

namespace detail {

// Keeps the best top_n entries; ties always go to the smaller example id.
template <class Better>
void keep_top(std::vector<Neighbor>& hits, std::size_t top_n, Better better) {
  auto cmp = [&](const Neighbor& a, const Neighbor& b) {
    if (a.score != b.score) return better(a.score, b.score);
    return a.example_id < b.example_id;
  };
  if (hits.size() > top_n) {
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(top_n), hits.end(), cmp);
    hits.resize(top_n);
  } else {
    std::sort(hits.begin(), hits.end(), cmp);
  }
}

}  // namespace detail

}  // namespace coderec
