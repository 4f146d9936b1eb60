#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <ranges>
#include <span>
#include <vector>

#include "coderec/detail/hash.hpp"
#include "coderec/error.hpp"

namespace coderec {

template <class R>
concept NumericVector = std::ranges::contiguous_range<R> && std::ranges::sized_range<R> &&
                        std::is_arithmetic_v<std::ranges::range_value_t<R>>;

namespace detail {

// Four independent accumulators keep the summation order fixed while giving
// the compiler room to pipeline.
template <class A, class B>
double dot(const A* a, const B* b, std::size_t n) noexcept {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    s1 += static_cast<double>(a[i + 1]) * static_cast<double>(b[i + 1]);
    s2 += static_cast<double>(a[i + 2]) * static_cast<double>(b[i + 2]);
    s3 += static_cast<double>(a[i + 3]) * static_cast<double>(b[i + 3]);
  }
  for (; i < n; ++i) s0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return (s0 + s1) + (s2 + s3);
}

template <class A, class B>
double squared_distance(const A* a, const B* b, std::size_t n) noexcept {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    double d0 = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    double d1 = static_cast<double>(a[i + 1]) - static_cast<double>(b[i + 1]);
    double d2 = static_cast<double>(a[i + 2]) - static_cast<double>(b[i + 2]);
    double d3 = static_cast<double>(a[i + 3]) - static_cast<double>(b[i + 3]);
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  for (; i < n; ++i) {
    double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s0 += d * d;
  }
  return (s0 + s1) + (s2 + s3);
}

/// Uniform double in (0, 1] from a 64-bit word.
inline double to_unit_open_closed(std::uint64_t x) noexcept {
  return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

}  // namespace detail

template <NumericVector A, NumericVector B>
double dot(const A& a, const B& b) {
  if (std::ranges::size(a) != std::ranges::size(b)) {
    throw Error(ErrorCode::kDimensionMismatch, "vectors of size " + std::to_string(std::ranges::size(a)) +
                                                   " and " + std::to_string(std::ranges::size(b)));
  }
  return detail::dot(std::ranges::data(a), std::ranges::data(b), std::ranges::size(a));
}

template <NumericVector A, NumericVector B>
double cosine_similarity(const A& a, const B& b) {
  double ab = dot(a, b);
  double aa = dot(a, a);
  double bb = dot(b, b);
  if (aa == 0.0 || bb == 0.0) throw Error(ErrorCode::kZeroVector, "cosine similarity of a zero vector");
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

template <NumericVector A, NumericVector B>
double euclidean_distance(const A& a, const B& b) {
  if (std::ranges::size(a) != std::ranges::size(b)) {
    throw Error(ErrorCode::kDimensionMismatch, "vectors of size " + std::to_string(std::ranges::size(a)) +
                                                   " and " + std::to_string(std::ranges::size(b)));
  }
  return std::sqrt(detail::squared_distance(std::ranges::data(a), std::ranges::data(b), std::ranges::size(a)));
}

/// Row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// Counter-based standard normal generator keyed by (master_seed, table).
///
/// Uniform word n of a table is mix64(key + (n + 1) * golden) with
/// key = mix64(master_seed ^ mix64(table + golden)), i.e. splitmix64 run from
/// the key. Normals come in Box-Muller pairs: entry 2p uses the cosine branch
/// and entry 2p+1 the sine branch of uniforms 2p and 2p+1 (first uniform in
/// (0,1] feeds the radius). Any entry is computable without the others.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t master_seed, std::uint64_t table)
      : key_(detail::mix64(master_seed ^ detail::mix64(table + detail::kGolden))) {}

  std::uint64_t uniform_word(std::uint64_t n) const noexcept {
    return detail::mix64(key_ + (n + 1) * detail::kGolden);
  }

  double normal(std::uint64_t n) const noexcept {
    std::uint64_t pair = n / 2;
    double u1 = detail::to_unit_open_closed(uniform_word(2 * pair));
    double u2 = detail::to_unit_open_closed(uniform_word(2 * pair + 1));
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    return (n % 2 == 0) ? radius * std::cos(angle) : radius * std::sin(angle);
  }

 private:
  std::uint64_t key_;
};

/// rows x cols matrix whose entry (r, c) is normal number r*cols + c of the
/// (master_seed, table_index) stream.
inline Matrix gaussian_matrix(std::uint64_t master_seed, std::uint64_t table_index, std::size_t rows,
                              std::size_t cols) {
  if (rows == 0 || cols == 0) throw Error(ErrorCode::kInvalidArgument, "projection shape must be positive");
  GaussianStream stream(master_seed, table_index);
  Matrix m{rows, cols, std::vector<double>(rows * cols)};
  for (std::size_t n = 0; n < m.data.size(); n += 2) {
    // one Box-Muller evaluation serves both entries of the pair
    double u1 = detail::to_unit_open_closed(stream.uniform_word(n));
    double u2 = detail::to_unit_open_closed(stream.uniform_word(n + 1));
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    m.data[n] = radius * std::cos(angle);
    if (n + 1 < m.data.size()) m.data[n + 1] = radius * std::sin(angle);
  }
  return m;
}

/// M keyed d x K Gaussian matrices. Each table is also kept column-major so
/// projecting a vector is K contiguous dot products.
class ProjectionSet {
 public:
  ProjectionSet() = default;

  ProjectionSet(std::uint64_t master_seed, std::size_t tables, std::size_t input_dim, std::size_t output_dim)
      : master_seed_(master_seed), input_dim_(input_dim), output_dim_(output_dim) {
    if (tables == 0) throw Error(ErrorCode::kInvalidArgument, "table count must be at least 1");
    columns_.reserve(tables);
    for (std::size_t t = 0; t < tables; ++t) {
      Matrix m = gaussian_matrix(master_seed, t, input_dim, output_dim);
      std::vector<double> cols(input_dim * output_dim);
      for (std::size_t r = 0; r < input_dim; ++r) {
        for (std::size_t c = 0; c < output_dim; ++c) cols[c * input_dim + r] = m(r, c);
      }
      columns_.push_back(std::move(cols));
    }
  }

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::size_t tables() const noexcept { return columns_.size(); }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept { return output_dim_; }

  /// Column c of table t as a length-d vector.
  std::span<const double> column(std::size_t t, std::size_t c) const {
    return {columns_[t].data() + c * input_dim_, input_dim_};
  }

  /// Writes the K projected values of x under table t into out.
  template <class T>
  void project(std::size_t t, const T* x, std::span<double> out) const noexcept {
    const double* base = columns_[t].data();
    for (std::size_t c = 0; c < output_dim_; ++c) out[c] = detail::dot(x, base + c * input_dim_, input_dim_);
  }

 private:
  std::uint64_t master_seed_ = 0;
  std::size_t input_dim_ = 0;
  std::size_t output_dim_ = 0;
  std::vector<std::vector<double>> columns_;
};

}  // namespace coderec
