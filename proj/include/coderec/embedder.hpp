#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "coderec/detail/hash.hpp"
#include "coderec/error.hpp"

namespace coderec {

struct FallbackEmbedderConfig {
  std::size_t dimension = 768;
  std::uint64_t seed = 42;
  std::vector<std::size_t> ngram_sizes = {3, 4, 5};
};

/// Model-free hashed character n-gram encoder.
///
/// The text is lowercased (ASCII), every n-gram of each configured size is
/// hashed with the seed, the hash picks a coordinate (h mod dimension) and a
/// sign (top bit), and the accumulated vector is scaled to unit length. A text
/// shorter than every n-gram size contributes itself as a single gram.
inline std::vector<double> embed_text(std::string_view text, const FallbackEmbedderConfig& cfg = {}) {
  if (cfg.dimension == 0) throw Error(ErrorCode::kInvalidArgument, "embedding dimension must be positive");
  auto first = text.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) throw Error(ErrorCode::kEmptyText, "text is empty after trimming");

  std::string lower(text);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

  std::vector<double> v(cfg.dimension, 0.0);
  auto add = [&](std::string_view gram) {
    std::uint64_t h = detail::seeded_hash(gram, cfg.seed);
    v[h % cfg.dimension] += (h >> 63) ? -1.0 : 1.0;
  };
  bool any = false;
  for (std::size_t n : cfg.ngram_sizes) {
    if (n == 0 || n > lower.size()) continue;
    for (std::size_t i = 0; i + n <= lower.size(); ++i) add(std::string_view(lower).substr(i, n));
    any = true;
  }
  if (!any) add(lower);

  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    // every gram cancelled out; fall back to the whole-text gram
    add(lower);
    norm = 1.0;
  }
  for (auto& x : v) x /= norm;
  return v;
}

}  // namespace coderec
