#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "coderec/vector_store.hpp"

namespace coderec::synthetic {

/// N x d store of i.i.d. standard normal components, ids 1..N.
inline VectorStore gaussian_store(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::vector<float> m(n * d);
  for (auto& x : m) x = normal(rng);
  std::vector<ExampleId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i + 1;
  return VectorStore(d, std::move(m), std::move(ids));
}

/// Unit vectors shaped like sentence-encoder output: every row shares one
/// random mean direction (weight `common`) plus isotropic noise of unit
/// expected norm, then is normalized. common = 1 gives a mean pairwise cosine
/// near 0.5; common = 0 is an isotropic cloud on the sphere.
inline VectorStore embedding_like_store(std::size_t n, std::size_t d, std::uint64_t seed, double common = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> mean(d);
  double mean_norm = 0.0;
  for (auto& x : mean) {
    x = normal(rng);
    mean_norm += x * x;
  }
  mean_norm = std::sqrt(mean_norm);
  for (auto& x : mean) x *= common / mean_norm;

  const double noise_scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<float> m(n * d);
  std::vector<double> v(d);
  std::vector<ExampleId> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      v[k] = mean[k] + normal(rng) * noise_scale;
      norm += v[k] * v[k];
    }
    norm = std::sqrt(norm);
    for (std::size_t k = 0; k < d; ++k) m[i * d + k] = static_cast<float>(v[k] / norm);
    ids[i] = i + 1;
  }
  return VectorStore(d, std::move(m), std::move(ids));
}

/// Copy of v plus Gaussian noise whose expected norm is relative * |v|.
template <class T>
std::vector<double> perturb(std::span<const T> v, double relative, std::mt19937_64& rng) {
  double norm = 0.0;
  for (auto x : v) norm += static_cast<double>(x) * x;
  norm = std::sqrt(norm);
  double sigma = relative * norm / std::sqrt(static_cast<double>(v.size()));
  std::normal_distribution<double> normal(0.0, sigma);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]) + normal(rng);
  return out;
}

}  // namespace coderec::synthetic
