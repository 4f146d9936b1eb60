#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "coderec/rh_index.hpp"
#include "coderec/synthetic.hpp"

using namespace coderec;

namespace {

std::shared_ptr<const VectorStore> shared(VectorStore s) { return std::make_shared<const VectorStore>(std::move(s)); }

std::vector<double> random_vector(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0, 1);
  std::vector<double> v(d);
  for (auto& x : v) x = n(rng);
  return v;
}

// Bucket of x in table t, recomputed from the raw Gaussian matrix.
std::uint32_t oracle_bucket(const Matrix& r, std::span<const double> x) {
  std::uint32_t id = 0;
  for (std::size_t c = 0; c < r.cols; ++c) {
    double s = 0;
    for (std::size_t k = 0; k < r.rows; ++k) s += x[k] * r(k, c);
    if (s >= 0) id += 1u << c;
  }
  return id;
}

std::vector<Neighbor> brute_force_cosine(const VectorStore& s, const std::vector<double>& q,
                                         const std::vector<std::uint32_t>& rows, std::size_t top_n) {
  std::vector<Neighbor> all;
  double qn = 0;
  for (double x : q) qn += x * x;
  for (auto r : rows) {
    auto row = s.row(r);
    double dotp = 0, rn = 0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      dotp += q[k] * row[k];
      rn += static_cast<double>(row[k]) * row[k];
    }
    all.push_back({s.id(r), dotp / (std::sqrt(qn) * std::sqrt(rn))});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.score != b.score ? a.score > b.score : a.example_id < b.example_id;
  });
  if (all.size() > top_n) all.resize(top_n);
  return all;
}

}  // namespace

TEST(SignBits, Examples) {
  std::vector<double> p{0.3, -0.2, 0.0};
  EXPECT_EQ(sign_bits(p), (std::vector<std::uint8_t>{1, 0, 1}));
  EXPECT_EQ(sign_bits(std::vector<double>(10, -1.0)), std::vector<std::uint8_t>(10, 0));
  EXPECT_EQ(sign_bits(std::vector<double>(10, 2.5)), std::vector<std::uint8_t>(10, 1));
  EXPECT_EQ(sign_bits(std::vector<double>{-0.0}), std::vector<std::uint8_t>{1});
}

TEST(BucketId, Examples) {
  EXPECT_EQ(bucket_id(std::vector<std::uint8_t>{1, 0, 1}), 5u);
  EXPECT_EQ(bucket_id(std::vector<std::uint8_t>(10, 0)), 0u);
  EXPECT_EQ(bucket_id(std::vector<std::uint8_t>{1, 1, 1}), 7u);
  EXPECT_EQ(bucket_id(std::vector<std::uint8_t>(10, 1)), 1023u);
  EXPECT_THROW(bucket_id(std::vector<std::uint8_t>{2}), Error);
}

TEST(RhParams, Validation) {
  EXPECT_THROW((RhParams{0, 10, 1}.validate()), Error);
  EXPECT_THROW((RhParams{10, 0, 1}.validate()), Error);
  EXPECT_THROW((RhParams{10, 31, 1}.validate()), Error);
  EXPECT_NO_THROW((RhParams{1, 30, 1}.validate()));
}

TEST(RhIndex, EmptyStoreRejected) {
  try {
    RhIndex::build(shared(VectorStore(4, {}, {})), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyStore);
  }
}

TEST(RhIndex, IdenticalRowsShareBuckets) {
  std::vector<float> row{0.3f, -1.0f, 2.0f, 0.5f};
  std::vector<float> m;
  for (int i = 0; i < 3; ++i) m.insert(m.end(), row.begin(), row.end());
  auto idx = RhIndex::build(shared(VectorStore(4, m, {1, 2, 3})), {10, 10, 42});
  for (std::size_t t = 0; t < 10; ++t) {
    ASSERT_EQ(idx.table(t).size(), 1u);
    EXPECT_EQ(idx.table(t).begin()->second, (std::vector<std::uint32_t>{0, 1, 2}));
  }
}

TEST(RhIndex, TablesPartitionRows) {
  auto store = shared(synthetic::gaussian_store(400, 24, 1));
  auto idx = RhIndex::build(store, {6, 5, 9});
  for (std::size_t t = 0; t < 6; ++t) {
    std::vector<std::uint32_t> seen;
    for (const auto& [bucket, rows] : idx.table(t)) {
      EXPECT_LT(bucket, 32u);
      EXPECT_TRUE(std::is_sorted(rows.begin(), rows.end()));
      seen.insert(seen.end(), rows.begin(), rows.end());
    }
    std::sort(seen.begin(), seen.end());
    ASSERT_EQ(seen.size(), 400u);
    for (std::uint32_t i = 0; i < 400; ++i) EXPECT_EQ(seen[i], i);
  }
}

TEST(RhIndex, BucketsMatchIndependentProjection) {
  auto store = shared(synthetic::gaussian_store(120, 16, 4));
  auto idx = RhIndex::build(store, {4, 6, 77});
  for (std::size_t t = 0; t < 4; ++t) {
    auto r = gaussian_matrix(77, t, 16, 6);
    for (const auto& [bucket, rows] : idx.table(t)) {
      for (auto row : rows) {
        auto f = store->row(row);
        std::vector<double> x(f.begin(), f.end());
        EXPECT_EQ(oracle_bucket(r, x), bucket);
      }
    }
  }
}

TEST(RhIndex, DeterministicBuild) {
  auto store = shared(synthetic::gaussian_store(300, 32, 2));
  auto a = RhIndex::build(store, {10, 10, 5});
  auto b = RhIndex::build(store, {10, 10, 5});
  for (std::size_t t = 0; t < 10; ++t) EXPECT_EQ(a.table(t), b.table(t));
  std::mt19937_64 rng(1);
  auto q = random_vector(32, rng);
  EXPECT_EQ(a.query(q, 10).ranked, b.query(q, 10).ranked);
}

TEST(RhIndex, StoredRowRanksFirst) {
  auto store = shared(synthetic::gaussian_store(500, 64, 3));
  auto idx = RhIndex::build(store, {});
  for (std::size_t r : {0u, 17u, 499u}) {
    auto row = store->row(r);
    std::vector<double> q(row.begin(), row.end());
    for (std::size_t t = 0; t < 10; ++t) {
      const auto& bucket = idx.table(t).at(idx.query_bucket(t, q));
      EXPECT_TRUE(std::binary_search(bucket.begin(), bucket.end(), r));
    }
    auto res = idx.query(q, 10);
    ASSERT_FALSE(res.ranked.empty());
    EXPECT_EQ(res.ranked[0].example_id, store->id(r));
    EXPECT_NEAR(res.ranked[0].score, 1.0, 1e-12);
  }
}

TEST(RhIndex, RankingMatchesOracleOnRecomputedCandidates) {
  auto store = shared(synthetic::gaussian_store(300, 48, 8));
  RhParams p{10, 10, 31};
  auto idx = RhIndex::build(store, p);
  std::vector<Matrix> rs;
  for (std::size_t t = 0; t < p.tables; ++t) rs.push_back(gaussian_matrix(p.seed, t, 48, p.bits));
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    auto q = random_vector(48, rng);
    std::set<std::uint32_t> expected_rows;
    for (std::size_t t = 0; t < p.tables; ++t) {
      auto qb = oracle_bucket(rs[t], q);
      for (std::uint32_t r = 0; r < store->count(); ++r) {
        auto f = store->row(r);
        std::vector<double> x(f.begin(), f.end());
        if (oracle_bucket(rs[t], x) == qb) expected_rows.insert(r);
      }
    }
    auto cands = idx.candidates(q);
    EXPECT_EQ(std::vector<std::uint32_t>(expected_rows.begin(), expected_rows.end()), cands);
    auto res = idx.query(q, 10);
    auto oracle = brute_force_cosine(*store, q, cands, 10);
    ASSERT_EQ(res.ranked.size(), oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      EXPECT_EQ(res.ranked[i].example_id, oracle[i].example_id);
      EXPECT_NEAR(res.ranked[i].score, oracle[i].score, 1e-9);
    }
    EXPECT_EQ(res.candidate_count, cands.size());
  }
}

TEST(RhIndex, ExhaustedWhenFewCandidates) {
  // three clusters far apart on different axes, K large enough to split them
  std::vector<float> m = {1, 0, 0, 0, 0.99f, 0.01f, 0, 0, 0.98f, 0, 0.02f, 0};
  auto idx = RhIndex::build(shared(VectorStore(4, m, {10, 11, 12})), {1, 1, 3});
  auto res = idx.query(std::vector<double>{1, 0, 0, 0}, 10);
  EXPECT_LE(res.ranked.size(), 3u);
  EXPECT_TRUE(res.exhausted);
  EXPECT_EQ(res.candidate_count, res.ranked.size());
}

TEST(RhIndex, ScoresNonIncreasingWithIdTieBreak) {
  std::vector<float> m = {1, 0, 1, 0, 1, 0, 0, 1};
  auto idx = RhIndex::build(shared(VectorStore(2, m, {30, 10, 20, 40})), {1, 1, 0});
  auto res = idx.query(std::vector<double>{1, 0}, 10);
  ASSERT_GE(res.ranked.size(), 3u);
  EXPECT_EQ(res.ranked[0].example_id, 10u);
  EXPECT_EQ(res.ranked[1].example_id, 20u);
  EXPECT_EQ(res.ranked[2].example_id, 30u);
  for (std::size_t i = 1; i < res.ranked.size(); ++i) EXPECT_LE(res.ranked[i].score, res.ranked[i - 1].score);
}

TEST(RhIndex, QueryErrors) {
  auto idx = RhIndex::build(shared(synthetic::gaussian_store(10, 8, 1)), {});
  try {
    idx.query(std::vector<double>(7, 1.0), 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  try {
    idx.query(std::vector<double>(8, 0.0), 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroQuery);
  }
  EXPECT_THROW(idx.query(std::vector<double>(8, 1.0), 0), Error);
}

TEST(RhIndex, PlantedNeighborRecall) {
  auto store = shared(synthetic::gaussian_store(2000, 128, 12));
  auto idx = RhIndex::build(store, {});
  std::mt19937_64 rng(5);
  int found = 0;
  for (int i = 0; i < 100; ++i) {
    std::size_t r = rng() % store->count();
    auto q = synthetic::perturb(store->row(r), 0.01, rng);
    auto res = idx.query(q, 10);
    for (const auto& n : res.ranked) found += n.example_id == store->id(r);
  }
  EXPECT_GE(found, 80);
}
