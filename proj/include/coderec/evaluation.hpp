#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "coderec/error.hpp"
#include "coderec/vector_store.hpp"

namespace coderec {

enum class QueryKind { kNaturalLanguage, kApiName };

inline std::string_view to_string(QueryKind kind) {
  return kind == QueryKind::kNaturalLanguage ? "natural_language" : "api_name";
}

struct QueryRecord {
  std::string query_id;
  std::string text;
  QueryKind kind = QueryKind::kNaturalLanguage;
};

struct Judgment {
  std::string query_id;
  ExampleId example_id = 0;
  std::size_t rank = 0;  // 1-based position in the recommendation list
  int score = 0;         // 0..4
};

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, '\t')) cols.push_back(cur);
  if (!line.empty() && line.back() == '\t') cols.emplace_back();
  return cols;
}

inline bool skip_line(const std::string& line, std::string_view header_first_column) {
  if (line.empty() || line[0] == '#') return true;
  return line.rfind(std::string(header_first_column) + "\t", 0) == 0;
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace detail

/// Tab-separated query_id, kind, text. A header row starting with
/// "query_id" and lines starting with '#' are skipped.
inline std::vector<QueryRecord> read_queries(std::istream& in) {
  std::vector<QueryRecord> queries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (detail::skip_line(line, "query_id")) continue;
    auto cols = detail::split_tabs(line);
    if (cols.size() < 3) throw Error(ErrorCode::kParseError, "queries line " + std::to_string(line_no) + ": expected 3 columns");
    QueryRecord q;
    q.query_id = cols[0];
    if (cols[1] == "natural_language") {
      q.kind = QueryKind::kNaturalLanguage;
    } else if (cols[1] == "api_name") {
      q.kind = QueryKind::kApiName;
    } else {
      throw Error(ErrorCode::kParseError, "queries line " + std::to_string(line_no) + ": unknown kind '" + cols[1] + "'");
    }
    q.text = cols[2];
    queries.push_back(std::move(q));
  }
  return queries;
}

/// Tab-separated query_id, example_id, rank, score.
inline std::vector<Judgment> read_judgments(std::istream& in) {
  std::vector<Judgment> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (detail::skip_line(line, "query_id")) continue;
    auto cols = detail::split_tabs(line);
    auto where = "judgments line " + std::to_string(line_no);
    if (cols.size() < 4) throw Error(ErrorCode::kParseError, where + ": expected 4 columns");
    Judgment j;
    try {
      j.query_id = cols[0];
      j.example_id = std::stoull(cols[1]);
      j.rank = std::stoull(cols[2]);
      j.score = std::stoi(cols[3]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParseError, where + ": non-numeric field");
    }
    if (j.rank == 0) throw Error(ErrorCode::kParseError, where + ": rank must be positive");
    if (j.score < 0 || j.score > 4) throw Error(ErrorCode::kParseError, where + ": score outside 0..4");
    out.push_back(std::move(j));
  }
  return out;
}

struct RankedList {
  std::string query_id;
  std::vector<ExampleId> examples;  // best first
};

/// Ranked recommendation lists joined with relevance judgments.
///
/// Unjudged items score 0. In strict mode every judgment must sit at its
/// recorded rank in its query's list; otherwise judgments are matched by
/// (query_id, example_id) alone and the recorded rank is ignored.
class EvalRun {
 public:
  EvalRun(std::vector<RankedList> lists, const std::vector<Judgment>& judgments, int relevance_threshold = 3,
          bool strict = true)
      : lists_(std::move(lists)), threshold_(relevance_threshold) {
    std::map<std::string, std::size_t> by_query;
    for (std::size_t i = 0; i < lists_.size(); ++i) by_query.emplace(lists_[i].query_id, i);
    for (const auto& j : judgments) {
      auto key = std::make_pair(j.query_id, j.example_id);
      if (scores_.contains(key)) {
        throw Error(ErrorCode::kInvalidArgument, "duplicate judgment for " + j.query_id + "/" + std::to_string(j.example_id));
      }
      if (strict) {
        auto it = by_query.find(j.query_id);
        if (it == by_query.end()) throw Error(ErrorCode::kInvalidArgument, "judgment for unknown query " + j.query_id);
        const auto& ex = lists_[it->second].examples;
        if (j.rank > ex.size() || ex[j.rank - 1] != j.example_id) {
          throw Error(ErrorCode::kInvalidArgument, "judgment " + j.query_id + "/" + std::to_string(j.example_id) +
                                                       " is not at rank " + std::to_string(j.rank));
        }
      }
      scores_.emplace(std::move(key), j.score);
    }
  }

  std::size_t size() const noexcept { return lists_.size(); }
  bool empty() const noexcept { return lists_.empty(); }
  const RankedList& list(std::size_t q) const { return lists_.at(q); }
  int relevance_threshold() const noexcept { return threshold_; }

  /// Score of the item at 1-based rank in query q's list; 0 if unjudged.
  int score_at(std::size_t q, std::size_t rank) const {
    const auto& l = lists_.at(q);
    auto it = scores_.find({l.query_id, l.examples.at(rank - 1)});
    return it == scores_.end() ? 0 : it->second;
  }

  bool relevant_at(std::size_t q, std::size_t rank) const { return score_at(q, rank) >= threshold_; }

  std::optional<std::size_t> first_relevant_rank(std::size_t q) const {
    for (std::size_t r = 1; r <= lists_.at(q).examples.size(); ++r) {
      if (relevant_at(q, r)) return r;
    }
    return std::nullopt;
  }

 private:
  std::vector<RankedList> lists_;
  std::map<std::pair<std::string, ExampleId>, int> scores_;
  int threshold_;
};

namespace detail {
inline void require_nonempty(const EvalRun& run) {
  if (run.empty()) throw Error(ErrorCode::kEmptyRun, "evaluation run has no queries");
}
}  // namespace detail

/// Fraction of queries with a relevant item among their first k results.
inline double hitrate_at_k(const EvalRun& run, std::size_t k) {
  detail::require_nonempty(run);
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  std::size_t hits = 0;
  for (std::size_t q = 0; q < run.size(); ++q) {
    auto first = run.first_relevant_rank(q);
    if (first && *first <= k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(run.size());
}

/// Mean of 1/(first relevant rank); a query with no relevant item adds 0.
inline double mrr(const EvalRun& run) {
  detail::require_nonempty(run);
  double sum = 0.0;
  for (std::size_t q = 0; q < run.size(); ++q) {
    if (auto first = run.first_relevant_rank(q)) sum += 1.0 / static_cast<double>(*first);
  }
  return sum / static_cast<double>(run.size());
}

inline constexpr std::size_t kTopFive = 5;
inline constexpr int kUsefulScore = 3;  // "3 or 4" in the success and precision definitions

/// Fraction of queries with an item scored 3 or 4 in their top 5.
inline double success_rate(const EvalRun& run) {
  detail::require_nonempty(run);
  std::size_t ok = 0;
  for (std::size_t q = 0; q < run.size(); ++q) {
    std::size_t depth = std::min(kTopFive, run.list(q).examples.size());
    for (std::size_t r = 1; r <= depth; ++r) {
      if (run.score_at(q, r) >= kUsefulScore) {
        ++ok;
        break;
      }
    }
  }
  return static_cast<double>(ok) / static_cast<double>(run.size());
}

/// Top-5 (query, item) pairs scored 3 or 4 over all top-5 pairs.
inline double precision_at5(const EvalRun& run) {
  detail::require_nonempty(run);
  std::size_t good = 0, total = 0;
  for (std::size_t q = 0; q < run.size(); ++q) {
    std::size_t depth = std::min(kTopFive, run.list(q).examples.size());
    for (std::size_t r = 1; r <= depth; ++r) {
      ++total;
      if (run.score_at(q, r) >= kUsefulScore) ++good;
    }
  }
  if (total == 0) return 0.0;
  return static_cast<double>(good) / static_cast<double>(total);
}

/// Mean score of query q's top-5 items, unjudged items counting 0.
inline double query_relevance(const EvalRun& run, std::size_t q) {
  std::size_t depth = std::min(kTopFive, run.list(q).examples.size());
  if (depth == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t r = 1; r <= depth; ++r) sum += run.score_at(q, r);
  return sum / static_cast<double>(depth);
}

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // population
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
};

namespace detail {
inline double median_sorted(const double* v, std::size_t n) {
  if (n % 2 == 1) return v[n / 2];
  return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}
}  // namespace detail

/// Quartiles use the median-of-halves rule: q1 and q3 are the medians of the
/// lower and upper halves, leaving out the middle value when n is odd.
inline Summary relevance_summary(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "relevance summary of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  Summary s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(n));
  s.q2 = detail::median_sorted(values.data(), n);
  if (n == 1) {
    s.q1 = s.q3 = values[0];
  } else {
    std::size_t half = n / 2;
    s.q1 = detail::median_sorted(values.data(), half);
    s.q3 = detail::median_sorted(values.data() + (n - half), half);
  }
  return s;
}

struct WilcoxonResult {
  double u = 0.0;    // min(U_a, U_b)
  double u_a = 0.0;  // R_a - n_a(n_a+1)/2
  double z = 0.0;
  double p_two_sided = 1.0;
};

/// Wilcoxon rank-sum / Mann-Whitney U with midranks for ties, tie-corrected
/// variance and the normal approximation without continuity correction.
inline WilcoxonResult wilcoxon_rank_sum(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kEmptyInput, "both samples must be nonempty");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;

  std::vector<std::pair<double, bool>> pooled;  // value, from a
  pooled.reserve(a.size() + b.size());
  for (double x : a) pooled.emplace_back(x, true);
  for (double x : b) pooled.emplace_back(x, false);
  std::sort(pooled.begin(), pooled.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  double rank_sum_a = 0.0;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
  for (std::size_t i = 0; i < pooled.size();) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
    double t = static_cast<double>(j - i);
    double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].second) rank_sum_a += midrank;
    }
    tie_term += t * t * t - t;
    i = j;
  }

  WilcoxonResult r;
  r.u_a = rank_sum_a - na * (na + 1.0) / 2.0;
  r.u = std::min(r.u_a, na * nb - r.u_a);
  double variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (n < 2.0 || variance <= 0.0) {
    r.z = 0.0;
    r.p_two_sided = 1.0;
    return r;
  }
  r.z = (r.u - na * nb / 2.0) / std::sqrt(variance);
  r.p_two_sided = std::min(1.0, std::erfc(std::abs(r.z) / std::sqrt(2.0)));
  return r;
}

/// Largest u with P(U <= u) <= alpha/2 under the null hypothesis for untied
/// samples of sizes n_a and n_b, from the exact permutation distribution.
/// Returns nullopt when no such u exists (samples too small).
inline std::optional<std::size_t> critical_u(std::size_t na, std::size_t nb, double alpha = 0.05) {
  if (na == 0 || nb == 0) throw Error(ErrorCode::kEmptyInput, "sample sizes must be positive");
  const std::size_t max_u = na * nb;
  // counts[i][j][u]: arrangements of i a-values and j b-values with U = u,
  // folded over i with a rolling table. Ratios only, so long double suffices.
  std::vector<std::vector<long double>> prev(nb + 1), cur(nb + 1);
  for (std::size_t j = 0; j <= nb; ++j) prev[j].assign(1, 1.0L);  // i = 0: U = 0
  for (std::size_t i = 1; i <= na; ++i) {
    for (std::size_t j = 0; j <= nb; ++j) {
      cur[j].assign(i * j + 1, 0.0L);
      // largest value is an a (adds j to U) or a b
      for (std::size_t u = 0; u < prev[j].size(); ++u) cur[j][u + j] += prev[j][u];
      if (j > 0) {
        for (std::size_t u = 0; u < cur[j - 1].size(); ++u) cur[j][u] += cur[j - 1][u];
      }
    }
    std::swap(prev, cur);
  }
  const auto& dist = prev[nb];
  long double total = 0.0L;
  for (auto c : dist) total += c;
  std::optional<std::size_t> result;
  long double cumulative = 0.0L;
  for (std::size_t u = 0; u <= max_u; ++u) {
    cumulative += dist[u];
    if (cumulative / total <= static_cast<long double>(alpha) / 2.0L) {
      result = u;
    } else {
      break;
    }
  }
  return result;
}

}  // namespace coderec
