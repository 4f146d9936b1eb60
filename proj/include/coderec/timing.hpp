#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <memory>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "coderec/error.hpp"
#include "coderec/index_files.hpp"

namespace coderec {

struct TimingRow {
  std::string algo;
  std::size_t tables = 0;
  double build_seconds = 0.0;
  double query_seconds = 0.0;  // mean per query
};

struct TimingReport {
  std::vector<TimingRow> rows;

  const TimingRow* find(std::string_view algo, std::size_t tables) const {
    for (const auto& r : rows) {
      if (r.algo == algo && r.tables == tables) return &r;
    }
    return nullptr;
  }
};

struct BuildMeasurement {
  AnyIndex index;
  double seconds;
};

inline BuildMeasurement measure_build(std::shared_ptr<const VectorStore> store,
                                      const std::variant<RhParams, QaParams>& params) {
  auto start = std::chrono::steady_clock::now();
  AnyIndex index = AnyIndex::build(std::move(store), params);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(index), seconds};
}

/// Mean wall time of one query over the list.
inline double measure_query(const AnyIndex& index, const std::vector<std::vector<double>>& queries,
                            std::size_t top_n) {
  if (queries.empty()) throw Error(ErrorCode::kEmptyInput, "no queries to time");
  auto start = std::chrono::steady_clock::now();
  for (const auto& q : queries) {
    auto result = index.query(q, top_n);
    static_cast<void>(result);
  }
  double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return total / static_cast<double>(queries.size());
}

/// Builds both indices once per table count and times the query list
/// against each. Runs sequentially on the calling thread. The QA collision
/// threshold is left at its default for every M unless qa_base sets one.
inline TimingReport timing_sweep(std::shared_ptr<const VectorStore> store, const std::vector<std::size_t>& table_counts,
                                 const std::vector<std::vector<double>>& queries, std::size_t top_n = 10,
                                 RhParams rh_base = {}, QaParams qa_base = {}) {
  TimingReport report;
  for (std::size_t m : table_counts) {
    rh_base.tables = m;
    auto rh = measure_build(store, rh_base);
    report.rows.push_back({"rh", m, rh.seconds, measure_query(rh.index, queries, top_n)});
  }
  for (std::size_t m : table_counts) {
    qa_base.tables = m;
    auto qa = measure_build(store, qa_base);
    report.rows.push_back({"qa", m, qa.seconds, measure_query(qa.index, queries, top_n)});
  }
  return report;
}

/// One line per M: M, rh build, rh query, qa build, qa query (seconds).
inline void write_timing_report(std::ostream& out, const TimingReport& report) {
  out << "M\trh_build_s\trh_query_s\tqa_build_s\tqa_query_s\n";
  std::vector<std::size_t> ms;
  for (const auto& r : report.rows) {
    if (std::find(ms.begin(), ms.end(), r.tables) == ms.end()) ms.push_back(r.tables);
  }
  auto cell = [&](std::string_view algo, std::size_t m, bool build) -> std::string {
    const auto* row = report.find(algo, m);
    if (!row) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", build ? row->build_seconds : row->query_seconds);
    return buf;
  };
  for (auto m : ms) {
    out << m << '\t' << cell("rh", m, true) << '\t' << cell("rh", m, false) << '\t' << cell("qa", m, true) << '\t'
        << cell("qa", m, false) << '\n';
  }
}

}  // namespace coderec
