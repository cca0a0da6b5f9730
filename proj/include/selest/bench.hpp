#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selest/dataset.hpp"
#include "selest/maxent.hpp"

namespace selest {

// Flat key=value benchmark configuration. Either `data` names a dataset file
// or the gen_* fields describe a synthetic one.
struct BenchConfig {
  std::string data;
  int gen_k = 20;
  int64_t gen_n = 5000;
  double gen_density = 0.1;
  int gen_blocks = 0;      // leading blocks of gen_block_size consecutive attributes
  int gen_block_size = 4;
  double gen_strength = 0.0;

  std::vector<int64_t> thresholds = {15, 30, 50, 60, 100, 200};
  std::vector<int> query_sizes = {4, 6, 8};
  int queries_per_size = 200;
  bool arbitrary = false;  // false: conjunctive queries only

  std::vector<std::string> models = {"independence", "chowliu", "maxent"};
  std::vector<EngineKind> engines = {EngineKind::kBucketElimination};
  double epsilon = 1e-4;
  int max_sweeps = 200;
  bool smooth = false;  // Laplace smoothing for the tree model

  uint64_t seed = 1;
  std::string out = "bench";  // report file prefix
};

BenchConfig parse_bench_config(const std::string& path);

struct QueryRecord {
  int query_id = 0;
  int n_q = 0;
  std::string model;   // independence | chowliu | maxent
  std::string engine;  // none for the baselines
  int64_t T = 0;       // 0 for the baselines
  int sweeps = 0;
  bool converged = true;
  uint64_t terms = 0;
  int induced_width = 0;
  int clique_count = 0;
  double estimate_count = 0.0;
  double exact = 0.0;
  double rel_error = 0.0;
  bool excluded = false;  // exact count is zero; skipped by the error average
};

struct CellSummary {
  std::string model;
  std::string engine;
  int64_t T = 0;
  int n_q = 0;
  double mean_rel_error = 0.0;
  double mean_online_us = 0.0;
  double offline_ms = 0.0;
  int64_t memory_params = 0;
  int n_queries = 0;
  int n_excluded = 0;
  int n_nonconverged = 0;
};

struct BenchResult {
  std::vector<QueryRecord> records;
  std::vector<double> online_us;  // aligned with records
  std::vector<CellSummary> cells;
};

// Mean of |estimate - exact| / exact over queries with a nonzero exact
// count. Throws std::invalid_argument if every exact count is zero.
double empirical_relative_error(const std::vector<double>& estimates,
                                const std::vector<double>& exacts);

BenchResult run_benchmark(const BenchConfig& config);

// Writes <prefix>_summary.csv and <prefix>_queries.csv.
void emit_report(const BenchResult& result, const std::string& out_prefix);

}  // namespace selest
