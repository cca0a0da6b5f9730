#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selest/baselines.hpp"
#include "selest/bench.hpp"
#include "selest/dataset.hpp"
#include "selest/itemsets.hpp"
#include "selest/maxent.hpp"
#include "selest/query.hpp"

namespace {

using namespace selest;

int cmd_gen_data(int k, int64_t n, double density, int blocks, int block_size, double strength,
                 uint64_t seed, const std::string& out) {
  std::vector<std::vector<int>> groups;
  for (int b = 0; b < blocks; ++b) {
    std::vector<int> g;
    for (int i = 0; i < block_size; ++i) g.push_back(b * block_size + i);
    groups.push_back(std::move(g));
  }
  if (blocks * block_size > k) throw std::runtime_error("correlation blocks exceed k");
  save_dataset(generate_synthetic(k, n, density, groups, strength, seed), out);
  std::cout << "wrote " << out << " (k=" << k << ", n=" << n << ")\n";
  return 0;
}

int cmd_stats(const std::string& path) {
  const DatasetStats st = compute_stats(load_dataset(path));
  std::printf("k %d\n", st.k);
  std::printf("n %lld\n", static_cast<long long>(st.n));
  std::printf("total_ones %lld\n", static_cast<long long>(st.total_ones));
  std::printf("mean_ones_per_row %.6g\n", st.mean_ones_per_row);
  std::printf("std_ones_per_row %.6g\n", st.std_ones_per_row);
  std::printf("max_ones_per_row %d\n", st.max_ones_per_row);
  std::printf("marginals");
  for (double m : st.marginal) std::printf(" %.6g", m);
  std::printf("\n");
  return 0;
}

int cmd_mine(const std::string& data_path, int64_t threshold, bool force_singletons,
             const std::string& out) {
  const SparseDataset data = load_dataset(data_path);
  ItemsetCollection coll = mine_frequent(data, threshold);
  if (force_singletons) {
    std::vector<char> present(data.k, 0);
    for (const auto& item : coll.items)
      if (item.size() == 1) present[item.attrs[0]] = 1;
    std::vector<int64_t> counts(data.k, 0);
    for (const auto& row : data.rows)
      for (int32_t a : row) ++counts[a];
    for (int a = 0; a < data.k; ++a) {
      if (present[a]) continue;
      coll.items.push_back({{static_cast<int32_t>(a)}, counts[a],
                            static_cast<double>(counts[a]) / static_cast<double>(coll.n)});
    }
    std::sort(coll.items.begin(), coll.items.end(), [](const Itemset& a, const Itemset& b) {
      if (a.attrs.size() != b.attrs.size()) return a.attrs.size() < b.attrs.size();
      return a.attrs < b.attrs;
    });
  }
  save_itemsets(coll, out);
  std::cout << "wrote " << out << " (" << coll.items.size() << " itemsets, T=" << threshold
            << ")\n";
  return 0;
}

int cmd_build_model(const std::string& data_path, const std::string& kind, bool smooth,
                    const std::string& out) {
  const SparseDataset data = load_dataset(data_path);
  if (kind == "independence") {
    save_model(build_independence(data), out);
  } else if (kind == "chowliu") {
    save_model(build_chowliu(data, smooth), out);
  } else {
    throw std::runtime_error("unknown model kind '" + kind + "'");
  }
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_query(const std::string& text, const std::string& model_path,
              const std::string& itemsets_path, const std::string& engine_name_arg,
              double epsilon, int max_sweeps, const std::string& data_path) {
  const BooleanQuery q = parse_query(text);
  double prob = 0.0;
  int64_t n = 0;
  if (!itemsets_path.empty()) {
    const ItemsetCollection coll = load_itemsets(itemsets_path);
    const auto engine = engine_from_name(engine_name_arg);
    if (!engine) throw std::runtime_error("unknown engine '" + engine_name_arg + "'");
    const MaxentEstimate est = maxent_query_prob(coll, q, *engine, epsilon, max_sweeps);
    prob = est.prob;
    n = coll.n;
    std::printf("sweeps %d\nconverged %d\ninduced_width %d\ncliques %d\nterms %llu\n",
                est.diag.sweeps, est.diag.converged ? 1 : 0, est.diag.induced_width,
                est.diag.clique_count, static_cast<unsigned long long>(est.diag.terms));
  } else if (!model_path.empty()) {
    const BaselineModel model = load_model(model_path);
    if (const auto* m = std::get_if<IndependenceModel>(&model)) {
      prob = independence_prob(*m, q);
      n = m->n;
    } else {
      const auto& t = std::get<ChowLiuTree>(model);
      prob = chowliu_prob(t, q);
      n = t.n;
    }
  } else {
    throw std::runtime_error("pass either --itemsets or --model");
  }
  std::printf("probability %.6g\n", prob);
  std::printf("estimate %.6g\n", prob * static_cast<double>(n));
  if (!data_path.empty()) {
    const SparseDataset data = load_dataset(data_path);
    const int64_t exact = exact_count(data, q);
    std::printf("exact %lld\n", static_cast<long long>(exact));
    if (exact > 0)
      std::printf("relative_error %.6g\n",
                  std::abs(prob * static_cast<double>(data.n()) - static_cast<double>(exact)) /
                      static_cast<double>(exact));
  }
  return 0;
}

int cmd_gen_queries(const std::string& data_path, int size, int count, bool arbitrary,
                    uint64_t seed, const std::string& out) {
  const DatasetStats st = compute_stats(load_dataset(data_path));
  save_queries(generate_queries(st, size, count, arbitrary, seed), out);
  std::cout << "wrote " << out << " (" << count << " queries of size " << size << ")\n";
  return 0;
}

int cmd_bench(const std::string& config_path) {
  const BenchConfig cfg = parse_bench_config(config_path);
  const BenchResult result = run_benchmark(cfg);
  emit_report(result, cfg.out);
  std::cout << "wrote " << cfg.out << "_summary.csv and " << cfg.out << "_queries.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate Boolean count queries over sparse binary data"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  int k = 20, blocks = 0, block_size = 4;
  int64_t n = 5000;
  double density = 0.1, strength = 0.0;
  uint64_t seed = 1;
  std::string out = "data.txt";
  gen->add_option("--k", k, "Attribute count");
  gen->add_option("--n", n, "Row count");
  gen->add_option("--density", density, "Base marginal of every attribute");
  gen->add_option("--blocks", blocks, "Number of correlated blocks");
  gen->add_option("--block-size", block_size, "Attributes per block");
  gen->add_option("--strength", strength, "Block correlation strength in [0,1]");
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--out", out, "Output file")->required();

  auto* stats = app.add_subcommand("stats", "Summarize a dataset");
  std::string stats_data;
  stats->add_option("--data", stats_data, "Dataset file")->required();

  auto* mine = app.add_subcommand("mine", "Mine frequent itemsets");
  std::string mine_data, mine_out;
  int64_t threshold = 15;
  bool force_singletons = false;
  mine->add_option("--data", mine_data, "Dataset file")->required();
  mine->add_option("--threshold", threshold, "Minimum itemset count T");
  mine->add_flag("--force-singletons", force_singletons,
                 "Also keep every single attribute, frequent or not");
  mine->add_option("--out", mine_out, "Output file")->required();

  auto* build = app.add_subcommand("build-model", "Fit a baseline model");
  std::string build_data, build_kind = "independence", build_out;
  bool smooth = false;
  build->add_option("--data", build_data, "Dataset file")->required();
  build->add_option("--model", build_kind, "independence or chowliu");
  build->add_flag("--smooth", smooth, "Add-one smoothing for tree edge tables");
  build->add_option("--out", build_out, "Output file")->required();

  auto* query = app.add_subcommand("query", "Estimate one query");
  std::string query_text, query_model, query_itemsets, query_engine = "bucket", query_data;
  double epsilon = 1e-4;
  int max_sweeps = 200;
  query->add_option("expr", query_text, "Query, e.g. '3=1 & 5=0' or '(or (= 3 1) (= 5 0))'")
      ->required();
  query->add_option("--model", query_model, "Baseline model file");
  query->add_option("--itemsets", query_itemsets, "Itemset file (maximum entropy estimate)");
  query->add_option("--engine", query_engine, "brute, bucket, or clique");
  query->add_option("--epsilon", epsilon, "Convergence threshold");
  query->add_option("--max-sweeps", max_sweeps, "Scaling sweep limit");
  query->add_option("--data", query_data, "Dataset file for the exact count");

  auto* genq = app.add_subcommand("gen-queries", "Generate a random query workload");
  std::string genq_data, genq_out;
  int genq_size = 4, genq_count = 200;
  bool arbitrary = false;
  uint64_t genq_seed = 1;
  genq->add_option("--data", genq_data, "Dataset file")->required();
  genq->add_option("--size", genq_size, "Literals per query");
  genq->add_option("--count", genq_count, "Number of queries");
  genq->add_flag("--arbitrary", arbitrary, "Mix AND/OR connectives");
  genq->add_option("--seed", genq_seed, "Random seed");
  genq->add_option("--out", genq_out, "Output file")->required();

  auto* bench = app.add_subcommand("bench", "Run the full benchmark");
  std::string config_path;
  bench->add_option("--config", config_path, "key=value config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_gen_data(k, n, density, blocks, block_size, strength, seed, out);
    if (stats->parsed()) return cmd_stats(stats_data);
    if (mine->parsed()) return cmd_mine(mine_data, threshold, force_singletons, mine_out);
    if (build->parsed()) return cmd_build_model(build_data, build_kind, smooth, build_out);
    if (query->parsed())
      return cmd_query(query_text, query_model, query_itemsets, query_engine, epsilon,
                       max_sweeps, query_data);
    if (genq->parsed())
      return cmd_gen_queries(genq_data, genq_size, genq_count, arbitrary, genq_seed, genq_out);
    if (bench->parsed()) return cmd_bench(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
