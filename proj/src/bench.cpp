#include "selest/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "selest/baselines.hpp"
#include "selest/itemsets.hpp"
#include "selest/query.hpp"
#include "text_util.hpp"

namespace selest {

namespace {

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t comma = s.find(',', start);
    std::string_view part =
        detail::trim(comma == std::string_view::npos ? s.substr(start) : s.substr(start, comma - start));
    if (!part.empty()) out.emplace_back(part);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_flag(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

double now_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

BenchConfig parse_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  BenchConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto kv = detail::parse_key_value(line);
    if (!kv) continue;
    const auto& [key, value] = *kv;
    try {
      if (key == "data") cfg.data = value;
      else if (key == "gen_k") cfg.gen_k = static_cast<int>(detail::parse_int(value).value());
      else if (key == "gen_n") cfg.gen_n = detail::parse_int(value).value();
      else if (key == "gen_density") cfg.gen_density = detail::parse_double(value).value();
      else if (key == "gen_blocks") cfg.gen_blocks = static_cast<int>(detail::parse_int(value).value());
      else if (key == "gen_block_size")
        cfg.gen_block_size = static_cast<int>(detail::parse_int(value).value());
      else if (key == "gen_strength") cfg.gen_strength = detail::parse_double(value).value();
      else if (key == "thresholds") {
        cfg.thresholds.clear();
        for (const auto& t : split_list(value)) cfg.thresholds.push_back(detail::parse_int(t).value());
      } else if (key == "query_sizes") {
        cfg.query_sizes.clear();
        for (const auto& t : split_list(value))
          cfg.query_sizes.push_back(static_cast<int>(detail::parse_int(t).value()));
      } else if (key == "queries_per_size")
        cfg.queries_per_size = static_cast<int>(detail::parse_int(value).value());
      else if (key == "arbitrary") cfg.arbitrary = parse_flag(value);
      else if (key == "models") {
        cfg.models = split_list(value);
        for (const auto& mname : cfg.models)
          if (mname != "independence" && mname != "chowliu" && mname != "maxent")
            throw std::invalid_argument("unknown model '" + mname + "'");
      }
      else if (key == "engines") {
        cfg.engines.clear();
        for (const auto& e : split_list(value)) {
          auto kind = engine_from_name(e);
          if (!kind) throw std::invalid_argument("unknown engine '" + e + "'");
          cfg.engines.push_back(*kind);
        }
      } else if (key == "epsilon") cfg.epsilon = detail::parse_double(value).value();
      else if (key == "max_sweeps") cfg.max_sweeps = static_cast<int>(detail::parse_int(value).value());
      else if (key == "smooth") cfg.smooth = parse_flag(value);
      else if (key == "seed") cfg.seed = static_cast<uint64_t>(detail::parse_int(value).value());
      else if (key == "out") cfg.out = value;
      else throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const std::bad_optional_access&) {
      throw ParseError(path, line_no, "invalid value for '" + key + "'");
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
  if (cfg.thresholds.empty()) throw std::runtime_error("config lists no thresholds");
  for (int64_t t : cfg.thresholds)
    if (t < 1) throw std::runtime_error("thresholds must be at least 1");
  if (cfg.query_sizes.empty()) throw std::runtime_error("config lists no query sizes");
  for (int s : cfg.query_sizes)
    if (s < 1 || s > kMaxQueryVars) throw std::runtime_error("query size out of range");
  if (cfg.queries_per_size < 1) throw std::runtime_error("queries_per_size must be at least 1");
  if (cfg.models.empty()) throw std::runtime_error("config lists no models");
  for (const auto& mname : cfg.models)
    if (mname != "independence" && mname != "chowliu" && mname != "maxent")
      throw std::runtime_error("unknown model '" + mname + "'");
  if (cfg.engines.empty()) throw std::runtime_error("config lists no engines");
  return cfg;
}

double empirical_relative_error(const std::vector<double>& estimates,
                                const std::vector<double>& exacts) {
  if (estimates.size() != exacts.size())
    throw std::invalid_argument("estimate and exact vectors differ in length");
  if (estimates.empty()) throw std::invalid_argument("no queries to average over");
  double total = 0.0;
  for (size_t i = 0; i < estimates.size(); ++i) {
    if (!(exacts[i] > 0.0))
      throw std::invalid_argument("zero exact count reached the error average");
    total += std::abs(estimates[i] - exacts[i]) / exacts[i];
  }
  return total / static_cast<double>(estimates.size());
}

BenchResult run_benchmark(const BenchConfig& config) {
  SparseDataset data;
  if (!config.data.empty()) {
    data = load_dataset(config.data);
  } else {
    std::vector<std::vector<int>> blocks;
    for (int b = 0; b < config.gen_blocks; ++b) {
      std::vector<int> block;
      for (int i = 0; i < config.gen_block_size; ++i) block.push_back(b * config.gen_block_size + i);
      blocks.push_back(std::move(block));
    }
    if (config.gen_blocks * config.gen_block_size > config.gen_k)
      throw std::runtime_error("correlation blocks exceed the attribute count");
    data = generate_synthetic(config.gen_k, config.gen_n, config.gen_density, blocks,
                              config.gen_strength, config.seed);
  }
  const DatasetStats stats = compute_stats(data);
  const double n_real = static_cast<double>(stats.n);

  struct SizeGroup {
    int n_q;
    std::vector<BooleanQuery> queries;
    std::vector<int64_t> exacts;
  };
  std::vector<SizeGroup> groups;
  for (int n_q : config.query_sizes) {
    SizeGroup g;
    g.n_q = n_q;
    g.queries = generate_queries(stats, n_q, config.queries_per_size, config.arbitrary,
                                 config.seed + 1000 * static_cast<uint64_t>(n_q));
    for (const auto& q : g.queries) g.exacts.push_back(exact_count(data, q));
    groups.push_back(std::move(g));
  }

  BenchResult result;

  auto run_cell = [&](const std::string& model, const std::string& engine, int64_t T,
                      const SizeGroup& g, double offline_ms, int64_t memory,
                      auto&& estimate_one) {
    CellSummary cell;
    cell.model = model;
    cell.engine = engine;
    cell.T = T;
    cell.n_q = g.n_q;
    cell.offline_ms = offline_ms;
    cell.memory_params = memory;
    double err_sum = 0.0;
    double us_sum = 0.0;
    for (size_t i = 0; i < g.queries.size(); ++i) {
      QueryRecord rec;
      rec.query_id = static_cast<int>(i);
      rec.n_q = g.n_q;
      rec.model = model;
      rec.engine = engine;
      rec.T = T;
      const auto t0 = std::chrono::steady_clock::now();
      estimate_one(g.queries[i], rec);
      const double us =
          std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0)
              .count();
      rec.exact = static_cast<double>(g.exacts[i]);
      rec.excluded = g.exacts[i] == 0;
      if (rec.excluded) {
        rec.rel_error = std::numeric_limits<double>::quiet_NaN();
        ++cell.n_excluded;
      } else {
        rec.rel_error = std::abs(rec.estimate_count - rec.exact) / rec.exact;
        err_sum += rec.rel_error;
      }
      if (!rec.converged) ++cell.n_nonconverged;
      us_sum += us;
      ++cell.n_queries;
      result.records.push_back(std::move(rec));
      result.online_us.push_back(us);
    }
    const int included = cell.n_queries - cell.n_excluded;
    cell.mean_rel_error =
        included > 0 ? err_sum / included : std::numeric_limits<double>::quiet_NaN();
    cell.mean_online_us = cell.n_queries > 0 ? us_sum / cell.n_queries : 0.0;
    result.cells.push_back(std::move(cell));
  };

  for (const std::string& model : config.models) {
    if (model == "independence") {
      const auto t0 = std::chrono::steady_clock::now();
      const IndependenceModel m = build_independence(data);
      const double offline = now_ms(t0);
      for (const auto& g : groups)
        run_cell(model, "none", 0, g, offline, model_memory_cost(m),
                 [&](const BooleanQuery& q, QueryRecord& rec) {
                   rec.estimate_count = n_real * independence_prob(m, q);
                   rec.converged = true;
                 });
    } else if (model == "chowliu") {
      const auto t0 = std::chrono::steady_clock::now();
      const ChowLiuTree t = build_chowliu(data, config.smooth);
      const double offline = now_ms(t0);
      for (const auto& g : groups)
        run_cell(model, "none", 0, g, offline, model_memory_cost(t),
                 [&](const BooleanQuery& q, QueryRecord& rec) {
                   rec.estimate_count = n_real * chowliu_prob(t, q);
                   rec.converged = true;
                 });
    } else {
      for (int64_t T : config.thresholds) {
        const auto t0 = std::chrono::steady_clock::now();
        const ItemsetCollection coll = mine_frequent(data, T);
        const double offline = now_ms(t0);
        for (EngineKind engine : config.engines) {
          for (const auto& g : groups)
            run_cell(model, engine_name(engine), T, g, offline, itemset_memory_cost(coll),
                     [&](const BooleanQuery& q, QueryRecord& rec) {
                       const MaxentEstimate est = maxent_query_prob(
                           coll, q, engine, config.epsilon, config.max_sweeps);
                       rec.estimate_count = n_real * est.prob;
                       rec.sweeps = est.diag.sweeps;
                       rec.converged = est.diag.converged;
                       rec.terms = est.diag.terms;
                       rec.induced_width = est.diag.induced_width;
                       rec.clique_count = est.diag.clique_count;
                     });
        }
      }
    }
  }
  return result;
}

void emit_report(const BenchResult& result, const std::string& out_prefix) {
  {
    std::ofstream out(out_prefix + "_summary.csv");
    if (!out) throw std::runtime_error("cannot write " + out_prefix + "_summary.csv");
    out << "model,engine,T,n_q,mean_rel_error,mean_online_us,offline_ms,memory_params,"
           "n_queries,n_excluded,n_nonconverged\n";
    for (const auto& c : result.cells) {
      out << c.model << ',' << c.engine << ',' << c.T << ',' << c.n_q << ','
          << detail::format_g6(c.mean_rel_error) << ',' << detail::format_g6(c.mean_online_us)
          << ',' << detail::format_g6(c.offline_ms) << ',' << c.memory_params << ','
          << c.n_queries << ',' << c.n_excluded << ',' << c.n_nonconverged << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + out_prefix + "_summary.csv");
  }
  {
    std::ofstream out(out_prefix + "_queries.csv");
    if (!out) throw std::runtime_error("cannot write " + out_prefix + "_queries.csv");
    out << "query_id,n_q,model,engine,T,sweeps,converged,terms,induced_width,clique_count,"
           "estimate,exact,rel_error,online_us\n";
    for (size_t i = 0; i < result.records.size(); ++i) {
      const auto& r = result.records[i];
      out << r.query_id << ',' << r.n_q << ',' << r.model << ',' << r.engine << ',' << r.T << ','
          << r.sweeps << ',' << (r.converged ? 1 : 0) << ',' << r.terms << ','
          << r.induced_width << ',' << r.clique_count << ',' << detail::format_g6(r.estimate_count)
          << ',' << static_cast<int64_t>(r.exact) << ',' << detail::format_g6(r.rel_error) << ','
          << detail::format_g6(result.online_us[i]) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + out_prefix + "_queries.csv");
  }
}

}  // namespace selest
