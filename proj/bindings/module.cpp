#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "selest/baselines.hpp"
#include "selest/bench.hpp"
#include "selest/dataset.hpp"
#include "selest/itemsets.hpp"
#include "selest/maxent.hpp"
#include "selest/query.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace selest;

namespace {

EngineKind engine_arg(const std::string& name) {
  const auto e = engine_from_name(name);
  if (!e) throw std::invalid_argument("unknown engine '" + name + "'");
  return *e;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Approximate Boolean count queries over sparse binary data";

  py::class_<SparseDataset>(m, "SparseDataset")
      .def(py::init<>())
      .def_readwrite("k", &SparseDataset::k)
      .def_readwrite("rows", &SparseDataset::rows)
      .def_property_readonly("n", &SparseDataset::n)
      .def("cell", &SparseDataset::cell, "row"_a, "attr"_a);

  py::class_<DatasetStats>(m, "DatasetStats")
      .def_readonly("k", &DatasetStats::k)
      .def_readonly("n", &DatasetStats::n)
      .def_readonly("marginal", &DatasetStats::marginal)
      .def_readonly("total_ones", &DatasetStats::total_ones)
      .def_readonly("mean_ones_per_row", &DatasetStats::mean_ones_per_row)
      .def_readonly("std_ones_per_row", &DatasetStats::std_ones_per_row)
      .def_readonly("max_ones_per_row", &DatasetStats::max_ones_per_row);

  m.def("load_dataset", &load_dataset, "path"_a);
  m.def("save_dataset", &save_dataset, "data"_a, "path"_a);
  m.def("generate_synthetic", &generate_synthetic, "k"_a, "n"_a, "density"_a,
        "blocks"_a = std::vector<std::vector<int>>{}, "strength"_a = 0.0, "seed"_a = 1);
  m.def("compute_stats", &compute_stats, "data"_a);

  py::class_<BooleanQuery>(m, "BooleanQuery")
      .def("__repr__", [](const BooleanQuery& q) { return format_query(q); })
      .def("vars", [](const BooleanQuery& q) { return query_vars(q); })
      .def("is_conjunctive", [](const BooleanQuery& q) { return as_conjunctive(q).has_value(); });

  m.def("parse_query", &parse_query, "text"_a);
  m.def("format_query", &format_query, "query"_a);
  m.def(
      "generate_queries",
      [](const DatasetStats& st, int n_q, int count, bool arbitrary, uint64_t seed) {
        return generate_queries(st, n_q, count, arbitrary, seed);
      },
      "stats"_a, "n_q"_a, "count"_a, "arbitrary"_a = false, "seed"_a = 1);
  m.def("load_queries", &load_queries, "path"_a);
  m.def("save_queries", &save_queries, "queries"_a, "path"_a);
  m.def("exact_count", &exact_count, "data"_a, "query"_a);

  py::class_<Itemset>(m, "Itemset")
      .def_readonly("attrs", &Itemset::attrs)
      .def_readonly("count", &Itemset::count)
      .def_readonly("freq", &Itemset::freq)
      .def("__repr__", [](const Itemset& it) {
        std::string s = "{";
        for (size_t i = 0; i < it.attrs.size(); ++i)
          s += (i ? "," : "") + std::to_string(it.attrs[i]);
        return s + "}:" + std::to_string(it.count);
      });

  py::class_<ItemsetCollection>(m, "ItemsetCollection")
      .def_readonly("threshold", &ItemsetCollection::threshold)
      .def_readonly("k", &ItemsetCollection::k)
      .def_readonly("n", &ItemsetCollection::n)
      .def_readonly("items", &ItemsetCollection::items)
      .def("__len__", [](const ItemsetCollection& c) { return c.items.size(); });

  m.def("mine_frequent", &mine_frequent, "data"_a, "threshold"_a);
  m.def("restrict_to", &restrict_to, "collection"_a, "vars"_a);
  m.def("itemset_memory_cost", &itemset_memory_cost, "collection"_a);
  m.def("load_itemsets", &load_itemsets, "path"_a);
  m.def("save_itemsets", &save_itemsets, "collection"_a, "path"_a);

  py::class_<IndependenceModel>(m, "IndependenceModel")
      .def_property_readonly("k", &IndependenceModel::k)
      .def_readonly("n", &IndependenceModel::n)
      .def_readonly("marginal", &IndependenceModel::marginal);

  py::class_<ChowLiuTree>(m, "ChowLiuTree")
      .def_readonly("k", &ChowLiuTree::k)
      .def_readonly("n", &ChowLiuTree::n)
      .def_readonly("marginal", &ChowLiuTree::marginal)
      .def_property_readonly("edges",
                             [](const ChowLiuTree& t) {
                               std::vector<std::pair<int, int>> out;
                               for (const auto& e : t.edges) out.emplace_back(e.i, e.j);
                               return out;
                             })
      .def("total_mi", &ChowLiuTree::total_mi);

  m.def("build_independence", &build_independence, "data"_a);
  m.def("build_chowliu", &build_chowliu, "data"_a, "smooth"_a = false);
  m.def("independence_prob", &independence_prob, "model"_a, "query"_a);
  m.def("chowliu_prob", &chowliu_prob, "tree"_a, "query"_a);
  m.def("model_memory_cost", py::overload_cast<const IndependenceModel&>(&model_memory_cost),
        "model"_a);
  m.def("model_memory_cost", py::overload_cast<const ChowLiuTree&>(&model_memory_cost),
        "model"_a);
  m.def("chowliu_free_params", &chowliu_free_params, "tree"_a);
  m.def("save_model", py::overload_cast<const IndependenceModel&, const std::string&>(&save_model),
        "model"_a, "path"_a);
  m.def("save_model", py::overload_cast<const ChowLiuTree&, const std::string&>(&save_model),
        "model"_a, "path"_a);
  m.def("load_model", &load_model, "path"_a);

  py::class_<QueryDiagnostics>(m, "QueryDiagnostics")
      .def_readonly("n_q", &QueryDiagnostics::n_q)
      .def_readonly("n_constraints", &QueryDiagnostics::n_constraints)
      .def_readonly("sweeps", &QueryDiagnostics::sweeps)
      .def_readonly("converged", &QueryDiagnostics::converged)
      .def_readonly("terms", &QueryDiagnostics::terms)
      .def_readonly("induced_width", &QueryDiagnostics::induced_width)
      .def_readonly("clique_count", &QueryDiagnostics::clique_count)
      .def_readonly("seconds", &QueryDiagnostics::seconds)
      .def_property_readonly("engine", [](const QueryDiagnostics& d) {
        return std::string(engine_name(d.engine));
      });

  py::class_<MaxentEstimate>(m, "MaxentEstimate")
      .def_readonly("prob", &MaxentEstimate::prob)
      .def_readonly("diag", &MaxentEstimate::diag);

  m.def(
      "maxent_query_prob",
      [](const ItemsetCollection& coll, const BooleanQuery& q, const std::string& engine,
         double epsilon, int max_sweeps) {
        return maxent_query_prob(coll, q, engine_arg(engine), epsilon, max_sweeps);
      },
      "collection"_a, "query"_a, "engine"_a = "bucket", "epsilon"_a = 1e-4,
      "max_sweeps"_a = 200);

  m.def(
      "run_benchmark",
      [](const std::string& config_path) {
        const BenchConfig cfg = parse_bench_config(config_path);
        emit_report(run_benchmark(cfg), cfg.out);
        return std::make_pair(cfg.out + "_summary.csv", cfg.out + "_queries.csv");
      },
      "config_path"_a, "Run a benchmark config and write both CSV reports");
}
