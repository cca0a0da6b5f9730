#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "selest/dataset.hpp"
#include "selest/query.hpp"

namespace selest {

// Fully factorized model: one marginal per attribute.
struct IndependenceModel {
  std::vector<double> marginal;
  int64_t n = 0;

  int k() const { return static_cast<int>(marginal.size()); }
};

IndependenceModel build_independence(const SparseDataset& data);

// Product of per-literal probabilities for conjunctions; sum of such products
// over the satisfying assignments for general queries.
double independence_prob(const IndependenceModel& m, const BooleanQuery& q);

// Pairwise dependence tree (in general a forest): node marginals plus one
// 2x2 joint table per selected edge.
struct ChowLiuTree {
  struct Edge {
    int i = 0;
    int j = 0;            // i < j
    double p[2][2]{};     // p[a][b] = P(A_i = a, A_j = b)
    double mi = 0.0;      // mutual information of the table
  };

  int k = 0;
  int64_t n = 0;
  std::vector<double> marginal;
  std::vector<Edge> edges;                          // acyclic
  std::vector<std::vector<std::pair<int, int>>> adj;  // neighbor, edge index

  double total_mi() const;
  void rebuild_adjacency();
};

// One pass over all attribute pairs, mutual information per pair, then a
// maximum-weight spanning forest (Kruskal, ties by lexicographic edge order).
// Edges with vanishing mutual information are dropped. Optional add-one
// smoothing keeps conditionals finite when cells are empty.
ChowLiuTree build_chowliu(const SparseDataset& data, bool laplace_smooth = false);

// Exact marginal probability of the query under the tree distribution,
// computed by message passing restricted to subtrees that touch query
// variables; general queries sum over satisfying assignments.
double chowliu_prob(const ChowLiuTree& t, const BooleanQuery& q);

// Stored parameter counts used in benchmark memory accounting.
int64_t model_memory_cost(const IndependenceModel& m);  // k
int64_t model_memory_cost(const ChowLiuTree& t);        // k + 4 per edge
int64_t chowliu_free_params(const ChowLiuTree& t);      // k + 1 per edge

// Text format: `model=independence|chowliu`, `k=<int> n=<int>`, a single
// `marginals ...` line, then (Chow-Liu only) one `<i> <j> <p11> <p10> <p01>
// <p00>` line per edge.
using BaselineModel = std::variant<IndependenceModel, ChowLiuTree>;
void save_model(const IndependenceModel& m, const std::string& path);
void save_model(const ChowLiuTree& t, const std::string& path);
BaselineModel load_model(const std::string& path);

}  // namespace selest
