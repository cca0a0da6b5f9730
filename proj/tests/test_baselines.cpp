#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <vector>

#include "doctest.h"
#include "selest/baselines.hpp"
#include "selest/dataset.hpp"
#include "selest/query.hpp"
#include "selest/rng.hpp"

using namespace selest;

namespace {

bool naive_eval(const BooleanQuery& q, const std::vector<char>& assign) {
  switch (q.kind) {
    case BooleanQuery::Kind::kLeaf:
      return assign[q.lit.attr] == q.lit.value;
    case BooleanQuery::Kind::kNot:
      return !naive_eval(q.kids[0], assign);
    case BooleanQuery::Kind::kAnd: {
      bool all = true;
      for (const auto& c : q.kids) all = all && naive_eval(c, assign);
      return all;
    }
    case BooleanQuery::Kind::kOr: {
      bool any = false;
      for (const auto& c : q.kids) any = any || naive_eval(c, assign);
      return any;
    }
  }
  return false;
}

// Pairwise tables counted directly from the data.
struct PairTables {
  int k;
  int64_t n;
  std::vector<double> marg;
  std::map<std::pair<int, int>, std::array<double, 4>> joint;  // p11 p10 p01 p00
};

PairTables count_tables(const SparseDataset& data) {
  PairTables t;
  t.k = data.k;
  t.n = data.n();
  std::vector<std::vector<char>> dense;
  for (const auto& row : data.rows) {
    std::vector<char> d(data.k, 0);
    for (int32_t a : row) d[a] = 1;
    dense.push_back(std::move(d));
  }
  t.marg.assign(data.k, 0.0);
  for (const auto& row : dense)
    for (int a = 0; a < data.k; ++a) t.marg[a] += row[a];
  for (double& m : t.marg) m /= static_cast<double>(t.n);
  for (int i = 0; i < data.k; ++i)
    for (int j = i + 1; j < data.k; ++j) {
      std::array<double, 4> cell{};
      for (const auto& row : dense) {
        int idx = row[i] ? (row[j] ? 0 : 1) : (row[j] ? 2 : 3);
        cell[idx] += 1.0;
      }
      for (double& c : cell) c /= static_cast<double>(t.n);
      t.joint[{i, j}] = cell;
    }
  return t;
}

double mi_of(const std::array<double, 4>& cell) {
  double pi1 = cell[0] + cell[1], pj1 = cell[0] + cell[2];
  double pi[2] = {pi1, 1 - pi1}, pj[2] = {pj1, 1 - pj1};
  double p[2][2] = {{cell[0], cell[1]}, {cell[2], cell[3]}};
  double mi = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double pab = p[a][b];
      if (pab > 0 && pi[a] > 0 && pj[b] > 0) mi += pab * std::log(pab / (pi[a] * pj[b]));
    }
  return std::max(0.0, mi);
}

// Labeled trees on k nodes via Pruefer sequences; returns edge lists.
std::vector<std::vector<std::pair<int, int>>> all_trees(int k) {
  std::vector<std::vector<std::pair<int, int>>> trees;
  int len = k - 2;
  std::vector<int> seq(std::max(len, 0), 0);
  auto decode = [&]() {
    std::vector<int> degree(k, 1);
    for (int s : seq) ++degree[s];
    std::vector<std::pair<int, int>> edges;
    std::vector<bool> used(k, false);
    for (int s : seq) {
      int leaf = -1;
      for (int v = 0; v < k; ++v)
        if (degree[v] == 1 && !used[v]) {
          leaf = v;
          break;
        }
      used[leaf] = true;
      edges.push_back({std::min(leaf, s), std::max(leaf, s)});
      --degree[s];
    }
    std::vector<int> rest;
    for (int v = 0; v < k; ++v)
      if (!used[v] && degree[v] == 1) rest.push_back(v);
    edges.push_back({rest[0], rest[1]});
    return edges;
  };
  if (k == 1) return {{}};
  if (k == 2) return {{{0, 1}}};
  while (true) {
    trees.push_back(decode());
    int pos = len - 1;
    while (pos >= 0 && seq[pos] == k - 1) seq[pos--] = 0;
    if (pos < 0) break;
    ++seq[pos];
  }
  return trees;
}

// Tree joint evaluated explicitly: product of node marginals times the edge
// coupling ratios.
double tree_joint(const ChowLiuTree& t, const std::vector<char>& assign) {
  double p = 1.0;
  for (int v = 0; v < t.k; ++v) p *= assign[v] ? t.marginal[v] : 1 - t.marginal[v];
  for (const auto& e : t.edges) {
    int a = assign[e.i] ? 1 : 0, b = assign[e.j] ? 1 : 0;
    double pi = a ? t.marginal[e.i] : 1 - t.marginal[e.i];
    double pj = b ? t.marginal[e.j] : 1 - t.marginal[e.j];
    double pij = e.p[a][b];
    if (pi == 0 || pj == 0) return 0.0;
    p *= pij / (pi * pj);
  }
  return p;
}

}  // namespace

TEST_CASE("independence marginals come from counts") {
  SparseDataset d = generate_synthetic(6, 400, 0.3, {{0, 1}}, 0.5, 3);
  IndependenceModel m = build_independence(d);
  PairTables t = count_tables(d);
  CHECK(m.n == d.n());
  REQUIRE(m.k() == d.k);
  for (int a = 0; a < d.k; ++a) CHECK(m.marginal[a] == doctest::Approx(t.marg[a]).epsilon(1e-12));
}

TEST_CASE("independence probabilities multiply per literal") {
  IndependenceModel m;
  m.marginal = {0.3, 0.4};
  m.n = 100;
  CHECK(independence_prob(m, parse_query("0=1")) == doctest::Approx(0.3));
  CHECK(independence_prob(m, parse_query("0=1 & 1=0")) == doctest::Approx(0.18));
  CHECK(independence_prob(m, BooleanQuery::conjunction({})) == doctest::Approx(1.0));
}

TEST_CASE("independence handles general queries by assignment sums") {
  IndependenceModel m;
  m.marginal = {0.2, 0.5, 0.7, 0.4};
  m.n = 10;
  DatasetStats st;
  st.k = 4;
  st.n = 10;
  st.marginal = m.marginal;
  for (const auto& q : generate_queries(st, 3, 40, true, 19)) {
    double want = 0.0;
    for (uint32_t mask = 0; mask < 16; ++mask) {
      std::vector<char> assign(4);
      double p = 1.0;
      for (int a = 0; a < 4; ++a) {
        assign[a] = (mask >> a) & 1;
        p *= assign[a] ? m.marginal[a] : 1 - m.marginal[a];
      }
      if (naive_eval(q, assign)) want += p;
    }
    CHECK(independence_prob(m, q) == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("independence is well calibrated on independent data") {
  SparseDataset d = generate_synthetic(12, 4000, 0.3, {}, 0.0, 8);
  IndependenceModel m = build_independence(d);
  DatasetStats st = compute_stats(d);
  auto qs = generate_queries(st, 4, 200, false, 44);
  double err = 0;
  int used = 0;
  for (const auto& q : qs) {
    int64_t exact = exact_count(d, q);
    if (exact == 0) continue;
    err += std::abs(independence_prob(m, q) * static_cast<double>(d.n()) -
                    static_cast<double>(exact)) /
           static_cast<double>(exact);
    ++used;
  }
  CHECK(used > 150);
  CHECK(err / used <= 0.05);
}

TEST_CASE("perfectly correlated pair is selected") {
  SparseDataset d;
  d.k = 3;
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    std::vector<int32_t> row;
    if (rng.bernoulli(0.4)) {
      row.push_back(0);
      row.push_back(1);
    }
    if (rng.bernoulli(0.5)) row.push_back(2);
    d.rows.push_back(std::move(row));
  }
  ChowLiuTree t = build_chowliu(d);
  bool found = false;
  for (const auto& e : t.edges) found = found || (e.i == 0 && e.j == 1);
  CHECK(found);
}

TEST_CASE("selected forest attains the exhaustive spanning tree optimum") {
  for (uint64_t seed : {2u, 7u, 13u}) {
    SparseDataset d = generate_synthetic(5, 300, 0.35, {{0, 1, 2}, {3, 4}}, 0.7, seed);
    ChowLiuTree t = build_chowliu(d);
    PairTables tab = count_tables(d);
    double best = 0;
    for (const auto& tree : all_trees(5)) {
      double w = 0;
      for (auto [i, j] : tree) w += mi_of(tab.joint[{i, j}]);
      best = std::max(best, w);
    }
    CHECK(t.total_mi() == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("tree probabilities match explicit joint enumeration") {
  for (uint64_t seed : {4u, 9u}) {
    SparseDataset d = generate_synthetic(8, 600, 0.3, {{0, 1, 2, 3}, {5, 6}}, 0.8, seed);
    ChowLiuTree t = build_chowliu(d);
    DatasetStats st = compute_stats(d);
    auto qs = generate_queries(st, 4, 30, false, 61);
    auto arb = generate_queries(st, 5, 30, true, 62);
    qs.insert(qs.end(), arb.begin(), arb.end());
    qs.push_back(BooleanQuery::conjunction({}));
    for (const auto& q : qs) {
      double want = 0;
      for (uint32_t mask = 0; mask < (1u << 8); ++mask) {
        std::vector<char> assign(8);
        for (int a = 0; a < 8; ++a) assign[a] = (mask >> a) & 1;
        if (naive_eval(q, assign)) want += tree_joint(t, assign);
      }
      CHECK(chowliu_prob(t, q) == doctest::Approx(want).epsilon(1e-10));
    }
  }
}

TEST_CASE("tree distribution is normalized") {
  SparseDataset d = generate_synthetic(12, 700, 0.25, {{0, 1, 2}, {6, 7, 8, 9}}, 0.7, 15);
  ChowLiuTree t = build_chowliu(d);
  std::vector<BooleanQuery> leaves;
  double total = 0;
  for (uint32_t mask = 0; mask < (1u << 12); ++mask) {
    std::vector<char> assign(12);
    for (int a = 0; a < 12; ++a) assign[a] = (mask >> a) & 1;
    total += tree_joint(t, assign);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  // and through the query path on a subset of variables
  double sub = 0;
  for (int v0 = 0; v0 < 2; ++v0)
    for (int v5 = 0; v5 < 2; ++v5)
      for (int v7 = 0; v7 < 2; ++v7) {
        BooleanQuery q = BooleanQuery::conjunction({BooleanQuery::leaf(0, v0),
                                                    BooleanQuery::leaf(5, v5),
                                                    BooleanQuery::leaf(7, v7)});
        sub += chowliu_prob(t, q);
      }
  CHECK(sub == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("independent data drops to a near-empty forest") {
  SparseDataset d = generate_synthetic(8, 6000, 0.3, {}, 0.0, 23);
  ChowLiuTree t = build_chowliu(d);
  for (const auto& e : t.edges) CHECK(e.mi < 0.01);
  IndependenceModel m = build_independence(d);
  for (int a = 0; a < d.k; ++a) {
    BooleanQuery q = BooleanQuery::leaf(a, 1);
    CHECK(chowliu_prob(t, q) == doctest::Approx(independence_prob(m, q)).epsilon(1e-12));
  }
}

TEST_CASE("add-one smoothing keeps empty cells positive") {
  SparseDataset d;
  d.k = 2;
  for (int i = 0; i < 50; ++i) d.rows.push_back({0, 1});  // only 11 and 00 ever occur
  for (int i = 0; i < 50; ++i) d.rows.push_back({});
  ChowLiuTree t = build_chowliu(d, true);
  REQUIRE(t.edges.size() == 1);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) CHECK(t.edges[0].p[a][b] > 0);
  double sum = t.edges[0].p[0][0] + t.edges[0].p[0][1] + t.edges[0].p[1][0] + t.edges[0].p[1][1];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  // marginals stay consistent with the table rows
  CHECK(t.marginal[0] == doctest::Approx(t.edges[0].p[1][0] + t.edges[0].p[1][1]));
  CHECK(chowliu_prob(t, parse_query("0=1 & 1=0")) > 0);
}

TEST_CASE("model files round-trip") {
  SparseDataset d = generate_synthetic(7, 350, 0.3, {{1, 2, 3}}, 0.6, 31);
  const std::string path =
      (std::filesystem::temp_directory_path() / "selest_model.txt").string();

  IndependenceModel im = build_independence(d);
  save_model(im, path);
  BaselineModel loaded = load_model(path);
  auto* pim = std::get_if<IndependenceModel>(&loaded);
  REQUIRE(pim != nullptr);
  CHECK(pim->n == im.n);
  for (int a = 0; a < d.k; ++a) CHECK(pim->marginal[a] == im.marginal[a]);

  ChowLiuTree ct = build_chowliu(d);
  save_model(ct, path);
  loaded = load_model(path);
  auto* pct = std::get_if<ChowLiuTree>(&loaded);
  REQUIRE(pct != nullptr);
  CHECK(pct->k == ct.k);
  REQUIRE(pct->edges.size() == ct.edges.size());
  DatasetStats st = compute_stats(d);
  for (const auto& q : generate_queries(st, 3, 25, true, 71))
    CHECK(chowliu_prob(*pct, q) == doctest::Approx(chowliu_prob(ct, q)).epsilon(1e-12));
  std::filesystem::remove(path);
}

TEST_CASE("model files with cycles are rejected") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "selest_model_bad.txt").string();
  std::ofstream(path) << "model=chowliu\nk=3 n=10\nmarginals 0.5 0.5 0.5\n"
                      << "0 1 0.25 0.25 0.25 0.25\n1 2 0.25 0.25 0.25 0.25\n"
                      << "0 2 0.25 0.25 0.25 0.25\n";
  CHECK_THROWS(load_model(path));
  std::ofstream(path) << "model=sorcery\nk=2 n=5\nmarginals 0.5 0.5\n";
  CHECK_THROWS(load_model(path));
  std::filesystem::remove(path);
}

TEST_CASE("memory accounting") {
  IndependenceModel m;
  m.marginal.assign(9, 0.5);
  CHECK(model_memory_cost(m) == 9);
  SparseDataset d = generate_synthetic(10, 300, 0.3, {{0, 1, 2, 3}}, 0.9, 2);
  ChowLiuTree t = build_chowliu(d);
  CHECK(model_memory_cost(t) == 10 + 4 * static_cast<int64_t>(t.edges.size()));
  CHECK(chowliu_free_params(t) == 10 + static_cast<int64_t>(t.edges.size()));
}
