#include "selest/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "text_util.hpp"

namespace selest {

IndependenceModel build_independence(const SparseDataset& data) {
  if (data.n() == 0) throw std::invalid_argument("cannot fit an empty dataset");
  IndependenceModel m;
  m.n = data.n();
  m.marginal.assign(data.k, 0.0);
  for (const auto& row : data.rows)
    for (int32_t a : row) m.marginal[a] += 1.0;
  for (double& p : m.marginal) p /= static_cast<double>(m.n);
  return m;
}

namespace {

void check_range(const std::vector<int>& vars, int k) {
  for (int a : vars)
    if (a < 0 || a >= k) throw std::out_of_range("query attribute out of range");
}

}  // namespace

double independence_prob(const IndependenceModel& m, const BooleanQuery& q) {
  if (auto cq = as_conjunctive(q)) {
    double p = 1.0;
    for (const auto& l : cq->literals) {
      if (l.attr < 0 || l.attr >= m.k()) throw std::out_of_range("query attribute out of range");
      p *= l.value ? m.marginal[l.attr] : 1.0 - m.marginal[l.attr];
    }
    return p;
  }
  AssignmentSet set = satisfying_assignments(q);
  check_range(set.vars, m.k());
  double total = 0.0;
  for (uint32_t mask : set.masks) {
    double p = 1.0;
    for (size_t t = 0; t < set.vars.size(); ++t) {
      const double pm = m.marginal[set.vars[t]];
      p *= (mask >> t) & 1u ? pm : 1.0 - pm;
    }
    total += p;
  }
  return total;
}

double ChowLiuTree::total_mi() const {
  double total = 0.0;
  for (const auto& e : edges) total += e.mi;
  return total;
}

void ChowLiuTree::rebuild_adjacency() {
  adj.assign(k, {});
  for (size_t e = 0; e < edges.size(); ++e) {
    adj[edges[e].i].push_back({edges[e].j, static_cast<int>(e)});
    adj[edges[e].j].push_back({edges[e].i, static_cast<int>(e)});
  }
}

namespace {

double mi_of_table(const double p[2][2]) {
  const double pi1 = p[1][0] + p[1][1];
  const double pj1 = p[0][1] + p[1][1];
  const double pi[2] = {1.0 - pi1, pi1};
  const double pj[2] = {1.0 - pj1, pj1};
  double mi = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      if (p[a][b] <= 0.0) continue;
      mi += p[a][b] * std::log(p[a][b] / (pi[a] * pj[b]));
    }
  return std::max(0.0, mi);
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

inline constexpr double kMiFloor = 1e-12;  // edges this weak stay out of the forest

}  // namespace

ChowLiuTree build_chowliu(const SparseDataset& data, bool laplace_smooth) {
  if (data.n() == 0) throw std::invalid_argument("cannot fit an empty dataset");
  ChowLiuTree t;
  t.k = data.k;
  t.n = data.n();

  const int k = data.k;
  std::vector<int64_t> c1(k, 0);
  std::vector<int64_t> c11(static_cast<size_t>(k) * k, 0);
  for (const auto& row : data.rows) {
    for (int32_t a : row) ++c1[a];
    for (size_t x = 0; x < row.size(); ++x)
      for (size_t y = x + 1; y < row.size(); ++y)
        ++c11[static_cast<size_t>(row[x]) * k + row[y]];
  }

  const double add = laplace_smooth ? 1.0 : 0.0;
  const double den = static_cast<double>(t.n) + 4.0 * add;
  t.marginal.assign(k, 0.0);
  for (int i = 0; i < k; ++i)
    t.marginal[i] = (static_cast<double>(c1[i]) + 2.0 * add) / den;

  std::vector<ChowLiuTree::Edge> all;
  all.reserve(static_cast<size_t>(k) * (k - 1) / 2);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      ChowLiuTree::Edge e;
      e.i = i;
      e.j = j;
      const double n11 = static_cast<double>(c11[static_cast<size_t>(i) * k + j]) + add;
      const double n10 = static_cast<double>(c1[i] - c11[static_cast<size_t>(i) * k + j]) + add;
      const double n01 = static_cast<double>(c1[j] - c11[static_cast<size_t>(i) * k + j]) + add;
      const double n00 = static_cast<double>(t.n - c1[i] - c1[j]) +
                         static_cast<double>(c11[static_cast<size_t>(i) * k + j]) + add;
      e.p[1][1] = n11 / den;
      e.p[1][0] = n10 / den;
      e.p[0][1] = n01 / den;
      e.p[0][0] = n00 / den;
      e.mi = mi_of_table(e.p);
      all.push_back(e);
    }
  }

  std::sort(all.begin(), all.end(), [](const ChowLiuTree::Edge& a, const ChowLiuTree::Edge& b) {
    if (a.mi != b.mi) return a.mi > b.mi;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  UnionFind uf(k);
  for (const auto& e : all) {
    if (e.mi <= kMiFloor) break;
    if (uf.unite(e.i, e.j)) t.edges.push_back(e);
  }
  std::sort(t.edges.begin(), t.edges.end(),
            [](const ChowLiuTree::Edge& a, const ChowLiuTree::Edge& b) {
              if (a.i != b.i) return a.i < b.i;
              return a.j < b.j;
            });
  t.rebuild_adjacency();
  return t;
}

namespace {

// P(child value b | parent value a) along one tree edge, oriented as needed.
double edge_conditional(const ChowLiuTree& t, int edge_idx, int parent, int a, int b) {
  const auto& e = t.edges[edge_idx];
  const double joint = parent == e.i ? e.p[a][b] : e.p[b][a];
  const double pa = a ? t.marginal[parent] : 1.0 - t.marginal[parent];
  if (pa <= 0.0) return 0.0;
  return joint / pa;
}

// True when any vertex of the subtree hanging off `v` (entered from `from`)
// carries evidence.
bool subtree_has_evidence(const ChowLiuTree& t, const std::vector<int>& evidence, int v,
                          int from) {
  if (evidence[v] != -1) return true;
  for (auto [u, e] : t.adj[v])
    if (u != from && subtree_has_evidence(t, evidence, u, v)) return true;
  return false;
}

// P(evidence below v | X_v = a), pruned to evidence-bearing branches.
double downward_message(const ChowLiuTree& t, const std::vector<int>& evidence, int v, int from,
                        int a) {
  if (evidence[v] != -1 && evidence[v] != a) return 0.0;
  double prod = 1.0;
  for (auto [u, e] : t.adj[v]) {
    if (u == from || !subtree_has_evidence(t, evidence, u, v)) continue;
    double sum = 0.0;
    for (int b = 0; b < 2; ++b)
      sum += edge_conditional(t, e, v, a, b) * downward_message(t, evidence, u, v, b);
    prod *= sum;
  }
  return prod;
}

double conjunctive_prob(const ChowLiuTree& t, const std::vector<Literal>& literals) {
  std::vector<int> evidence(t.k, -1);
  for (const auto& l : literals) {
    if (l.attr < 0 || l.attr >= t.k) throw std::out_of_range("query attribute out of range");
    if (evidence[l.attr] != -1 && evidence[l.attr] != l.value) return 0.0;
    evidence[l.attr] = l.value;
  }
  std::vector<char> done(t.k, 0);
  double prob = 1.0;
  for (const auto& l : literals) {
    if (done[l.attr]) continue;
    // Flood the component once, rooted at this literal's attribute.
    std::vector<int> stack = {l.attr};
    done[l.attr] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [u, e] : t.adj[v]) {
        (void)e;
        if (!done[u]) {
          done[u] = 1;
          stack.push_back(u);
        }
      }
    }
    double sum = 0.0;
    for (int a = 0; a < 2; ++a) {
      const double pa = a ? t.marginal[l.attr] : 1.0 - t.marginal[l.attr];
      if (pa <= 0.0) continue;
      sum += pa * downward_message(t, evidence, l.attr, -1, a);
    }
    prob *= sum;
  }
  return prob;
}

}  // namespace

double chowliu_prob(const ChowLiuTree& t, const BooleanQuery& q) {
  if (auto cq = as_conjunctive(q)) return conjunctive_prob(t, cq->literals);
  AssignmentSet set = satisfying_assignments(q);
  check_range(set.vars, t.k);
  double total = 0.0;
  for (uint32_t mask : set.masks) {
    std::vector<Literal> lits(set.vars.size());
    for (size_t i = 0; i < set.vars.size(); ++i)
      lits[i] = {set.vars[i], static_cast<int>((mask >> i) & 1u)};
    total += conjunctive_prob(t, lits);
  }
  return total;
}

int64_t model_memory_cost(const IndependenceModel& m) { return m.k(); }

int64_t model_memory_cost(const ChowLiuTree& t) {
  return t.k + 4 * static_cast<int64_t>(t.edges.size());
}

int64_t chowliu_free_params(const ChowLiuTree& t) {
  return t.k + static_cast<int64_t>(t.edges.size());
}

void save_model(const IndependenceModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << "model=independence\n";
  out << "k=" << m.k() << " n=" << m.n << "\n";
  out << "marginals";
  for (double p : m.marginal) out << ' ' << detail::format_g17(p);
  out << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

void save_model(const ChowLiuTree& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << "model=chowliu\n";
  out << "k=" << t.k << " n=" << t.n << "\n";
  out << "marginals";
  for (double p : t.marginal) out << ' ' << detail::format_g17(p);
  out << '\n';
  for (const auto& e : t.edges) {
    out << e.i << ' ' << e.j << ' ' << detail::format_g17(e.p[1][1]) << ' '
        << detail::format_g17(e.p[1][0]) << ' ' << detail::format_g17(e.p[0][1]) << ' '
        << detail::format_g17(e.p[0][0]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

BaselineModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::string line;
  int line_no = 0;
  auto next_body = [&](std::string_view& body) {
    while (std::getline(in, line)) {
      ++line_no;
      body = line;
      size_t hash = body.find('#');
      if (hash != std::string_view::npos) body = body.substr(0, hash);
      body = detail::trim(body);
      if (!body.empty()) return true;
    }
    return false;
  };

  std::string_view body;
  if (!next_body(body) || body.substr(0, 6) != "model=")
    throw ParseError(path, line_no, "expected header model=<kind>");
  const std::string kind(body.substr(6));
  if (kind != "independence" && kind != "chowliu")
    throw ParseError(path, line_no, "unknown model kind '" + kind + "'");

  if (!next_body(body)) throw ParseError(path, line_no, "missing k/n line");
  int64_t k = -1, n = -1;
  for (std::string_view tok : detail::split_ws(body)) {
    if (tok.substr(0, 2) == "k=") k = detail::parse_int(tok.substr(2)).value_or(-1);
    else if (tok.substr(0, 2) == "n=") n = detail::parse_int(tok.substr(2)).value_or(-1);
    else throw ParseError(path, line_no, "unexpected token '" + std::string(tok) + "'");
  }
  if (k < 1 || n < 1) throw ParseError(path, line_no, "expected k=<int> n=<int>");

  if (!next_body(body)) throw ParseError(path, line_no, "missing marginals line");
  auto toks = detail::split_ws(body);
  if (toks.empty() || toks[0] != "marginals")
    throw ParseError(path, line_no, "expected marginals line");
  if (static_cast<int64_t>(toks.size()) != k + 1)
    throw ParseError(path, line_no, "expected " + std::to_string(k) + " marginals");
  std::vector<double> marginal;
  for (size_t i = 1; i < toks.size(); ++i) {
    auto v = detail::parse_double(toks[i]);
    if (!v || *v < 0.0 || *v > 1.0) throw ParseError(path, line_no, "invalid marginal");
    marginal.push_back(*v);
  }

  if (kind == "independence") {
    IndependenceModel m;
    m.marginal = std::move(marginal);
    m.n = n;
    return m;
  }

  ChowLiuTree t;
  t.k = static_cast<int>(k);
  t.n = n;
  t.marginal = std::move(marginal);
  UnionFind uf(t.k);
  while (next_body(body)) {
    auto parts = detail::split_ws(body);
    if (parts.size() != 6) throw ParseError(path, line_no, "expected 'i j p11 p10 p01 p00'");
    auto i = detail::parse_int(parts[0]);
    auto j = detail::parse_int(parts[1]);
    if (!i || !j || *i < 0 || *j <= *i || *j >= k)
      throw ParseError(path, line_no, "invalid edge endpoints");
    ChowLiuTree::Edge e;
    e.i = static_cast<int>(*i);
    e.j = static_cast<int>(*j);
    double cells[4];
    for (int c = 0; c < 4; ++c) {
      auto v = detail::parse_double(parts[2 + c]);
      if (!v || *v < 0.0) throw ParseError(path, line_no, "invalid table cell");
      cells[c] = *v;
    }
    e.p[1][1] = cells[0];
    e.p[1][0] = cells[1];
    e.p[0][1] = cells[2];
    e.p[0][0] = cells[3];
    e.mi = mi_of_table(e.p);
    if (!uf.unite(e.i, e.j)) throw ParseError(path, line_no, "edges form a cycle");
    t.edges.push_back(e);
  }
  t.rebuild_adjacency();
  return t;
}

}  // namespace selest
