#include "selest/maxent.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bitset_util.hpp"

namespace selest {

const char* engine_name(EngineKind e) {
  switch (e) {
    case EngineKind::kBruteForce: return "brute";
    case EngineKind::kBucketElimination: return "bucket";
    case EngineKind::kCliqueTree: return "clique";
  }
  return "?";
}

std::optional<EngineKind> engine_from_name(std::string_view name) {
  if (name == "brute") return EngineKind::kBruteForce;
  if (name == "bucket") return EngineKind::kBucketElimination;
  if (name == "clique") return EngineKind::kCliqueTree;
  return std::nullopt;
}

std::vector<Constraint> build_constraints(const ItemsetCollection& collection,
                                          const std::vector<int>& vars) {
  const double lo = 1.0 / (2.0 * static_cast<double>(collection.n));
  std::vector<Constraint> out;
  for (const Itemset& item : restrict_to(collection, vars)) {
    Constraint c;
    for (int32_t a : item.attrs) {
      auto it = std::lower_bound(vars.begin(), vars.end(), static_cast<int>(a));
      c.mask |= 1u << (it - vars.begin());
    }
    c.f = std::clamp(item.freq, lo, 1.0 - lo);
    out.push_back(c);
  }
  return out;
}

int ConstraintGraph::induced_width() const {
  int w = 0;
  for (uint32_t c : cliques) w = std::max(w, std::popcount(c) - 1);
  return w;
}

ConstraintGraph build_graph(const std::vector<Constraint>& constraints, int n_vars) {
  if (n_vars < 0 || n_vars > 31) throw std::invalid_argument("variable count out of range");
  ConstraintGraph g;
  g.n_vars = n_vars;

  std::vector<uint32_t> adj(n_vars, 0);
  for (const Constraint& c : constraints) {
    const auto bits = detail::mask_bits(c.mask);
    for (size_t x = 0; x < bits.size(); ++x)
      for (size_t y = x + 1; y < bits.size(); ++y) {
        adj[bits[x]] |= 1u << bits[y];
        adj[bits[y]] |= 1u << bits[x];
      }
  }
  for (int i = 0; i < n_vars; ++i)
    for (int j = i + 1; j < n_vars; ++j)
      if (adj[i] >> j & 1u) g.edges.push_back({i, j});

  // Maximum cardinality search; eliminating in reverse visit order gives a
  // perfect elimination order once the graph is chordal.
  uint32_t numbered = 0;
  std::vector<int> visit;
  visit.reserve(n_vars);
  for (int step = 0; step < n_vars; ++step) {
    int best = -1, best_w = -1;
    for (int v = 0; v < n_vars; ++v) {
      if (numbered >> v & 1u) continue;
      const int w = std::popcount(adj[v] & numbered);
      if (w > best_w) {
        best_w = w;
        best = v;
      }
    }
    visit.push_back(best);
    numbered |= 1u << best;
  }
  g.elim_order.assign(visit.rbegin(), visit.rend());

  std::vector<uint32_t> filled = adj;
  uint32_t remaining = n_vars ? (n_vars == 32 ? ~0u : (1u << n_vars) - 1u) : 0u;
  for (int v : g.elim_order) {
    const auto nb = detail::mask_bits(filled[v] & remaining & ~(1u << v));
    for (size_t x = 0; x < nb.size(); ++x)
      for (size_t y = x + 1; y < nb.size(); ++y) {
        if (filled[nb[x]] >> nb[y] & 1u) continue;
        filled[nb[x]] |= 1u << nb[y];
        filled[nb[y]] |= 1u << nb[x];
        g.fill_edges.push_back({nb[x], nb[y]});
      }
    remaining &= ~(1u << v);
  }

  std::vector<uint32_t> candidates;
  remaining = n_vars ? (n_vars == 32 ? ~0u : (1u << n_vars) - 1u) : 0u;
  for (int v : g.elim_order) {
    candidates.push_back((1u << v) | (filled[v] & remaining & ~(1u << v)));
    remaining &= ~(1u << v);
  }
  for (size_t i = 0; i < candidates.size(); ++i) {
    bool maximal = true;
    for (size_t j = 0; maximal && j < candidates.size(); ++j)
      maximal = i == j || (candidates[i] | candidates[j]) != candidates[j];
    if (maximal) g.cliques.push_back(candidates[i]);
  }

  struct Cand {
    int w, a, b;
  };
  std::vector<Cand> pairs;
  for (size_t a = 0; a < g.cliques.size(); ++a)
    for (size_t b = a + 1; b < g.cliques.size(); ++b) {
      const int w = std::popcount(g.cliques[a] & g.cliques[b]);
      if (w > 0) pairs.push_back({w, static_cast<int>(a), static_cast<int>(b)});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Cand& x, const Cand& y) {
    if (x.w != y.w) return x.w > y.w;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  std::vector<int> parent(g.cliques.size());
  for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Cand& p : pairs) {
    const int ra = find(p.a), rb = find(p.b);
    if (ra == rb) continue;
    parent[rb] = ra;
    g.join_edges.push_back({p.a, p.b, g.cliques[p.a] & g.cliques[p.b]});
  }
  return g;
}

MaxentFactorization make_factorization(std::vector<Constraint> constraints, int n_vars) {
  MaxentFactorization fact;
  fact.n_vars = n_vars;
  fact.mu0 = std::ldexp(1.0, -n_vars);
  fact.mu.assign(constraints.size(), 1.0);
  fact.elim_order = build_graph(constraints, n_vars).elim_order;
  fact.constraints = std::move(constraints);
  return fact;
}

double product_eval(const MaxentFactorization& fact, uint32_t assignment) {
  double p = fact.mu0;
  for (size_t j = 0; j < fact.constraints.size(); ++j)
    if ((assignment & fact.constraints[j].mask) == fact.constraints[j].mask) p *= fact.mu[j];
  return p;
}

Event event_from_local_query(const ConjunctiveQuery& target, int n_vars) {
  Event ev;
  for (const Literal& l : target.literals) {
    if (l.attr < 0 || l.attr >= n_vars)
      throw std::out_of_range("target literal outside the local variable range");
    if (ev.fixed >> l.attr & 1u) throw std::invalid_argument("target repeats a variable");
    ev.fixed |= 1u << l.attr;
    if (l.value) ev.values |= 1u << l.attr;
  }
  return ev;
}

namespace {

struct RangeEscape {};

struct LinearDomain {
  using V = double;
  static V one() { return 1.0; }
  static V zero() { return 0.0; }
  static V from_prob(double p) { return p; }
  static double to_prob(V v) { return v; }
  static V mul(V a, V b) { return a * b; }
  static V add(V a, V b) { return a + b; }
  static bool is_zero(V v) { return v == 0.0; }
};

struct LogDomain {
  using V = double;  // natural log; -inf stands for zero
  static V one() { return 0.0; }
  static V zero() { return -std::numeric_limits<double>::infinity(); }
  static V from_prob(double p) { return std::log(p); }
  static double to_prob(V v) { return std::exp(v); }
  static V mul(V a, V b) { return a + b; }
  static V add(V a, V b) {
    if (a == zero()) return b;
    if (b == zero()) return a;
    const V hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
  }
  static bool is_zero(V v) { return v == zero(); }
};

template <class D>
struct DomainFact {
  int n_vars = 0;
  const std::vector<Constraint>* constraints = nullptr;
  const std::vector<int>* elim_order = nullptr;
  typename D::V mu0{};
  std::vector<typename D::V> mu;
};

template <class D>
struct DomainSum {
  typename D::V value{};
  uint64_t terms = 0;
};

template <class D>
typename D::V eval_in_domain(const DomainFact<D>& fact, uint32_t assignment) {
  typename D::V p = fact.mu0;
  const auto& cs = *fact.constraints;
  for (size_t j = 0; j < cs.size(); ++j)
    if ((assignment & cs[j].mask) == cs[j].mask) p = D::mul(p, fact.mu[j]);
  return p;
}

template <class D>
DomainSum<D> brute_sum(const DomainFact<D>& fact, Event ev) {
  const uint32_t all = fact.n_vars == 32 ? ~0u : (1u << fact.n_vars) - 1u;
  const uint32_t free = all & ~ev.fixed;
  const uint32_t base = ev.values & ev.fixed;
  typename D::V total = D::zero();
  uint32_t sub = 0;
  while (true) {
    total = D::add(total, eval_in_domain(fact, base | sub));
    if (sub == free) break;
    sub = (sub - free) & free;
  }
  return {total, uint64_t(1) << std::popcount(free)};
}

// One multiplicative factor with a subset of the free variables as scope;
// table entries are indexed by the scope assignment packed in ascending bit
// order.
template <class D>
struct Factor {
  uint32_t scope = 0;
  std::vector<typename D::V> vals;
};

inline uint32_t drop_bit(uint32_t packed, int pos) {
  const uint32_t low = packed & ((1u << pos) - 1u);
  return low | ((packed >> (pos + 1)) << pos);
}

template <class D>
DomainSum<D> bucket_sum(const DomainFact<D>& fact, Event ev) {
  const uint32_t all = fact.n_vars == 32 ? ~0u : (1u << fact.n_vars) - 1u;
  const uint32_t free = all & ~ev.fixed;
  const uint32_t base = ev.values & ev.fixed;
  const int n_free = std::popcount(free);

  typename D::V constant = fact.mu0;
  std::vector<Factor<D>> factors;
  const auto& cs = *fact.constraints;
  for (size_t j = 0; j < cs.size(); ++j) {
    const uint32_t fixed_part = cs[j].mask & ev.fixed;
    if ((base & fixed_part) != fixed_part) continue;  // a fixed 0 kills the factor
    const uint32_t scope = cs[j].mask & free;
    if (scope == 0) {
      constant = D::mul(constant, fact.mu[j]);
      continue;
    }
    Factor<D> f;
    f.scope = scope;
    f.vals.assign(size_t(1) << std::popcount(scope), D::one());
    f.vals.back() = fact.mu[j];  // all-ones packed assignment is the last index
    factors.push_back(std::move(f));
  }

  uint32_t unscoped = free;
  for (const auto& f : factors) unscoped &= ~f.scope;

  for (int v : *fact.elim_order) {
    if (!(free >> v & 1u) || (unscoped >> v & 1u)) continue;
    uint32_t scope_union = 0;
    std::vector<Factor<D>> bucket;
    std::vector<Factor<D>> rest;
    for (auto& f : factors) {
      if (f.scope >> v & 1u) {
        scope_union |= f.scope;
        bucket.push_back(std::move(f));
      } else {
        rest.push_back(std::move(f));
      }
    }
    const int m = std::popcount(scope_union);
    std::vector<typename D::V> table(size_t(1) << m);
    for (uint32_t p = 0; p < (1u << m); ++p) {
      const uint32_t bits = detail::unpack_assignment(p, scope_union);
      typename D::V prod = D::one();
      for (const auto& f : bucket)
        prod = D::mul(prod, f.vals[detail::pack_assignment(bits, f.scope)]);
      table[p] = prod;
    }
    const int pos = std::popcount(scope_union & ((1u << v) - 1u));
    Factor<D> merged;
    merged.scope = scope_union & ~(1u << v);
    merged.vals.assign(size_t(1) << (m - 1), D::zero());
    for (uint32_t p = 0; p < (1u << m); ++p) {
      if (p >> pos & 1u) continue;
      merged.vals[drop_bit(p, pos)] = D::add(table[p], table[p | (1u << pos)]);
    }
    rest.push_back(std::move(merged));
    factors = std::move(rest);
  }

  typename D::V total = constant;
  for (const auto& f : factors) {
    assert(f.scope == 0);  // every scoped variable was eliminated above
    total = D::mul(total, f.vals[0]);
  }
  if (unscoped) total = D::mul(total, D::from_prob(std::ldexp(1.0, std::popcount(unscoped))));

  // Work metric: the distributive law leaves two summands per eliminated
  // variable, against 2^free for direct enumeration.
  return {total, n_free ? uint64_t(2) * n_free : uint64_t(1)};
}

template <class D>
DomainSum<D> event_sum(const DomainFact<D>& fact, Event ev, EngineKind engine) {
  ev.values &= ev.fixed;
  if (engine == EngineKind::kBucketElimination) return bucket_sum<D>(fact, ev);
  return brute_sum<D>(fact, ev);
}

template <class D>
DomainSum<D> monitor_value(const DomainFact<D>& fact, const MonitorTarget& target,
                           EngineKind engine) {
  if (target.event) return event_sum<D>(fact, *target.event, engine);
  typename D::V total = D::zero();
  for (uint32_t mask : target.assignments) total = D::add(total, eval_in_domain(fact, mask));
  return {total, target.assignments.size()};
}

template <class D>
double rel_change(typename D::V prev, typename D::V cur) {
  if (D::is_zero(prev)) return D::is_zero(cur) ? 0.0 : std::numeric_limits<double>::infinity();
  if constexpr (std::is_same_v<D, LogDomain>) {
    return std::abs(std::expm1(cur - prev));
  } else {
    return std::abs(cur - prev) / prev;
  }
}

constexpr double kMuFloor = 1e-300;
constexpr double kMuCeil = 1e300;

template <class D>
ScalingResult fit_flat(const std::vector<Constraint>& constraints, int n_vars,
                       const MonitorTarget& target, const ScalingOptions& opts,
                       const std::vector<int>& elim_order) {
  DomainFact<D> fact;
  fact.n_vars = n_vars;
  fact.constraints = &constraints;
  fact.elim_order = &elim_order;
  fact.mu0 = D::from_prob(std::ldexp(1.0, -n_vars));
  fact.mu.assign(constraints.size(), D::one());

  ScalingResult res;
  res.diag.terms_total = 0;

  auto finish = [&](typename D::V monitored) {
    res.fact.n_vars = n_vars;
    res.fact.constraints = constraints;
    res.fact.elim_order = elim_order;
    res.fact.mu0 = D::to_prob(fact.mu0);
    res.fact.mu.resize(fact.mu.size());
    for (size_t j = 0; j < fact.mu.size(); ++j) res.fact.mu[j] = D::to_prob(fact.mu[j]);
    res.estimate = D::to_prob(monitored);
  };

  auto max_violation = [&]() {
    double worst = 0.0;
    for (size_t j = 0; j < constraints.size(); ++j) {
      const Event ev{constraints[j].mask, constraints[j].mask};
      const auto s = event_sum<D>(fact, ev, opts.engine);
      res.diag.terms_total += s.terms;
      const double S = D::to_prob(s.value);
      worst = std::max(worst, std::abs(S - constraints[j].f) / constraints[j].f);
    }
    return worst;
  };

  auto mon = monitor_value<D>(fact, target, opts.engine);
  res.diag.terms_total += mon.terms;
  typename D::V prev = mon.value;

  if (constraints.empty()) {
    res.diag.converged = true;
    finish(prev);
    return res;
  }

  const typename D::V s_cap = D::from_prob(1.0 - 1e-15);
  typename D::V cur = prev;
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    uint64_t sweep_terms = 0;
    for (size_t j = 0; j < constraints.size(); ++j) {
      const Event ev{constraints[j].mask, constraints[j].mask};
      auto s = event_sum<D>(fact, ev, opts.engine);
      sweep_terms += s.terms;
      if constexpr (std::is_same_v<D, LinearDomain>) {
        if (!std::isfinite(s.value) || s.value <= 0.0) throw RangeEscape{};
      } else {
        if (D::is_zero(s.value))
          throw std::runtime_error("constraint sum vanished during scaling");
      }
      const typename D::V S = std::min(s.value, s_cap);
      const double f = constraints[j].f;
      if constexpr (std::is_same_v<D, LogDomain>) {
        const double l1mS = std::log1p(-std::exp(S));
        fact.mu0 += std::log1p(-f) - l1mS;
        fact.mu[j] += std::log(f) + l1mS - S - std::log1p(-f);
      } else {
        fact.mu0 *= (1.0 - f) / (1.0 - S);
        fact.mu[j] *= f * (1.0 - S) / (S * (1.0 - f));
        const double a0 = std::abs(fact.mu0), aj = std::abs(fact.mu[j]);
        if (a0 < kMuFloor || a0 > kMuCeil || aj < kMuFloor || aj > kMuCeil) throw RangeEscape{};
      }
    }
    if (sweep == 1) res.diag.terms_per_sweep = sweep_terms;
    res.diag.terms_total += sweep_terms;

    mon = monitor_value<D>(fact, target, opts.engine);
    res.diag.terms_total += mon.terms;
    if constexpr (std::is_same_v<D, LinearDomain>) {
      if (!std::isfinite(mon.value)) throw RangeEscape{};
    }
    cur = mon.value;
    res.diag.sweeps = sweep;

    if (rel_change<D>(prev, cur) < opts.epsilon) {
      const double viol = max_violation();
      res.diag.max_constraint_violation = viol;
      if (viol <= kConstraintTol) {
        res.diag.converged = true;
        finish(cur);
        return res;
      }
    }
    prev = cur;
  }
  res.diag.max_constraint_violation = max_violation();
  finish(cur);
  return res;
}

void validate_inputs(const std::vector<Constraint>& constraints, int n_vars,
                     const ScalingOptions& opts) {
  if (n_vars < 0 || n_vars > 31) throw std::invalid_argument("variable count out of range");
  if (!(opts.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (opts.max_sweeps < 1) throw std::invalid_argument("max_sweeps must be at least 1");
  if (opts.engine == EngineKind::kCliqueTree)
    throw std::invalid_argument("clique tree fitting is a separate operation");
  const uint32_t all = n_vars == 32 ? ~0u : (1u << n_vars) - 1u;
  for (const Constraint& c : constraints) {
    if (c.mask == 0 || (c.mask & ~all) != 0)
      throw std::invalid_argument("constraint scope outside the variable range");
    if (!(c.f > 0.0 && c.f < 1.0))
      throw std::invalid_argument("constraint frequency must lie in (0, 1)");
  }
}

}  // namespace

SumResult event_prob(const MaxentFactorization& fact, Event ev, EngineKind engine) {
  if (engine == EngineKind::kCliqueTree)
    throw std::invalid_argument("clique tree fitting replaces global sums; use CliqueTreeModel");
  DomainFact<LinearDomain> view;
  view.n_vars = fact.n_vars;
  view.constraints = &fact.constraints;
  view.elim_order = &fact.elim_order;
  view.mu0 = fact.mu0;
  view.mu = fact.mu;
  const auto s = event_sum<LinearDomain>(view, ev, engine);
  return {s.value, s.terms};
}

SumResult constraint_sum(const MaxentFactorization& fact, int j, EngineKind engine) {
  if (j < 0 || static_cast<size_t>(j) >= fact.constraints.size())
    throw std::out_of_range("constraint index out of range");
  const uint32_t mask = fact.constraints[j].mask;
  return event_prob(fact, {mask, mask}, engine);
}

ScalingResult iterative_scaling(const std::vector<Constraint>& constraints, int n_vars,
                                const MonitorTarget& target, const ScalingOptions& opts) {
  validate_inputs(constraints, n_vars, opts);
  const std::vector<int> elim_order = build_graph(constraints, n_vars).elim_order;
  if (!opts.force_log) {
    try {
      return fit_flat<LinearDomain>(constraints, n_vars, target, opts, elim_order);
    } catch (const RangeEscape&) {
    }
  }
  ScalingResult res = fit_flat<LogDomain>(constraints, n_vars, target, opts, elim_order);
  res.diag.log_domain = true;
  return res;
}

ScalingResult iterative_scaling(const std::vector<Constraint>& constraints, int n_vars,
                                const ConjunctiveQuery& target, const ScalingOptions& opts) {
  return iterative_scaling(constraints, n_vars,
                           MonitorTarget::for_event(event_from_local_query(target, n_vars)),
                           opts);
}

MaxentEstimate maxent_query_prob(const ItemsetCollection& collection, const BooleanQuery& q,
                                 EngineKind engine, double epsilon, int max_sweeps,
                                 int max_vars) {
  const auto start = std::chrono::steady_clock::now();
  MaxentEstimate est;
  est.diag.engine = engine;

  const std::vector<int> vars = query_vars(q);
  const int n = static_cast<int>(vars.size());
  if (n > max_vars)
    throw std::invalid_argument("query mentions " + std::to_string(n) +
                                " variables, bound is " + std::to_string(max_vars));
  for (int a : vars)
    if (a < 0 || a >= collection.k) throw std::out_of_range("query attribute out of range");
  est.diag.n_q = n;
  if (n == 0) {
    // Constant query: true on the empty assignment or not at all.
    est.prob = q.eval([](int) { return false; }) ? 1.0 : 0.0;
    est.diag.converged = true;
    est.diag.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return est;
  }

  const std::vector<Constraint> constraints = build_constraints(collection, vars);
  const ConstraintGraph graph = build_graph(constraints, n);
  est.diag.n_constraints = static_cast<int>(constraints.size());
  est.diag.induced_width = graph.induced_width();
  est.diag.clique_count = static_cast<int>(graph.cliques.size());

  MonitorTarget target;
  bool conjunctive = false;
  if (auto cq = as_conjunctive(q)) {
    conjunctive = true;
    ConjunctiveQuery local;
    for (const Literal& l : cq->literals) {
      const auto it = std::lower_bound(vars.begin(), vars.end(), l.attr);
      local.literals.push_back({static_cast<int>(it - vars.begin()), l.value});
    }
    target = MonitorTarget::for_event(event_from_local_query(local, n));
  } else {
    target = MonitorTarget::for_assignments(satisfying_assignments(q, max_vars).masks);
  }

  if (engine == EngineKind::kCliqueTree) {
    CliqueFitResult fit = fit_clique_tree(constraints, n, graph, target, epsilon, max_sweeps);
    est.prob = fit.estimate;
    est.diag.sweeps = fit.diag.sweeps;
    est.diag.converged = fit.diag.converged;
    est.diag.terms = fit.diag.terms_total;
  } else {
    ScalingOptions opts;
    opts.epsilon = epsilon;
    opts.max_sweeps = max_sweeps;
    opts.engine = engine;
    ScalingResult fit = iterative_scaling(constraints, n, target, opts);
    est.prob = fit.estimate;
    if (!conjunctive) {
      // The summed disjoint disjuncts are renormalized by the model's total
      // mass, which iterative scaling holds at 1 up to rounding.
      const SumResult z = event_prob(fit.fact, Event{0, 0}, engine);
      if (z.value > 0.0 && std::isfinite(z.value)) est.prob /= z.value;
    }
    est.diag.sweeps = fit.diag.sweeps;
    est.diag.converged = fit.diag.converged;
    est.diag.terms = fit.diag.terms_total;
  }
  est.prob = std::clamp(est.prob, 0.0, 1.0);
  est.diag.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return est;
}

}  // namespace selest
