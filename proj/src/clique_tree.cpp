#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "bitset_util.hpp"
#include "selest/maxent.hpp"

namespace selest {

namespace {

// Lexicographic order on cliques viewed as ascending variable lists.
bool lex_less(uint32_t a, uint32_t b) {
  while (a && b) {
    const int x = std::countr_zero(a);
    const int y = std::countr_zero(b);
    if (x != y) return x < y;
    a &= a - 1;
    b &= b - 1;
  }
  return a == 0 && b != 0;
}

std::vector<double> marginalize(const CliqueTable& t, uint32_t onto) {
  std::vector<double> out(size_t(1) << std::popcount(onto), 0.0);
  for (uint32_t p = 0; p < t.values.size(); ++p) {
    const uint32_t bits = detail::unpack_assignment(p, t.vars);
    out[detail::pack_assignment(bits, onto)] += t.values[p];
  }
  return out;
}

}  // namespace

double CliqueTreeModel::joint(uint32_t assignment) const {
  double num = 1.0;
  for (const auto& t : cliques) num *= t.values[detail::pack_assignment(assignment, t.vars)];
  double den = 1.0;
  for (const auto& t : separators) den *= t.values[detail::pack_assignment(assignment, t.vars)];
  return num / den;
}

SumResult CliqueTreeModel::event_prob(Event ev) const {
  const uint32_t all = n_vars == 32 ? ~0u : (1u << n_vars) - 1u;
  const uint32_t free = all & ~ev.fixed;
  const uint32_t base = ev.values & ev.fixed;
  double total = 0.0;
  uint64_t terms = 0;
  uint32_t sub = 0;
  while (true) {
    total += joint(base | sub);
    ++terms;
    if (sub == free) break;
    sub = (sub - free) & free;
  }
  return {total, terms};
}

double CliqueTreeModel::assignments_prob(const std::vector<uint32_t>& masks) const {
  double total = 0.0;
  for (uint32_t m : masks) total += joint(m);
  return total;
}

double CliqueTreeModel::max_separator_discrepancy() const {
  double worst = 0.0;
  for (size_t e = 0; e < graph.join_edges.size(); ++e) {
    const auto ma = marginalize(cliques[graph.join_edges[e].a], separators[e].vars);
    const auto mb = marginalize(cliques[graph.join_edges[e].b], separators[e].vars);
    for (size_t i = 0; i < ma.size(); ++i) worst = std::max(worst, std::abs(ma[i] - mb[i]));
  }
  return worst;
}

CliqueFitResult fit_clique_tree(const std::vector<Constraint>& constraints, int n_vars,
                                const ConstraintGraph& graph, const MonitorTarget& target,
                                double epsilon, int max_sweeps) {
  if (n_vars < 0 || n_vars > 31) throw std::invalid_argument("variable count out of range");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be at least 1");
  const uint32_t all = n_vars == 32 ? ~0u : (1u << n_vars) - 1u;
  for (const Constraint& c : constraints) {
    if (c.mask == 0 || (c.mask & ~all) != 0)
      throw std::invalid_argument("constraint scope outside the variable range");
    if (!(c.f > 0.0 && c.f < 1.0))
      throw std::invalid_argument("constraint frequency must lie in (0, 1)");
  }

  CliqueFitResult res;
  CliqueTreeModel& m = res.model;
  m.n_vars = n_vars;
  m.graph = graph;

  uint32_t covered = 0;
  for (uint32_t c : graph.cliques) covered |= c;
  if ((covered & all) != all)
    throw std::invalid_argument("clique set does not cover every variable");

  for (uint32_t c : graph.cliques) {
    CliqueTable t;
    t.vars = c;
    t.values.assign(size_t(1) << std::popcount(c), std::ldexp(1.0, -std::popcount(c)));
    m.cliques.push_back(std::move(t));
  }
  for (const auto& je : graph.join_edges) {
    CliqueTable t;
    t.vars = je.sep;
    t.values.assign(size_t(1) << std::popcount(je.sep), std::ldexp(1.0, -std::popcount(je.sep)));
    m.separators.push_back(std::move(t));
  }

  m.owner.assign(constraints.size(), -1);
  for (size_t j = 0; j < constraints.size(); ++j) {
    int best = -1;
    for (size_t i = 0; i < graph.cliques.size(); ++i) {
      if ((constraints[j].mask & graph.cliques[i]) != constraints[j].mask) continue;
      if (best < 0 ||
          std::popcount(graph.cliques[i]) < std::popcount(graph.cliques[best]) ||
          (std::popcount(graph.cliques[i]) == std::popcount(graph.cliques[best]) &&
           lex_less(graph.cliques[i], graph.cliques[best])))
        best = static_cast<int>(i);
    }
    if (best < 0)
      throw std::invalid_argument("constraint " + std::to_string(j) +
                                  " is not contained in any clique");
    m.owner[j] = best;
  }

  std::vector<std::vector<std::pair<int, int>>> adj(graph.cliques.size());  // edge, neighbor
  for (size_t e = 0; e < graph.join_edges.size(); ++e) {
    adj[graph.join_edges[e].a].push_back({static_cast<int>(e), graph.join_edges[e].b});
    adj[graph.join_edges[e].b].push_back({static_cast<int>(e), graph.join_edges[e].a});
  }

  auto monitor = [&]() -> SumResult {
    if (target.event) return m.event_prob(*target.event);
    return {m.assignments_prob(target.assignments), target.assignments.size()};
  };

  // Scale the owning clique's table, then push separator ratios outward so
  // every table is that same distribution's marginal again.
  auto apply_constraint = [&](size_t j) -> uint64_t {
    const int C = m.owner[j];
    CliqueTable& tbl = m.cliques[C];
    const uint32_t sat = detail::pack_assignment(constraints[j].mask, tbl.vars);
    uint64_t terms = tbl.values.size();
    double S = 0.0;
    for (uint32_t p = 0; p < tbl.values.size(); ++p)
      if ((p & sat) == sat) S += tbl.values[p];
    if (!(S > 0.0))
      throw std::runtime_error("constraint sum vanished in clique " + std::to_string(C));
    S = std::min(S, 1.0 - 1e-15);
    const double f = constraints[j].f;
    const double r_sat = f / S;
    const double r_unsat = (1.0 - f) / (1.0 - S);
    for (uint32_t p = 0; p < tbl.values.size(); ++p)
      tbl.values[p] *= (p & sat) == sat ? r_sat : r_unsat;

    std::vector<char> seen(m.cliques.size(), 0);
    std::vector<int> queue = {C};
    seen[C] = 1;
    while (!queue.empty()) {
      const int u = queue.back();
      queue.pop_back();
      for (auto [e, v] : adj[u]) {
        if (seen[v]) continue;
        seen[v] = 1;
        const auto new_sep = marginalize(m.cliques[u], m.separators[e].vars);
        CliqueTable& dst = m.cliques[v];
        for (uint32_t p = 0; p < dst.values.size(); ++p) {
          const uint32_t bits = detail::unpack_assignment(p, dst.vars);
          const uint32_t q = detail::pack_assignment(bits, m.separators[e].vars);
          dst.values[p] *= new_sep[q] / m.separators[e].values[q];
        }
        terms += m.cliques[u].values.size() + dst.values.size();
        m.separators[e].values = new_sep;
        queue.push_back(v);
      }
    }
    return terms;
  };

  auto max_violation = [&]() {
    double worst = 0.0;
    for (size_t j = 0; j < constraints.size(); ++j) {
      const CliqueTable& tbl = m.cliques[m.owner[j]];
      const uint32_t sat = detail::pack_assignment(constraints[j].mask, tbl.vars);
      double S = 0.0;
      for (uint32_t p = 0; p < tbl.values.size(); ++p)
        if ((p & sat) == sat) S += tbl.values[p];
      res.diag.terms_total += tbl.values.size();
      worst = std::max(worst, std::abs(S - constraints[j].f) / constraints[j].f);
    }
    return worst;
  };

  auto mon = monitor();
  res.diag.terms_total += mon.terms;
  double prev = mon.value;

  if (constraints.empty()) {
    res.diag.converged = true;
    res.estimate = prev;
    return res;
  }

  double cur = prev;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    uint64_t sweep_terms = 0;
    for (size_t j = 0; j < constraints.size(); ++j) sweep_terms += apply_constraint(j);
    if (sweep == 1) res.diag.terms_per_sweep = sweep_terms;
    res.diag.terms_total += sweep_terms;

    mon = monitor();
    res.diag.terms_total += mon.terms;
    cur = mon.value;
    res.diag.sweeps = sweep;

    const double change = prev == 0.0
                              ? (cur == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                              : std::abs(cur - prev) / prev;
    if (change < epsilon) {
      const double viol = max_violation();
      res.diag.max_constraint_violation = viol;
      if (viol <= kConstraintTol) {
        res.diag.converged = true;
        res.estimate = cur;
        return res;
      }
    }
    prev = cur;
  }
  res.diag.max_constraint_violation = max_violation();
  res.estimate = cur;
  return res;
}

CliqueFitResult fit_clique_tree(const std::vector<Constraint>& constraints, int n_vars,
                                const ConstraintGraph& graph, const ConjunctiveQuery& target,
                                double epsilon, int max_sweeps) {
  return fit_clique_tree(constraints, n_vars, graph,
                         MonitorTarget::for_event(event_from_local_query(target, n_vars)),
                         epsilon, max_sweeps);
}

}  // namespace selest
