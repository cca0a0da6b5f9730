#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selest/itemsets.hpp"
#include "selest/query.hpp"

namespace selest {

// Interchangeable summation engines for fitting the per-query model. All
// engines estimate the same distribution; they differ only in how the sums
// are organized.
enum class EngineKind { kBruteForce, kBucketElimination, kCliqueTree };

const char* engine_name(EngineKind e);  // "brute" | "bucket" | "clique"
std::optional<EngineKind> engine_from_name(std::string_view name);

// Marginal constraint on local variables: the event "every variable in
// `mask` equals 1" must carry probability f, with 0 < f < 1.
struct Constraint {
  uint32_t mask = 0;
  double f = 0.0;

  int arity() const { return std::popcount(mask); }
};

// Itemsets restricted to the query variables, frequencies clamped away from
// {0, 1} by half a row, attributes remapped to positions in the sorted
// variable list.
std::vector<Constraint> build_constraints(const ItemsetCollection& collection,
                                          const std::vector<int>& vars);

// Co-occurrence graph of a constraint set with its chordal completion,
// elimination order, maximal cliques, and join forest.
struct ConstraintGraph {
  int n_vars = 0;
  std::vector<std::pair<int, int>> edges;       // i < j, from constraint co-occurrence
  std::vector<std::pair<int, int>> fill_edges;  // added by triangulation
  std::vector<int> elim_order;                  // reverse maximum-cardinality order
  std::vector<uint32_t> cliques;                // maximal cliques of the completed graph

  struct JoinEdge {
    int a = 0;
    int b = 0;        // clique indices
    uint32_t sep = 0;  // cliques[a] & cliques[b]
  };
  std::vector<JoinEdge> join_edges;  // maximum-intersection spanning forest

  int induced_width() const;
};

ConstraintGraph build_graph(const std::vector<Constraint>& constraints, int n_vars);

// Product-form model over n_vars binary variables: a normalizer and one
// multiplicative factor per constraint, applied when the constraint's
// variables are all 1.
struct MaxentFactorization {
  int n_vars = 0;
  std::vector<Constraint> constraints;
  double mu0 = 1.0;
  std::vector<double> mu;
  std::vector<int> elim_order;  // used by the bucket elimination engine
};

// Uniform starting point: mu0 = 2^-n_vars, all factors 1.
MaxentFactorization make_factorization(std::vector<Constraint> constraints, int n_vars);

double product_eval(const MaxentFactorization& fact, uint32_t assignment);

// Partial assignment: variables in `fixed` take the corresponding bit of
// `values`; the rest are summed out.
struct Event {
  uint32_t fixed = 0;
  uint32_t values = 0;
};

struct SumResult {
  double value = 0.0;
  uint64_t terms = 0;  // summation work metric, see below
};

// Probability mass of the event under the factorization. Brute force counts
// 2^(free vars) product terms. Bucket elimination produces the identical
// value along the stored elimination order; its term metric counts the two
// summands of each single-variable elimination step.
SumResult event_prob(const MaxentFactorization& fact, Event ev, EngineKind engine);

// Mass of "constraint j's variables all 1" under the current model.
// The clique tree engine is not valid here; it replaces these global sums.
SumResult constraint_sum(const MaxentFactorization& fact, int j, EngineKind engine);

// Convergence is judged on one monitored quantity: either the probability of
// a partial-assignment event or the summed probability of a set of full
// assignments.
struct MonitorTarget {
  std::optional<Event> event;
  std::vector<uint32_t> assignments;

  static MonitorTarget for_event(Event ev) { return {ev, {}}; }
  static MonitorTarget for_assignments(std::vector<uint32_t> masks) {
    return {std::nullopt, std::move(masks)};
  }
};

struct ScalingOptions {
  double epsilon = 1e-4;  // relative change threshold on the monitored cell
  int max_sweeps = 200;
  EngineKind engine = EngineKind::kBruteForce;
  bool force_log = false;  // run in log space from the start instead of on escape
};

// Relative slack allowed on every constraint before a fit may report
// convergence.
inline constexpr double kConstraintTol = 1e-3;

struct ScalingDiagnostics {
  int sweeps = 0;
  bool converged = false;
  bool log_domain = false;  // fit re-ran in log space after a range escape
  uint64_t terms_total = 0;
  uint64_t terms_per_sweep = 0;          // constraint sums of one sweep
  double max_constraint_violation = 0.0;  // max_j |S_j - f_j| / f_j at exit
};

struct ScalingResult {
  MaxentFactorization fact;
  double estimate = 0.0;  // monitored quantity at exit
  ScalingDiagnostics diag;
};

// Round-robin proportional fitting over the constraints from the uniform
// start. After each sweep the monitored cell decides termination; a fit only
// reports convergence once every constraint is met within kConstraintTol.
ScalingResult iterative_scaling(const std::vector<Constraint>& constraints, int n_vars,
                                const MonitorTarget& target, const ScalingOptions& opts = {});
ScalingResult iterative_scaling(const std::vector<Constraint>& constraints, int n_vars,
                                const ConjunctiveQuery& target, const ScalingOptions& opts = {});

Event event_from_local_query(const ConjunctiveQuery& target, int n_vars);

// Distribution in clique-forest form: one table per maximal clique, one per
// separator; the joint is the product of clique tables over the product of
// separator tables.
struct CliqueTable {
  uint32_t vars = 0;           // variable mask
  std::vector<double> values;  // indexed by assignment bits packed in ascending var order
};

struct CliqueTreeModel {
  int n_vars = 0;
  ConstraintGraph graph;
  std::vector<CliqueTable> cliques;     // aligned with graph.cliques
  std::vector<CliqueTable> separators;  // aligned with graph.join_edges
  std::vector<int> owner;               // constraint index -> clique index

  double joint(uint32_t assignment) const;
  SumResult event_prob(Event ev) const;
  double assignments_prob(const std::vector<uint32_t>& masks) const;

  // Largest gap between the two adjacent cliques' marginals on a separator.
  double max_separator_discrepancy() const;
};

struct CliqueFitResult {
  CliqueTreeModel model;
  double estimate = 0.0;
  ScalingDiagnostics diag;
};

// Proportional fitting in the decomposed form: each constraint updates the
// table of the smallest clique containing it and the change is propagated
// across the join forest, so the clique and separator tables stay mutually
// consistent while converging to the same product form the flat engines fit.
CliqueFitResult fit_clique_tree(const std::vector<Constraint>& constraints, int n_vars,
                                const ConstraintGraph& graph, const MonitorTarget& target,
                                double epsilon = 1e-4, int max_sweeps = 200);
CliqueFitResult fit_clique_tree(const std::vector<Constraint>& constraints, int n_vars,
                                const ConstraintGraph& graph, const ConjunctiveQuery& target,
                                double epsilon = 1e-4, int max_sweeps = 200);

struct QueryDiagnostics {
  int n_q = 0;
  EngineKind engine = EngineKind::kBruteForce;
  int n_constraints = 0;
  int sweeps = 0;
  bool converged = false;
  uint64_t terms = 0;
  int induced_width = 0;
  int clique_count = 0;
  double seconds = 0.0;
};

struct MaxentEstimate {
  double prob = 0.0;
  QueryDiagnostics diag;
};

// End-to-end per-query estimate: select constraints, fit with the chosen
// engine, evaluate the query. Conjunctions read off the fitted probability of
// their assignment event; general queries sum the fitted distribution over
// their satisfying assignments and renormalize.
MaxentEstimate maxent_query_prob(const ItemsetCollection& collection, const BooleanQuery& q,
                                 EngineKind engine, double epsilon = 1e-4, int max_sweeps = 200,
                                 int max_vars = kMaxQueryVars);

}  // namespace selest
