#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selest/dataset.hpp"

namespace selest {

// Enumerating satisfying assignments is exponential in the number of query
// variables; operations that need it refuse queries above this bound.
inline constexpr int kMaxQueryVars = 20;

struct Literal {
  int attr = 0;
  int value = 0;  // 0 or 1
};

struct ConjunctiveQuery {
  std::vector<Literal> literals;  // pairwise-distinct attributes
};

// Expression tree over attribute literals.
struct BooleanQuery {
  enum class Kind { kLeaf, kAnd, kOr, kNot };

  Kind kind = Kind::kLeaf;
  Literal lit{};                   // kLeaf only
  std::vector<BooleanQuery> kids;  // kAnd/kOr: zero or more (empty AND is vacuously
                                   // true, empty OR false); kNot: exactly one

  static BooleanQuery leaf(int attr, int value);
  static BooleanQuery negation(BooleanQuery inner);
  static BooleanQuery conjunction(std::vector<BooleanQuery> kids);
  static BooleanQuery disjunction(std::vector<BooleanQuery> kids);

  // value_of(attr) -> bool gives the attribute values to evaluate against.
  template <class F>
  bool eval(F&& value_of) const {
    switch (kind) {
      case Kind::kLeaf:
        return static_cast<int>(static_cast<bool>(value_of(lit.attr))) == lit.value;
      case Kind::kNot:
        return !kids.front().eval(value_of);
      case Kind::kAnd:
        for (const auto& c : kids)
          if (!c.eval(value_of)) return false;
        return true;
      case Kind::kOr:
        for (const auto& c : kids)
          if (c.eval(value_of)) return true;
        return false;
    }
    return false;
  }
};

// Distinct attributes mentioned anywhere in the query, sorted ascending.
std::vector<int> query_vars(const BooleanQuery& q);

// Full assignments of the query variables under which the query is true.
// Bit t of a mask is the value of vars[t]; the masks are pairwise distinct,
// so probabilities of the assignments sum directly.
struct AssignmentSet {
  std::vector<int> vars;        // sorted ascending
  std::vector<uint32_t> masks;  // satisfying assignments
};
AssignmentSet satisfying_assignments(const BooleanQuery& q, int max_vars = kMaxQueryVars);

// Succeeds iff the query is a pure conjunction of literals over distinct
// attributes (negated leaves fold into flipped literals).
std::optional<ConjunctiveQuery> as_conjunctive(const BooleanQuery& q);

BooleanQuery from_conjunctive(const ConjunctiveQuery& cq);

// Random workload generation. Each query draws n_q distinct attributes with
// probability proportional to their marginals, then assigns each literal the
// value 1 with its marginal probability. With `arbitrary`, the connectives
// between adjacent literals are AND or OR with equal probability,
// left-associated; otherwise the query is a single conjunction.
std::vector<BooleanQuery> generate_queries(const DatasetStats& stats, int n_q, int count,
                                           bool arbitrary, uint64_t seed);

// One query per line. Conjunctions print as `3=1 & 5=0`; general queries as
// prefix expressions like `(and (= 3 1) (or (= 5 0) (= 7 1)))`.
BooleanQuery parse_query(const std::string& text);
std::string format_query(const BooleanQuery& q);
std::vector<BooleanQuery> load_queries(const std::string& path);
void save_queries(const std::vector<BooleanQuery>& queries, const std::string& path);

}  // namespace selest
