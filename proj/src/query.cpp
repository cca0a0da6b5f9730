#include "selest/query.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "selest/rng.hpp"
#include "text_util.hpp"

namespace selest {

BooleanQuery BooleanQuery::leaf(int attr, int value) {
  BooleanQuery q;
  q.kind = Kind::kLeaf;
  q.lit = {attr, value};
  return q;
}

BooleanQuery BooleanQuery::negation(BooleanQuery inner) {
  BooleanQuery q;
  q.kind = Kind::kNot;
  q.kids.push_back(std::move(inner));
  return q;
}

BooleanQuery BooleanQuery::conjunction(std::vector<BooleanQuery> kids) {
  BooleanQuery q;
  q.kind = Kind::kAnd;
  q.kids = std::move(kids);
  return q;
}

BooleanQuery BooleanQuery::disjunction(std::vector<BooleanQuery> kids) {
  BooleanQuery q;
  q.kind = Kind::kOr;
  q.kids = std::move(kids);
  return q;
}

namespace {

void collect_vars(const BooleanQuery& q, std::vector<int>& out) {
  if (q.kind == BooleanQuery::Kind::kLeaf) {
    out.push_back(q.lit.attr);
    return;
  }
  for (const auto& c : q.kids) collect_vars(c, out);
}

}  // namespace

std::vector<int> query_vars(const BooleanQuery& q) {
  std::vector<int> vars;
  collect_vars(q, vars);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

AssignmentSet satisfying_assignments(const BooleanQuery& q, int max_vars) {
  AssignmentSet set;
  set.vars = query_vars(q);
  const int m = static_cast<int>(set.vars.size());
  if (m > max_vars)
    throw std::invalid_argument("query mentions " + std::to_string(m) +
                                " variables, enumeration bound is " + std::to_string(max_vars));
  for (uint32_t mask = 0; mask < (1u << m); ++mask) {
    auto value_of = [&](int attr) {
      auto it = std::lower_bound(set.vars.begin(), set.vars.end(), attr);
      return (mask >> (it - set.vars.begin())) & 1u;
    };
    if (q.eval(value_of)) set.masks.push_back(mask);
  }
  return set;
}

namespace {

bool collect_literals(const BooleanQuery& q, std::vector<Literal>& out) {
  switch (q.kind) {
    case BooleanQuery::Kind::kLeaf:
      out.push_back(q.lit);
      return true;
    case BooleanQuery::Kind::kNot:
      if (q.kids.front().kind != BooleanQuery::Kind::kLeaf) return false;
      out.push_back({q.kids.front().lit.attr, 1 - q.kids.front().lit.value});
      return true;
    case BooleanQuery::Kind::kAnd:
      for (const auto& c : q.kids)
        if (!collect_literals(c, out)) return false;
      return true;
    case BooleanQuery::Kind::kOr:
      return false;
  }
  return false;
}

}  // namespace

std::optional<ConjunctiveQuery> as_conjunctive(const BooleanQuery& q) {
  ConjunctiveQuery cq;
  if (!collect_literals(q, cq.literals)) return std::nullopt;
  std::vector<int> attrs;
  for (const auto& l : cq.literals) attrs.push_back(l.attr);
  std::sort(attrs.begin(), attrs.end());
  if (std::adjacent_find(attrs.begin(), attrs.end()) != attrs.end()) return std::nullopt;
  return cq;
}

BooleanQuery from_conjunctive(const ConjunctiveQuery& cq) {
  std::vector<BooleanQuery> kids;
  for (const auto& l : cq.literals) kids.push_back(BooleanQuery::leaf(l.attr, l.value));
  return BooleanQuery::conjunction(std::move(kids));
}

std::vector<BooleanQuery> generate_queries(const DatasetStats& stats, int n_q, int count,
                                           bool arbitrary, uint64_t seed) {
  if (n_q < 1) throw std::invalid_argument("query size must be at least 1");
  if (n_q > stats.k) throw std::invalid_argument("query size exceeds attribute count");
  if (count < 1) throw std::invalid_argument("query count must be at least 1");
  bool any_positive = false;
  for (double m : stats.marginal) any_positive = any_positive || m > 0.0;
  if (!any_positive) throw std::invalid_argument("all marginals are zero");

  Rng rng(seed);
  std::vector<BooleanQuery> queries;
  queries.reserve(static_cast<size_t>(count));
  for (int c = 0; c < count; ++c) {
    // Weighted sampling without replacement, then one value per literal, then
    // the connective coins; the draw order is pinned for reproducibility.
    std::vector<double> weights = stats.marginal;
    std::vector<int> attrs(n_q);
    for (int t = 0; t < n_q; ++t) {
      size_t pick = rng.weighted_index(weights);
      attrs[t] = static_cast<int>(pick);
      weights[pick] = -1.0;
    }
    std::vector<Literal> lits(n_q);
    for (int t = 0; t < n_q; ++t)
      lits[t] = {attrs[t], rng.bernoulli(stats.marginal[attrs[t]]) ? 1 : 0};
    if (!arbitrary) {
      ConjunctiveQuery cq;
      cq.literals = lits;
      queries.push_back(from_conjunctive(cq));
      continue;
    }
    BooleanQuery q = BooleanQuery::leaf(lits[0].attr, lits[0].value);
    for (int t = 1; t < n_q; ++t) {
      BooleanQuery next = BooleanQuery::leaf(lits[t].attr, lits[t].value);
      std::vector<BooleanQuery> pair;
      pair.push_back(std::move(q));
      pair.push_back(std::move(next));
      q = rng.bernoulli(0.5) ? BooleanQuery::conjunction(std::move(pair))
                             : BooleanQuery::disjunction(std::move(pair));
    }
    queries.push_back(std::move(q));
  }
  return queries;
}

namespace {

struct Token {
  std::string text;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> toks;
  size_t i = 0;
  while (i < s.size()) {
    char ch = s[i];
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      ++i;
      continue;
    }
    if (ch == '(' || ch == ')') {
      toks.push_back({std::string(1, ch)});
      ++i;
      continue;
    }
    size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r' && s[j] != '(' &&
           s[j] != ')')
      ++j;
    toks.push_back({std::string(s.substr(i, j - i))});
    i = j;
  }
  return toks;
}

[[noreturn]] void bad_query(const std::string& msg) {
  throw std::invalid_argument("malformed query: " + msg);
}

int parse_attr(const std::string& tok) {
  auto v = detail::parse_int(tok);
  if (!v || *v < 0) bad_query("bad attribute index '" + tok + "'");
  return static_cast<int>(*v);
}

int parse_value(const std::string& tok) {
  if (tok == "0") return 0;
  if (tok == "1") return 1;
  bad_query("literal value must be 0 or 1, got '" + tok + "'");
}

BooleanQuery parse_sexpr(const std::vector<Token>& toks, size_t& pos) {
  if (pos >= toks.size()) bad_query("unexpected end of input");
  if (toks[pos].text != "(") bad_query("expected '('");
  ++pos;
  if (pos >= toks.size()) bad_query("unexpected end of input");
  const std::string op = toks[pos].text;
  ++pos;
  if (op == "=") {
    if (pos + 1 >= toks.size()) bad_query("literal needs attribute and value");
    int attr = parse_attr(toks[pos].text);
    int value = parse_value(toks[pos + 1].text);
    pos += 2;
    if (pos >= toks.size() || toks[pos].text != ")") bad_query("expected ')'");
    ++pos;
    return BooleanQuery::leaf(attr, value);
  }
  if (op == "and" || op == "or" || op == "not") {
    std::vector<BooleanQuery> kids;
    while (pos < toks.size() && toks[pos].text != ")") kids.push_back(parse_sexpr(toks, pos));
    if (pos >= toks.size()) bad_query("expected ')'");
    ++pos;
    if (op == "not") {
      if (kids.size() != 1) bad_query("not takes exactly one operand");
      return BooleanQuery::negation(std::move(kids.front()));
    }
    return op == "and" ? BooleanQuery::conjunction(std::move(kids))
                       : BooleanQuery::disjunction(std::move(kids));
  }
  bad_query("unknown operator '" + op + "'");
}

BooleanQuery parse_shorthand(std::string_view s) {
  std::vector<BooleanQuery> kids;
  size_t start = 0;
  while (true) {
    size_t amp = s.find('&', start);
    std::string_view part = detail::trim(
        amp == std::string_view::npos ? s.substr(start) : s.substr(start, amp - start));
    size_t eq = part.find('=');
    if (eq == std::string_view::npos) bad_query("expected attr=value, got '" + std::string(part) + "'");
    int attr = parse_attr(std::string(detail::trim(part.substr(0, eq))));
    int value = parse_value(std::string(detail::trim(part.substr(eq + 1))));
    kids.push_back(BooleanQuery::leaf(attr, value));
    if (amp == std::string_view::npos) break;
    start = amp + 1;
  }
  if (kids.size() == 1) return std::move(kids.front());
  return BooleanQuery::conjunction(std::move(kids));
}

void format_rec(const BooleanQuery& q, std::string& out) {
  switch (q.kind) {
    case BooleanQuery::Kind::kLeaf:
      out += "(= " + std::to_string(q.lit.attr) + " " + std::to_string(q.lit.value) + ")";
      return;
    case BooleanQuery::Kind::kNot:
      out += "(not ";
      format_rec(q.kids.front(), out);
      out += ")";
      return;
    case BooleanQuery::Kind::kAnd:
    case BooleanQuery::Kind::kOr:
      out += q.kind == BooleanQuery::Kind::kAnd ? "(and" : "(or";
      for (const auto& c : q.kids) {
        out += " ";
        format_rec(c, out);
      }
      out += ")";
      return;
  }
}

}  // namespace

BooleanQuery parse_query(const std::string& text) {
  std::string_view body = detail::trim(text);
  if (body.empty()) bad_query("empty query");
  if (body.front() == '(') {
    auto toks = tokenize(body);
    size_t pos = 0;
    BooleanQuery q = parse_sexpr(toks, pos);
    if (pos != toks.size()) bad_query("trailing tokens after query");
    return q;
  }
  return parse_shorthand(body);
}

std::string format_query(const BooleanQuery& q) {
  // Plain nonempty conjunctions of positive-form leaves print as shorthand.
  if (q.kind == BooleanQuery::Kind::kAnd && !q.kids.empty()) {
    bool flat = true;
    for (const auto& c : q.kids) flat = flat && c.kind == BooleanQuery::Kind::kLeaf;
    if (flat) {
      std::string out;
      for (size_t i = 0; i < q.kids.size(); ++i) {
        if (i) out += " & ";
        out += std::to_string(q.kids[i].lit.attr) + "=" + std::to_string(q.kids[i].lit.value);
      }
      return out;
    }
  }
  if (q.kind == BooleanQuery::Kind::kLeaf)
    return std::to_string(q.lit.attr) + "=" + std::to_string(q.lit.value);
  std::string out;
  format_rec(q, out);
  return out;
}

std::vector<BooleanQuery> load_queries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open query file: " + path);
  std::vector<BooleanQuery> queries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    size_t hash = body.find('#');
    if (hash != std::string_view::npos) body = body.substr(0, hash);
    body = detail::trim(body);
    if (body.empty()) continue;
    try {
      queries.push_back(parse_query(std::string(body)));
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
  return queries;
}

void save_queries(const std::vector<BooleanQuery>& queries, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write query file: " + path);
  for (const auto& q : queries) out << format_query(q) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace selest
