#include "selest/itemsets.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "text_util.hpp"

namespace selest {

namespace {

bool row_contains(const std::vector<int32_t>& row, const std::vector<int32_t>& attrs) {
  auto it = row.begin();
  for (int32_t a : attrs) {
    it = std::lower_bound(it, row.end(), a);
    if (it == row.end() || *it != a) return false;
    ++it;
  }
  return true;
}

}  // namespace

ItemsetCollection mine_frequent(const SparseDataset& data, int64_t threshold) {
  if (threshold < 1) throw std::invalid_argument("mining threshold must be at least 1");
  if (data.n() == 0) throw std::invalid_argument("cannot mine an empty dataset");

  ItemsetCollection coll;
  coll.threshold = threshold;
  coll.k = data.k;
  coll.n = data.n();

  const bool narrow = data.k <= 64;
  std::vector<uint64_t> row_bits;
  if (narrow) {
    row_bits.reserve(data.rows.size());
    for (const auto& row : data.rows) {
      uint64_t bits = 0;
      for (int32_t a : row) bits |= uint64_t(1) << a;
      row_bits.push_back(bits);
    }
  }

  std::vector<int64_t> single(data.k, 0);
  for (const auto& row : data.rows)
    for (int32_t a : row) ++single[a];

  std::vector<std::vector<int32_t>> level;
  for (int a = 0; a < data.k; ++a) {
    if (single[a] >= threshold) {
      level.push_back({static_cast<int32_t>(a)});
      coll.items.push_back({{static_cast<int32_t>(a)}, single[a],
                            static_cast<double>(single[a]) / static_cast<double>(coll.n)});
    }
  }

  while (level.size() >= 2) {
    // Prefix join: two frequent L-sets sharing their first L-1 items form an
    // (L+1)-candidate; drop it if any L-subset is missing.
    std::set<std::vector<int32_t>> frequent_prev(level.begin(), level.end());
    std::vector<std::vector<int32_t>> candidates;
    for (size_t i = 0; i < level.size(); ++i) {
      for (size_t j = i + 1; j < level.size(); ++j) {
        const auto& a = level[i];
        const auto& b = level[j];
        if (!std::equal(a.begin(), a.end() - 1, b.begin(), b.end() - 1)) continue;
        std::vector<int32_t> cand = a;
        cand.push_back(b.back());
        bool keep = true;
        std::vector<int32_t> sub(cand.begin() + 1, cand.end());
        for (size_t drop = 0; keep && drop < cand.size(); ++drop) {
          if (drop) sub[drop - 1] = cand[drop - 1];
          keep = frequent_prev.count(sub) > 0;
        }
        if (keep) candidates.push_back(std::move(cand));
      }
    }
    if (candidates.empty()) break;
    std::sort(candidates.begin(), candidates.end());

    std::vector<int64_t> counts(candidates.size(), 0);
    if (narrow) {
      std::vector<uint64_t> cand_bits(candidates.size());
      for (size_t c = 0; c < candidates.size(); ++c) {
        uint64_t bits = 0;
        for (int32_t a : candidates[c]) bits |= uint64_t(1) << a;
        cand_bits[c] = bits;
      }
      for (uint64_t bits : row_bits)
        for (size_t c = 0; c < candidates.size(); ++c)
          counts[c] += (bits & cand_bits[c]) == cand_bits[c];
    } else {
      for (const auto& row : data.rows)
        for (size_t c = 0; c < candidates.size(); ++c)
          counts[c] += row_contains(row, candidates[c]);
    }

    level.clear();
    for (size_t c = 0; c < candidates.size(); ++c) {
      if (counts[c] < threshold) continue;
      level.push_back(candidates[c]);
      coll.items.push_back({std::move(candidates[c]), counts[c],
                            static_cast<double>(counts[c]) / static_cast<double>(coll.n)});
    }
  }
  return coll;
}

std::vector<Itemset> restrict_to(const ItemsetCollection& collection,
                                 const std::vector<int>& vars) {
  std::vector<Itemset> out;
  for (const auto& item : collection.items) {
    bool inside = true;
    for (int32_t a : item.attrs)
      inside = inside && std::binary_search(vars.begin(), vars.end(), static_cast<int>(a));
    if (inside) out.push_back(item);
  }
  std::sort(out.begin(), out.end(), [](const Itemset& a, const Itemset& b) {
    if (a.attrs.size() != b.attrs.size()) return a.attrs.size() < b.attrs.size();
    return a.attrs < b.attrs;
  });
  return out;
}

int64_t itemset_memory_cost(const ItemsetCollection& collection) {
  int64_t cost = static_cast<int64_t>(collection.items.size());
  for (const auto& item : collection.items) cost += item.size();
  return cost;
}

ItemsetCollection load_itemsets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open itemset file: " + path);
  ItemsetCollection coll;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    size_t hash = body.find('#');
    if (hash != std::string_view::npos) body = body.substr(0, hash);
    body = detail::trim(body);
    if (body.empty()) continue;
    if (!have_header) {
      int64_t t = -1, k = -1, n = -1;
      for (std::string_view tok : detail::split_ws(body)) {
        if (tok.substr(0, 2) == "T=") t = detail::parse_int(tok.substr(2)).value_or(-1);
        else if (tok.substr(0, 2) == "k=") k = detail::parse_int(tok.substr(2)).value_or(-1);
        else if (tok.substr(0, 2) == "n=") n = detail::parse_int(tok.substr(2)).value_or(-1);
        else throw ParseError(path, line_no, "unexpected header token '" + std::string(tok) + "'");
      }
      if (t < 1 || k < 1 || n < 1)
        throw ParseError(path, line_no, "expected header T=<int> k=<int> n=<int>");
      coll.threshold = t;
      coll.k = static_cast<int>(k);
      coll.n = n;
      have_header = true;
      continue;
    }
    size_t colon = body.find(':');
    if (colon == std::string_view::npos)
      throw ParseError(path, line_no, "expected '<count> : <attrs>'");
    auto count = detail::parse_int(body.substr(0, colon));
    if (!count || *count < 1) throw ParseError(path, line_no, "invalid count");
    if (*count > coll.n) throw ParseError(path, line_no, "count exceeds row count");
    Itemset item;
    item.count = *count;
    item.freq = static_cast<double>(*count) / static_cast<double>(coll.n);
    for (std::string_view tok : detail::split_ws(body.substr(colon + 1))) {
      auto v = detail::parse_int(tok);
      if (!v) throw ParseError(path, line_no, "non-integer attribute '" + std::string(tok) + "'");
      if (*v < 0 || *v >= coll.k) throw ParseError(path, line_no, "attribute out of range");
      if (!item.attrs.empty() && item.attrs.back() >= *v)
        throw ParseError(path, line_no, "attributes not strictly increasing");
      item.attrs.push_back(static_cast<int32_t>(*v));
    }
    if (item.attrs.empty()) throw ParseError(path, line_no, "itemset has no attributes");
    coll.items.push_back(std::move(item));
  }
  if (!have_header) throw ParseError(path, line_no, "missing header");
  std::sort(coll.items.begin(), coll.items.end(), [](const Itemset& a, const Itemset& b) {
    if (a.attrs.size() != b.attrs.size()) return a.attrs.size() < b.attrs.size();
    return a.attrs < b.attrs;
  });
  return coll;
}

void save_itemsets(const ItemsetCollection& collection, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write itemset file: " + path);
  out << "T=" << collection.threshold << " k=" << collection.k << " n=" << collection.n << "\n";
  for (const auto& item : collection.items) {
    out << item.count << " :";
    for (int32_t a : item.attrs) out << ' ' << a;
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace selest
