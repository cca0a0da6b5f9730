#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selest/dataset.hpp"

namespace selest {

// A set of attributes together with how often they are all 1 in the data.
struct Itemset {
  std::vector<int32_t> attrs;  // nonempty, strictly increasing
  int64_t count = 0;
  double freq = 0.0;  // count / n

  int size() const { return static_cast<int>(attrs.size()); }
};

// All itemsets whose count reaches the mining threshold. Downward-closed:
// every nonempty subset of a member is a member.
struct ItemsetCollection {
  int64_t threshold = 1;
  int k = 0;
  int64_t n = 0;
  std::vector<Itemset> items;  // ordered by size, then lexicographically
};

// Levelwise mining: candidates of size L are joins of frequent sets of size
// L-1, pruned when any subset is infrequent, counted by one scan per level.
ItemsetCollection mine_frequent(const SparseDataset& data, int64_t threshold);

// Members whose attributes all lie in `vars` (sorted ascending), in
// (size, lexicographic) order.
std::vector<Itemset> restrict_to(const ItemsetCollection& collection,
                                 const std::vector<int>& vars);

// Stored size in parameter units: one per attribute occurrence plus one
// count per itemset.
int64_t itemset_memory_cost(const ItemsetCollection& collection);

// Text format: header `T=<int> k=<int> n=<int>`, then `<count> : <i1> <i2> ...`
// per itemset. `#` starts a comment.
ItemsetCollection load_itemsets(const std::string& path);
void save_itemsets(const ItemsetCollection& collection, const std::string& path);

}  // namespace selest
