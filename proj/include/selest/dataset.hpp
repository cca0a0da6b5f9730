#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace selest {

struct BooleanQuery;

// Thrown on malformed input files; carries the offending line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A table of n rows over k binary attributes. Each row stores the strictly
// increasing indices of the attributes that are 1; everything else is 0.
struct SparseDataset {
  int k = 0;
  std::vector<std::vector<int32_t>> rows;

  int64_t n() const { return static_cast<int64_t>(rows.size()); }
  bool cell(size_t row, int attr) const;  // value of one attribute in one row
};

// Text format: header `k=<int>`, then one row per line as increasing
// attribute indices. A row with no set attributes is a single `.`.
// `#` starts a comment.
SparseDataset load_dataset(const std::string& path);
SparseDataset parse_dataset(std::istream& in, const std::string& source_name);
void save_dataset(const SparseDataset& data, const std::string& path);

// Draws n independent rows. Attributes outside all blocks are independent
// Bernoulli(base_density). Each block shares a per-row latent event that
// lifts within-block co-occurrence above the independent level while keeping
// every univariate marginal at base_density; strength 0 recovers full
// independence, strength 1 makes a block all-or-none.
SparseDataset generate_synthetic(int k, int64_t n, double base_density,
                                 const std::vector<std::vector<int>>& correlation_blocks,
                                 double block_strength, uint64_t seed);

struct DatasetStats {
  int k = 0;
  int64_t n = 0;
  int64_t total_ones = 0;
  double mean_ones_per_row = 0.0;
  double std_ones_per_row = 0.0;  // population standard deviation
  int max_ones_per_row = 0;
  std::vector<double> marginal;  // per-attribute fraction of rows with a 1
};

DatasetStats compute_stats(const SparseDataset& data);

// Number of rows satisfying the query. This is the full-scan ground truth
// every model is measured against.
int64_t exact_count(const SparseDataset& data, const BooleanQuery& q);

}  // namespace selest
