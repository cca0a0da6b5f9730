#include "selest/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "selest/query.hpp"
#include "selest/rng.hpp"
#include "text_util.hpp"

namespace selest {

bool SparseDataset::cell(size_t row, int attr) const {
  const auto& r = rows[row];
  return std::binary_search(r.begin(), r.end(), static_cast<int32_t>(attr));
}

SparseDataset parse_dataset(std::istream& in, const std::string& source_name) {
  SparseDataset data;
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
      if (body.substr(0, 2) != "k=")
        throw ParseError(source_name, line_no, "expected header k=<count>");
      auto k = detail::parse_int(body.substr(2));
      if (!k || *k < 1) throw ParseError(source_name, line_no, "invalid attribute count");
      data.k = static_cast<int>(*k);
      have_header = true;
      continue;
    }
    std::vector<int32_t> row;
    if (body == ".") {
      data.rows.push_back(std::move(row));
      continue;
    }
    for (std::string_view tok : detail::split_ws(body)) {
      auto v = detail::parse_int(tok);
      if (!v) throw ParseError(source_name, line_no, "non-integer token '" + std::string(tok) + "'");
      if (*v < 0 || *v >= data.k)
        throw ParseError(source_name, line_no,
                         "attribute index " + std::to_string(*v) + " out of [0, " +
                             std::to_string(data.k) + ")");
      if (!row.empty() && row.back() >= *v)
        throw ParseError(source_name, line_no, "indices not strictly increasing");
      row.push_back(static_cast<int32_t>(*v));
    }
    data.rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError(source_name, line_no, "missing header k=<count>");
  return data;
}

SparseDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  return parse_dataset(in, path);
}

void save_dataset(const SparseDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  out << "k=" << data.k << "\n";
  for (const auto& row : data.rows) {
    if (row.empty()) {
      out << ".\n";
      continue;
    }
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ' ';
      out << row[i];
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

SparseDataset generate_synthetic(int k, int64_t n, double base_density,
                                 const std::vector<std::vector<int>>& correlation_blocks,
                                 double block_strength, uint64_t seed) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (n < 0) throw std::invalid_argument("n must be nonnegative");
  if (!(base_density > 0.0 && base_density < 1.0))
    throw std::invalid_argument("base_density must lie in (0, 1)");
  if (!(block_strength >= 0.0 && block_strength <= 1.0))
    throw std::invalid_argument("block_strength must lie in [0, 1]");
  std::vector<int> block_of(k, -1);
  for (size_t b = 0; b < correlation_blocks.size(); ++b) {
    for (int a : correlation_blocks[b]) {
      if (a < 0 || a >= k) throw std::invalid_argument("block attribute out of range");
      if (block_of[a] != -1) throw std::invalid_argument("correlation blocks overlap");
      block_of[a] = static_cast<int>(b);
    }
  }

  // With latent z ~ Bernoulli(s·d) forcing the whole block on, the leftover
  // density d' keeps every marginal at exactly d.
  const double d = base_density;
  const double s = block_strength;
  const double p_latent = s * d;
  const double d_rest = d * (1.0 - s) / (1.0 - p_latent);

  Rng rng(seed);
  SparseDataset data;
  data.k = k;
  data.rows.reserve(static_cast<size_t>(n));
  std::vector<char> z(correlation_blocks.size(), 0);
  for (int64_t r = 0; r < n; ++r) {
    for (size_t b = 0; b < correlation_blocks.size(); ++b) z[b] = rng.bernoulli(p_latent);
    std::vector<int32_t> row;
    for (int a = 0; a < k; ++a) {
      const bool base = rng.bernoulli(block_of[a] == -1 ? d : d_rest);
      const bool on = block_of[a] != -1 && z[block_of[a]] ? true : base;
      if (on) row.push_back(a);
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

DatasetStats compute_stats(const SparseDataset& data) {
  if (data.n() == 0) throw std::invalid_argument("cannot summarize an empty dataset");
  DatasetStats st;
  st.k = data.k;
  st.n = data.n();
  st.marginal.assign(data.k, 0.0);
  double sum_sq = 0.0;
  for (const auto& row : data.rows) {
    st.total_ones += static_cast<int64_t>(row.size());
    st.max_ones_per_row = std::max(st.max_ones_per_row, static_cast<int>(row.size()));
    sum_sq += static_cast<double>(row.size()) * static_cast<double>(row.size());
    for (int32_t a : row) st.marginal[a] += 1.0;
  }
  const double n = static_cast<double>(st.n);
  st.mean_ones_per_row = static_cast<double>(st.total_ones) / n;
  sum_sq = sum_sq / n - st.mean_ones_per_row * st.mean_ones_per_row;
  st.std_ones_per_row = std::sqrt(std::max(0.0, sum_sq));
  for (double& m : st.marginal) m /= n;
  return st;
}

int64_t exact_count(const SparseDataset& data, const BooleanQuery& q) {
  for (int a : query_vars(q))
    if (a < 0 || a >= data.k) throw std::out_of_range("query attribute out of range");
  int64_t count = 0;
  for (const auto& row : data.rows) {
    auto value_of = [&](int a) { return std::binary_search(row.begin(), row.end(), a); };
    if (q.eval(value_of)) ++count;
  }
  return count;
}

}  // namespace selest
