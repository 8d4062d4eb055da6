// Copyright 2026 The actfs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ACTFS_DATASET_HPP_
#define ACTFS_DATASET_HPP_

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "actfs/random.hpp"

namespace actfs {

/// Malformed or unusable input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The label source gave up (interactive end-of-input).
class OracleAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Value = std::uint32_t;

/// Column-oriented categorical table. Every stored value of feature j lies in
/// [0, alphabet(j)); the optional label column holds 0/1.
class QuantizedDataset {
 public:
  QuantizedDataset() = default;

  QuantizedDataset(std::vector<std::vector<Value>> columns, std::vector<std::size_t> alphabets,
                   std::vector<std::string> names = {}, std::optional<std::vector<int>> labels = std::nullopt)
      : columns_(std::move(columns)), alphabets_(std::move(alphabets)), names_(std::move(names)),
        labels_(std::move(labels)) {
    if (columns_.size() != alphabets_.size()) throw DataError("dataset: one alphabet size per column required");
    if (columns_.empty()) throw DataError("dataset: no feature columns");
    rows_ = columns_.front().size();
    if (rows_ == 0) throw DataError("dataset: no rows");
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      if (columns_[j].size() != rows_) throw DataError("dataset: columns differ in length");
      if (alphabets_[j] == 0) throw DataError("dataset: empty alphabet");
      for (Value v : columns_[j])
        if (v >= alphabets_[j]) throw DataError("dataset: value index outside alphabet");
    }
    if (names_.empty())
      for (std::size_t j = 0; j < columns_.size(); ++j) names_.push_back("f" + std::to_string(j));
    if (names_.size() != columns_.size()) throw DataError("dataset: one name per column required");
    if (labels_) {
      if (labels_->size() != rows_) throw DataError("dataset: label column length mismatch");
      for (int y : *labels_)
        if (y != 0 && y != 1) throw DataError("dataset: labels must be 0 or 1");
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t features() const noexcept { return columns_.size(); }
  std::size_t alphabet(std::size_t j) const { return alphabets_.at(j); }
  Value at(std::size_t row, std::size_t j) const { return columns_[j][row]; }
  const std::vector<Value>& column(std::size_t j) const { return columns_.at(j); }
  const std::string& name(std::size_t j) const { return names_.at(j); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  bool has_labels() const noexcept { return labels_.has_value(); }
  const std::vector<int>& labels() const {
    if (!labels_) throw DataError("dataset: no ground-truth labels");
    return *labels_;
  }

 private:
  std::size_t rows_ = 0;
  std::vector<std::vector<Value>> columns_;
  std::vector<std::size_t> alphabets_;
  std::vector<std::string> names_;
  std::optional<std::vector<int>> labels_;
};

/// p(j, v): empirical probability of value v in feature j.
using MarginalTable = std::vector<std::vector<double>>;

inline MarginalTable marginals(const QuantizedDataset& ds) {
  MarginalTable p(ds.features());
  const double m = static_cast<double>(ds.rows());
  for (std::size_t j = 0; j < ds.features(); ++j) {
    std::vector<std::size_t> counts(ds.alphabet(j), 0);
    for (Value v : ds.column(j)) ++counts[v];
    p[j].resize(counts.size());
    for (std::size_t v = 0; v < counts.size(); ++v) p[j][v] = static_cast<double>(counts[v]) / m;
  }
  return p;
}

/// Joint value counts of a feature pair over the full sample, row-major in
/// (v1, v2).
struct PairTable {
  std::size_t first = 0;
  std::size_t second = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  double probability(Value v1, Value v2) const {
    return static_cast<double>(counts[v1 * cols + v2]) / static_cast<double>(total);
  }
};

inline PairTable pair_table(const QuantizedDataset& ds, std::size_t j1, std::size_t j2) {
  if (j1 == j2) throw std::invalid_argument("pair_table: features must differ");
  PairTable t{j1, j2, ds.alphabet(j2), std::vector<std::size_t>(ds.alphabet(j1) * ds.alphabet(j2), 0), ds.rows()};
  const auto& a = ds.column(j1);
  const auto& b = ds.column(j2);
  for (std::size_t i = 0; i < ds.rows(); ++i) ++t.counts[a[i] * t.cols + b[i]];
  return t;
}

inline double pair_probability(const QuantizedDataset& ds, std::size_t j1, std::size_t j2, Value v1, Value v2) {
  if (j1 == j2) throw std::invalid_argument("pair_probability: features must differ");
  if (v1 >= ds.alphabet(j1) || v2 >= ds.alphabet(j2)) throw std::out_of_range("pair_probability: value index");
  std::size_t hits = 0;
  const auto& a = ds.column(j1);
  const auto& b = ds.column(j2);
  for (std::size_t i = 0; i < ds.rows(); ++i) hits += (a[i] == v1 && b[i] == v2);
  return static_cast<double>(hits) / static_cast<double>(ds.rows());
}

/// Lazily built full-sample pair tables, keyed by ordered feature pair.
class PairTableCache {
 public:
  explicit PairTableCache(const QuantizedDataset& ds) : ds_(&ds) {}

  const PairTable& get(std::size_t j1, std::size_t j2) {
    const auto key = std::make_pair(j1, j2);
    auto it = tables_.find(key);
    if (it == tables_.end()) it = tables_.emplace(key, pair_table(*ds_, j1, j2)).first;
    return it->second;
  }

 private:
  const QuantizedDataset* ds_;
  std::map<std::pair<std::size_t, std::size_t>, PairTable> tables_;
};

// ---------------------------------------------------------------------------
// CSV ingestion.

namespace detail {

// RFC 4180: quoted fields may hold commas, doubled quotes and line breaks.
inline std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"': quoted = true; break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        break;
      case '\r': break;
      case '\n':
        row.push_back(std::move(field));
        field.clear();
        if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
        row.clear();
        any = false;
        break;
      default: field.push_back(c);
    }
  }
  if (quoted) throw DataError("csv: unterminated quoted field");
  if (any) {
    row.push_back(std::move(field));
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
  }
  return rows;
}

inline std::optional<double> parse_number(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return std::nullopt;
  double x = 0.0;
  const char* first = s.data() + b;
  const char* last = s.data() + e + 1;
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return x;
}

struct EncodedColumn {
  std::vector<Value> values;
  std::size_t alphabet = 0;
};

// Distinct values in sorted order become 0, 1, ... (numeric order for numeric
// columns, lexicographic otherwise).
inline EncodedColumn encode_categorical(const std::vector<std::string>& cells, bool numeric) {
  EncodedColumn out;
  out.values.resize(cells.size());
  if (numeric) {
    std::map<double, Value> index;
    for (const auto& c : cells) index.emplace(*parse_number(c), 0);
    Value next = 0;
    for (auto& [k, v] : index) v = next++;
    for (std::size_t i = 0; i < cells.size(); ++i) out.values[i] = index.at(*parse_number(cells[i]));
    out.alphabet = index.size();
  } else {
    std::map<std::string, Value> index;
    for (const auto& c : cells) index.emplace(c, 0);
    Value next = 0;
    for (auto& [k, v] : index) v = next++;
    for (std::size_t i = 0; i < cells.size(); ++i) out.values[i] = index.at(cells[i]);
    out.alphabet = index.size();
  }
  return out;
}

}  // namespace detail

/// Equal-frequency binning. Rank r of m (ascending, stable) falls in bin
/// floor(r * bins / m); tied values all take the bin of their lowest rank.
/// Bins left empty by ties are dropped and the rest renumbered.
inline detail::EncodedColumn equal_frequency_bins(const std::vector<double>& xs, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("equal_frequency_bins: bins must be positive");
  const std::size_t m = xs.size();
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<std::size_t> raw(m);
  std::size_t current = 0;
  for (std::size_t r = 0; r < m; ++r) {
    if (r == 0 || xs[order[r]] != xs[order[r - 1]]) current = r * bins / m;
    raw[order[r]] = current;
  }
  std::vector<std::size_t> remap(bins, bins);
  for (std::size_t b : raw) remap[b] = 0;
  Value next = 0;
  for (auto& r : remap)
    if (r != bins) r = next++;
  detail::EncodedColumn out;
  out.alphabet = next;
  out.values.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.values[i] = static_cast<Value>(remap[raw[i]]);
  return out;
}

struct CsvOptions {
  std::optional<std::string> label_column;
  std::size_t bins = 5;
};

inline QuantizedDataset load_csv(std::istream& in, const CsvOptions& opt) {
  if (opt.bins == 0) throw std::invalid_argument("load_csv: bins must be positive");
  auto rows = detail::parse_csv(in);
  if (rows.size() < 2) throw DataError("csv: empty table");
  const auto header = rows.front();
  const std::size_t width = header.size();
  for (std::size_t r = 1; r < rows.size(); ++r)
    if (rows[r].size() != width)
      throw DataError("csv: ragged row " + std::to_string(r + 1) + " (" + std::to_string(rows[r].size()) +
                      " fields, expected " + std::to_string(width) + ")");
  const std::size_t m = rows.size() - 1;

  std::optional<std::size_t> label_idx;
  if (opt.label_column) {
    auto it = std::find(header.begin(), header.end(), *opt.label_column);
    if (it == header.end()) throw DataError("csv: no column named '" + *opt.label_column + "'");
    label_idx = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<std::vector<Value>> columns;
  std::vector<std::size_t> alphabets;
  std::vector<std::string> names;
  std::optional<std::vector<int>> labels;
  for (std::size_t c = 0; c < width; ++c) {
    std::vector<std::string> cells(m);
    bool numeric = true;
    for (std::size_t r = 0; r < m; ++r) {
      cells[r] = rows[r + 1][c];
      if (cells[r].find_first_not_of(" \t") == std::string::npos)
        throw DataError("csv: missing value in column '" + header[c] + "' row " + std::to_string(r + 2));
      numeric = numeric && detail::parse_number(cells[r]).has_value();
    }
    if (label_idx && c == *label_idx) {
      auto enc = detail::encode_categorical(cells, numeric);
      if (enc.alphabet != 2)
        throw DataError("csv: label column '" + header[c] + "' has " + std::to_string(enc.alphabet) +
                        " distinct values, expected 2");
      labels.emplace(enc.values.begin(), enc.values.end());
      continue;
    }
    detail::EncodedColumn enc;
    if (numeric) {
      std::vector<double> xs(m);
      for (std::size_t r = 0; r < m; ++r) xs[r] = *detail::parse_number(cells[r]);
      const std::size_t distinct = std::set<double>(xs.begin(), xs.end()).size();
      enc = distinct > opt.bins ? equal_frequency_bins(xs, opt.bins) : detail::encode_categorical(cells, true);
    } else {
      enc = detail::encode_categorical(cells, false);
    }
    columns.push_back(std::move(enc.values));
    alphabets.push_back(enc.alphabet);
    names.push_back(header[c]);
  }
  if (columns.empty()) throw DataError("csv: no feature columns");
  return QuantizedDataset(std::move(columns), std::move(alphabets), std::move(names), std::move(labels));
}

inline QuantizedDataset load_csv(const std::string& path, const CsvOptions& opt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("csv: cannot open '" + path + "'");
  return load_csv(in, opt);
}

/// Writes a dataset (and its labels, as column "label") back out as CSV of
/// value indices.
inline void write_csv(std::ostream& out, const QuantizedDataset& ds) {
  for (std::size_t j = 0; j < ds.features(); ++j) out << (j ? "," : "") << ds.name(j);
  if (ds.has_labels()) out << ",label";
  out << '\n';
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (std::size_t j = 0; j < ds.features(); ++j) out << (j ? "," : "") << ds.at(i, j);
    if (ds.has_labels()) out << ',' << ds.labels()[i];
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Synthetic data.

/// d binary features with uniform independent values; the label depends on
/// `informative` only, with P[Y = 1 | X(informative) = v] = q[v].
inline QuantizedDataset planted_dataset(std::size_t m, std::size_t d, std::size_t informative,
                                        const std::vector<double>& q, std::uint64_t seed) {
  if (informative >= d) throw std::invalid_argument("planted_dataset: informative feature out of range");
  if (q.size() != 2) throw std::invalid_argument("planted_dataset: informative feature is binary");
  Rng rng(seed);
  std::vector<std::vector<Value>> cols(d, std::vector<Value>(m));
  std::vector<int> labels(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < d; ++j) cols[j][i] = static_cast<Value>(rng() >> 63);
    labels[i] = bernoulli(rng, q[cols[informative][i]]);
  }
  return QuantizedDataset(std::move(cols), std::vector<std::size_t>(d, 2), {}, std::move(labels));
}

// ---------------------------------------------------------------------------
// Label oracles. Every variant answers a repeated query with the same label.

/// Returns the stored ground-truth label.
class DatasetOracle {
 public:
  explicit DatasetOracle(const QuantizedDataset& ds) : labels_(&ds.labels()) {}
  int query(std::size_t index) { return labels_->at(index); }

 private:
  const std::vector<int>* labels_;
};

/// Draws Y | X(feature) = v ~ Bernoulli(q[v]) once per example and caches it.
class SyntheticOracle {
 public:
  SyntheticOracle(const QuantizedDataset& ds, std::size_t feature, std::vector<double> q, std::uint64_t seed)
      : ds_(&ds), feature_(feature), q_(std::move(q)), rng_(seed) {
    if (feature_ >= ds.features()) throw std::invalid_argument("SyntheticOracle: feature out of range");
    if (q_.size() != ds.alphabet(feature_)) throw std::invalid_argument("SyntheticOracle: one q per value required");
    for (double x : q_)
      if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("SyntheticOracle: q outside [0, 1]");
  }

  int query(std::size_t index) {
    if (index >= ds_->rows()) throw std::out_of_range("SyntheticOracle: index");
    auto it = cache_.find(index);
    if (it != cache_.end()) return it->second;
    const int y = bernoulli(rng_, q_[ds_->at(index, feature_)]);
    cache_.emplace(index, y);
    return y;
  }

 private:
  const QuantizedDataset* ds_;
  std::size_t feature_;
  std::vector<double> q_;
  Rng rng_;
  std::unordered_map<std::size_t, int> cache_;
};

/// Asks a human. Prompts name the (1-based) data row; answers other than 0 or
/// 1 are re-prompted and end of input aborts.
class InteractiveOracle {
 public:
  InteractiveOracle(std::istream& in, std::ostream& out) : in_(&in), out_(&out) {}

  int query(std::size_t index) {
    auto it = cache_.find(index);
    if (it != cache_.end()) return it->second;
    std::string line;
    for (;;) {
      *out_ << "Label for row " << index + 1 << " (0 or 1): " << std::flush;
      if (!std::getline(*in_, line)) throw OracleAborted("interactive oracle: end of input");
      const auto b = line.find_first_not_of(" \t\r");
      const auto e = line.find_last_not_of(" \t\r");
      const std::string answer = b == std::string::npos ? "" : line.substr(b, e - b + 1);
      if (answer == "0" || answer == "1") {
        const int y = answer[0] - '0';
        *out_ << "row " << index + 1 << " recorded as " << y << '\n';
        transcript_.push_back("row " + std::to_string(index + 1) + " -> " + std::to_string(y));
        cache_.emplace(index, y);
        return y;
      }
      *out_ << "please answer 0 or 1\n";
    }
  }

  const std::vector<std::string>& transcript() const noexcept { return transcript_; }

 private:
  std::istream* in_;
  std::ostream* out_;
  std::unordered_map<std::size_t, int> cache_;
  std::vector<std::string> transcript_;
};

/// Any of the oracle variants behind one query interface.
class LabelOracle {
 public:
  LabelOracle(DatasetOracle o) : impl_(std::move(o)) {}
  LabelOracle(SyntheticOracle o) : impl_(std::move(o)) {}
  LabelOracle(InteractiveOracle o) : impl_(std::move(o)) {}

  int query(std::size_t index) {
    return std::visit([index](auto& o) { return o.query(index); }, impl_);
  }

  template <typename T>
  const T* as() const noexcept {
    return std::get_if<T>(&impl_);
  }

 private:
  std::variant<DatasetOracle, SyntheticOracle, InteractiveOracle> impl_;
};

}  // namespace actfs

#endif  // ACTFS_DATASET_HPP_
