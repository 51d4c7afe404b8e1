#include "fsrl/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "fsrl/feature_subset.hpp"
#include "fsrl/num_format.hpp"
#include "fsrl/rng.hpp"

namespace fsrl {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

bool parse_double(const std::string& cell, double& out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end && !cell.empty();
}

}  // namespace

std::vector<std::size_t> FoldPlan::fold_members(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

void validate_dataset(const Dataset& data) {
  const std::size_t n = data.n_samples();
  const std::size_t d = data.n_features();
  if (n < 2) throw std::invalid_argument("dataset: need at least 2 samples, got " + std::to_string(n));
  if (d < 1) throw std::invalid_argument("dataset: need at least 1 feature");
  if (data.labels.size() != n) throw std::invalid_argument("dataset: label count does not match row count");
  if (data.feature_names.size() != d) {
    throw std::invalid_argument("dataset: feature name count does not match column count");
  }
  std::unordered_set<std::string> names(data.feature_names.begin(), data.feature_names.end());
  if (names.size() != d) throw std::invalid_argument("dataset: duplicate feature names");
  bool has_pos = false;
  bool has_neg = false;
  for (int y : data.labels) {
    if (y == 1) has_pos = true;
    else if (y == -1) has_neg = true;
    else throw std::invalid_argument("dataset: labels must be -1 or +1");
  }
  if (!has_pos || !has_neg) throw std::invalid_argument("dataset: both classes must be present");
  for (double v : data.features.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite feature value");
  }
}

Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file, expected a header row");
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2) {
    throw std::runtime_error(path + ": header must name at least one feature and a label column");
  }

  std::size_t label_idx;
  if (label_column == "last") {
    label_idx = header.size() - 1;
  } else {
    auto it = std::find(header.begin(), header.end(), label_column);
    if (it == header.end()) {
      throw std::runtime_error(path + ": label column '" + label_column + "' not found in header");
    }
    label_idx = static_cast<std::size_t>(it - header.begin());
  }

  Dataset data;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j != label_idx) data.feature_names.push_back(header[j]);
  }
  const std::size_t d = data.feature_names.size();
  {
    std::unordered_set<std::string> names(data.feature_names.begin(), data.feature_names.end());
    if (names.size() != d) throw std::runtime_error(path + ": duplicate feature names in header");
  }

  std::vector<double> values;
  std::vector<std::string> raw_labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(header.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j == label_idx) {
        raw_labels.push_back(cells[j]);
        continue;
      }
      double v;
      if (!parse_double(cells[j], v)) {
        throw std::runtime_error(path + ": line " + std::to_string(line_no) + ", column '" +
                                 header[j] + "': cannot parse '" + cells[j] + "' as a number");
      }
      if (!std::isfinite(v)) {
        throw std::runtime_error(path + ": line " + std::to_string(line_no) + ", column '" +
                                 header[j] + "': non-finite value");
      }
      values.push_back(v);
    }
  }

  const std::size_t n = raw_labels.size();
  if (n < 2) throw std::runtime_error(path + ": need at least 2 data rows, got " + std::to_string(n));

  // Two distinct label values, mapped to -1/+1: numerically when both parse
  // as numbers, lexicographically otherwise.
  std::set<std::string> distinct(raw_labels.begin(), raw_labels.end());
  if (distinct.size() > 2) {
    throw std::runtime_error(path + ": label column has " + std::to_string(distinct.size()) +
                             " distinct values, expected exactly 2");
  }
  if (distinct.size() < 2) {
    throw std::runtime_error(path + ": label column has a single class; both classes are required");
  }
  std::array<std::string, 2> order{*distinct.begin(), *std::next(distinct.begin())};
  double a, b;
  if (parse_double(order[0], a) && parse_double(order[1], b) && a > b) {
    std::swap(order[0], order[1]);
  }
  data.label_values = order;

  data.features = Matrix(n, d);
  std::copy(values.begin(), values.end(), data.features.data().begin());
  data.labels.reserve(n);
  for (const std::string& s : raw_labels) data.labels.push_back(s == order[0] ? -1 : 1);

  validate_dataset(data);
  return data;
}

void write_csv(const Dataset& data, std::ostream& out) {
  for (const std::string& name : data.feature_names) out << name << ',';
  out << "label\n";
  for (std::size_t i = 0; i < data.n_samples(); ++i) {
    for (std::size_t j = 0; j < data.n_features(); ++j) {
      out << format_double(data.features(i, j)) << ',';
    }
    out << data.labels[i] << '\n';
  }
}

StandardizationParams fit_standardization(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  StandardizationParams p;
  p.means.assign(d, 0.0);
  p.std_devs.assign(d, 0.0);
  p.is_constant.assign(d, 0);
  if (n == 0) return p;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = x.row(i);
    for (std::size_t j = 0; j < d; ++j) p.means[j] += row[j];
  }
  for (std::size_t j = 0; j < d; ++j) p.means[j] /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = x.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double delta = row[j] - p.means[j];
      p.std_devs[j] += delta * delta;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    p.std_devs[j] = std::sqrt(p.std_devs[j] / static_cast<double>(n));
    if (p.std_devs[j] == 0.0) p.is_constant[j] = 1;
  }
  return p;
}

Matrix apply_standardization(const Matrix& x, const StandardizationParams& params) {
  Matrix out = x;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < out.cols(); ++j) {
      row[j] = params.is_constant[j] ? 0.0 : (row[j] - params.means[j]) / params.std_devs[j];
    }
  }
  return out;
}

Matrix invert_standardization(const Matrix& x, const StandardizationParams& params) {
  Matrix out = x;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < out.cols(); ++j) {
      row[j] = row[j] * params.std_devs[j] + params.means[j];
    }
  }
  return out;
}

std::pair<Dataset, StandardizationParams> standardize(const Dataset& data) {
  StandardizationParams params = fit_standardization(data.features);
  Dataset out = data;
  out.features = apply_standardization(data.features, params);
  return {std::move(out), std::move(params)};
}

FoldPlan make_folds(const Dataset& data, int folds, std::uint64_t seed) {
  const std::size_t n = data.n_samples();
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < n; ++i) (data.labels[i] == 1 ? pos : neg).push_back(i);
  const std::size_t minority = std::min(pos.size(), neg.size());
  if (folds < 2) throw std::invalid_argument("make_folds: fold count must be at least 2");
  if (static_cast<std::size_t>(folds) > minority) {
    throw std::invalid_argument("make_folds: " + std::to_string(folds) +
                                " folds exceed the minority class count of " +
                                std::to_string(minority));
  }

  FoldPlan plan;
  plan.fold_count = folds;
  plan.fold_of.assign(n, 0);
  std::mt19937_64 rng(derive_seed(seed, "folds.shuffle"));
  for (std::vector<std::size_t>* cls : {&neg, &pos}) {
    std::shuffle(cls->begin(), cls->end(), rng);
    const int offset = static_cast<int>(rng() % static_cast<std::uint64_t>(folds));
    for (std::size_t k = 0; k < cls->size(); ++k) {
      plan.fold_of[(*cls)[k]] = static_cast<int>((k + offset) % static_cast<std::size_t>(folds));
    }
  }
  return plan;
}

Dataset generate_synthetic(std::size_t n_samples, std::size_t n_informative,
                           std::size_t n_noise, std::uint64_t seed) {
  if (n_informative < 1) throw std::invalid_argument("generate_synthetic: n_informative must be >= 1");
  if (n_samples < 20) throw std::invalid_argument("generate_synthetic: n_samples must be >= 20");
  const std::size_t d = n_informative + n_noise;
  if (d > FeatureSubset::kMaxFeatures) {
    throw std::invalid_argument("generate_synthetic: too many features");
  }

  Dataset data;
  data.features = Matrix(n_samples, d);
  data.labels.assign(n_samples, -1);
  for (std::size_t j = 0; j < d; ++j) data.feature_names.push_back("f" + std::to_string(j));

  std::mt19937_64 rng(derive_seed(seed, "generator"));

  // Balanced labels in shuffled row order.
  for (std::size_t i = n_samples / 2; i < n_samples; ++i) data.labels[i] = 1;
  std::shuffle(data.labels.begin(), data.labels.end(), rng);

  // Informative columns: class-conditional means at -1/+1 with unit
  // within-class deviation (two-sigma separation). Noise columns are
  // standard normal, independent of the label.
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < n_samples; ++i) {
    auto row = data.features.row(i);
    const double mean = data.labels[i] == 1 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n_informative; ++j) row[j] = mean + gauss(rng);
    for (std::size_t j = n_informative; j < d; ++j) row[j] = gauss(rng);
  }

  validate_dataset(data);
  return data;
}

}  // namespace fsrl
