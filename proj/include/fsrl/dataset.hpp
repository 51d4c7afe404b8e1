#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fsrl/matrix.hpp"

namespace fsrl {

// Binary-classification table: finite features, labels mapped to -1/+1,
// unique column-aligned feature names.
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  // Original label values in mapping order: label_values[0] -> -1,
  // label_values[1] -> +1.
  std::array<std::string, 2> label_values{"-1", "1"};

  std::size_t n_samples() const { return features.rows(); }
  std::size_t n_features() const { return features.cols(); }
};

// Stratified fold assignment: fold_of[i] is the fold of sample i.
struct FoldPlan {
  std::vector<int> fold_of;
  int fold_count = 0;

  std::vector<std::size_t> fold_members(int fold) const;
};

// Per-column location/scale fitted on some rows. Population (divide-by-n)
// convention; constant columns keep std_dev 0 and are flagged.
struct StandardizationParams {
  std::vector<double> means;
  std::vector<double> std_devs;
  std::vector<std::uint8_t> is_constant;
};

// Throws std::invalid_argument describing the first violated invariant.
void validate_dataset(const Dataset& data);

// CSV with a header row; label column chosen by name, or the last column
// when label_column is "last". Label values are mapped to -1/+1: numeric
// labels by value, otherwise lexicographically.
Dataset load_csv(const std::string& path, const std::string& label_column = "last");

// Export in the load_csv schema (header, then rows; labels as -1/1).
void write_csv(const Dataset& data, std::ostream& out);

StandardizationParams fit_standardization(const Matrix& x);
Matrix apply_standardization(const Matrix& x, const StandardizationParams& params);
Matrix invert_standardization(const Matrix& x, const StandardizationParams& params);

// Standardize every column of the dataset in place (constant columns become
// all-zero) and return the fitted parameters for reuse on held-out rows.
std::pair<Dataset, StandardizationParams> standardize(const Dataset& data);

// Stratified k-fold split, deterministic per seed. Requires
// 2 <= folds <= minority class count.
FoldPlan make_folds(const Dataset& data, int folds, std::uint64_t seed);

// Seeded two-class Gaussian data: the first n_informative columns carry
// class-conditional means two within-class standard deviations apart, the
// remaining n_noise columns are label-independent noise.
Dataset generate_synthetic(std::size_t n_samples, std::size_t n_informative,
                           std::size_t n_noise, std::uint64_t seed);

}  // namespace fsrl
