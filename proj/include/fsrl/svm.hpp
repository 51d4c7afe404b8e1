#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fsrl/feature_subset.hpp"
#include "fsrl/matrix.hpp"

namespace fsrl::svm {

struct SvmConfig {
  double c = 1.0;
  // Gaussian kernel width; empty resolves to 1/d for d training columns.
  std::optional<double> kernel_gamma;
  double tolerance = 1e-3;
  // Consecutive sweeps without an update before training stops.
  int max_passes = 10;
  // Hard cap on coefficient-pair updates; empty resolves to min(10*n^2, 1e6).
  std::optional<std::uint64_t> max_iterations;
};

// Soft-margin Gaussian-kernel SVM in dual form. dual_coefs[i] is alpha_i*y_i
// for support vector i, so the decision function is
// sum_i dual_coefs[i] * exp(-gamma*||sv_i - x||^2) + bias.
struct SvmModel {
  Matrix support_vectors;
  std::vector<double> dual_coefs;
  double bias = 0.0;
  double kernel_gamma = 0.0;
  double c = 0.0;
  // Which dataset columns the training matrix was sliced from; train() sets
  // the identity subset, callers slicing columns overwrite it.
  FeatureSubset active_features;
  bool converged = true;
};

double gaussian_kernel(std::span<const double> u, std::span<const double> v, double gamma);

// Sequential minimal optimization. The seed drives only the fallback scan
// origin when the max-|E_i - E_j| partner heuristic makes no progress.
// Non-convergence within the iteration caps yields a best-effort model with
// converged = false rather than an error.
SvmModel train(const Matrix& features, const std::vector<int>& labels,
               const SvmConfig& config, std::uint64_t seed);

std::vector<double> decision_function(const SvmModel& model, const Matrix& features);

// sign(decision), with sign(0) = +1.
std::vector<int> predict(const SvmModel& model, const Matrix& features);

double accuracy(const SvmModel& model, const Matrix& features, const std::vector<int>& labels);

}  // namespace fsrl::svm
