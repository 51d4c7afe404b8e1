#include "fsrl/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include "fsrl/num_format.hpp"
#include "fsrl/rng.hpp"

namespace fsrl {

std::optional<SubsetEvaluation> EvalCache::lookup(const FeatureSubset& key) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    misses_.fetch_add(1);
    return std::nullopt;
  }
  hits_.fetch_add(1);
  return it->second;
}

SubsetEvaluation EvalCache::insert(const FeatureSubset& key, SubsetEvaluation value) {
  std::unique_lock lock(mutex_);
  auto [it, inserted] = entries_.try_emplace(key, std::move(value));
  return it->second;
}

std::size_t EvalCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::vector<SubsetEvaluation> EvalCache::entries_sorted() const {
  std::shared_lock lock(mutex_);
  std::vector<SubsetEvaluation> out;
  out.reserve(entries_.size());
  for (const auto& [key, value] : entries_) out.push_back(value);
  std::sort(out.begin(), out.end(), [](const SubsetEvaluation& a, const SubsetEvaluation& b) {
    return FeatureSubset::compare_bits(a.subset, b.subset) < 0;
  });
  return out;
}

namespace {

bool better_evaluation(const SubsetEvaluation& a, const SubsetEvaluation& b) {
  if (a.mean_accuracy != b.mean_accuracy) return a.mean_accuracy > b.mean_accuracy;
  if (a.subset.cardinality() != b.subset.cardinality()) {
    return a.subset.cardinality() < b.subset.cardinality();
  }
  return FeatureSubset::compare_bits(a.subset, b.subset) < 0;
}

}  // namespace

std::optional<SubsetEvaluation> EvalCache::best_entry() const {
  std::shared_lock lock(mutex_);
  const SubsetEvaluation* best = nullptr;
  for (const auto& [key, value] : entries_) {
    if (!best || better_evaluation(value, *best)) best = &value;
  }
  if (!best) return std::nullopt;
  return *best;
}

void EvalCache::dump_csv(std::ostream& out) const {
  out << "subset_hex,mean_accuracy,std_accuracy\n";
  for (const SubsetEvaluation& e : entries_sorted()) {
    out << e.subset.to_hex() << ',' << format_double(e.mean_accuracy) << ','
        << format_double(e.std_accuracy) << '\n';
  }
}

namespace {

SubsetEvaluation compute_evaluation(const Dataset& data, const FeatureSubset& subset,
                                    const FoldPlan& folds, const svm::SvmConfig& config,
                                    std::uint64_t seed) {
  SubsetEvaluation eval;
  eval.subset = subset;
  const std::size_t n = data.n_samples();
  const int fold_count = folds.fold_count;

  if (subset.cardinality() == 0) {
    std::size_t pos = 0;
    for (int y : data.labels) pos += y == 1;
    const double majority =
        static_cast<double>(std::max(pos, n - pos)) / static_cast<double>(n);
    eval.mean_accuracy = majority;
    eval.std_accuracy = 0.0;
    eval.fold_accuracies.assign(static_cast<std::size_t>(fold_count), majority);
    return eval;
  }

  const std::vector<std::size_t> cols = subset.indices();
  const std::uint64_t subset_seed = derive_seed(seed, subset.hash());

  eval.fold_accuracies.resize(static_cast<std::size_t>(fold_count));
  for (int f = 0; f < fold_count; ++f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < n; ++i) {
      (folds.fold_of[i] == f ? test_rows : train_rows).push_back(i);
    }

    Matrix train_x(train_rows.size(), cols.size());
    std::vector<int> train_y(train_rows.size());
    for (std::size_t r = 0; r < train_rows.size(); ++r) {
      for (std::size_t j = 0; j < cols.size(); ++j) {
        train_x(r, j) = data.features(train_rows[r], cols[j]);
      }
      train_y[r] = data.labels[train_rows[r]];
    }
    Matrix test_x(test_rows.size(), cols.size());
    std::vector<int> test_y(test_rows.size());
    for (std::size_t r = 0; r < test_rows.size(); ++r) {
      for (std::size_t j = 0; j < cols.size(); ++j) {
        test_x(r, j) = data.features(test_rows[r], cols[j]);
      }
      test_y[r] = data.labels[test_rows[r]];
    }

    const StandardizationParams params = fit_standardization(train_x);
    train_x = apply_standardization(train_x, params);
    test_x = apply_standardization(test_x, params);

    svm::SvmModel model =
        svm::train(train_x, train_y, config, derive_seed(subset_seed, static_cast<std::uint64_t>(f)));
    model.active_features = subset;
    eval.converged = eval.converged && model.converged;
    eval.fold_accuracies[static_cast<std::size_t>(f)] = svm::accuracy(model, test_x, test_y);
  }

  double sum = 0.0;
  for (double a : eval.fold_accuracies) sum += a;
  eval.mean_accuracy = sum / static_cast<double>(fold_count);
  double var = 0.0;
  for (double a : eval.fold_accuracies) {
    const double delta = a - eval.mean_accuracy;
    var += delta * delta;
  }
  eval.std_accuracy = std::sqrt(var / static_cast<double>(fold_count));
  return eval;
}

}  // namespace

SubsetEvaluation evaluate_subset(const Dataset& data, const FeatureSubset& subset,
                                 const FoldPlan& folds, const svm::SvmConfig& config,
                                 EvalCache* cache, std::uint64_t seed) {
  if (subset.dimension() != data.n_features()) {
    throw std::out_of_range("evaluate_subset: subset is over " +
                            std::to_string(subset.dimension()) + " features but the dataset has " +
                            std::to_string(data.n_features()));
  }
  if (folds.fold_of.size() != data.n_samples() || folds.fold_count < 1) {
    throw std::invalid_argument("evaluate_subset: fold plan does not cover the dataset");
  }

  if (cache) {
    if (auto hit = cache->lookup(subset)) return *hit;
    return cache->insert(subset, compute_evaluation(data, subset, folds, config, seed));
  }
  return compute_evaluation(data, subset, folds, config, seed);
}

double reward(const SubsetEvaluation& prev, const SubsetEvaluation& next) {
  if (next.subset.cardinality() != prev.subset.cardinality() + 1 ||
      !prev.subset.is_subset_of(next.subset)) {
    throw std::invalid_argument("reward: states must differ by exactly one added feature");
  }
  return next.mean_accuracy - prev.mean_accuracy;
}

}  // namespace fsrl
