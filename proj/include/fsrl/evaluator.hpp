#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "fsrl/dataset.hpp"
#include "fsrl/feature_subset.hpp"
#include "fsrl/svm.hpp"

namespace fsrl {

// Cross-validated accuracy of one feature subset.
struct SubsetEvaluation {
  FeatureSubset subset;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  std::vector<double> fold_accuracies;
  bool converged = true;
};

// Memo table keyed by the canonical subset bitmask. Concurrent readers are
// allowed; insertion is exclusive and the first stored value for a key wins,
// so a duplicated concurrent computation resolves to one canonical entry.
class EvalCache {
 public:
  std::optional<SubsetEvaluation> lookup(const FeatureSubset& key) const;
  // Returns the stored value, which may be an earlier entry for the key.
  SubsetEvaluation insert(const FeatureSubset& key, SubsetEvaluation value);

  std::uint64_t hits() const { return hits_.load(); }
  std::uint64_t misses() const { return misses_.load(); }
  std::size_t size() const;

  // Entries ordered by bitmask, for deterministic reports.
  std::vector<SubsetEvaluation> entries_sorted() const;

  // Highest mean accuracy, ties to the smaller cardinality then the smaller
  // bitmask; nullopt when empty.
  std::optional<SubsetEvaluation> best_entry() const;

  // CSV of (subset bitmask as hex, mean, std).
  void dump_csv(std::ostream& out) const;

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<FeatureSubset, SubsetEvaluation, FeatureSubsetHash> entries_;
  mutable std::atomic<std::uint64_t> hits_{0};
  mutable std::atomic<std::uint64_t> misses_{0};
};

// Stratified cross-validation accuracy of an SVM trained on the subset's
// columns, standardization fitted per training partition. The empty subset
// scores the majority-class rate with no model trained. Results are keyed
// into the cache when one is given; the per-subset RNG seed derives from
// (seed, subset key) alone, so cached and fresh paths return identical
// values. A null cache disables memoization.
SubsetEvaluation evaluate_subset(const Dataset& data, const FeatureSubset& subset,
                                 const FoldPlan& folds, const svm::SvmConfig& config,
                                 EvalCache* cache, std::uint64_t seed);

// Accuracy difference caused by adding one feature; requires next.subset to
// extend prev.subset by exactly one feature.
double reward(const SubsetEvaluation& prev, const SubsetEvaluation& next);

// Binds evaluate_subset to one dataset, fold plan, SVM config, seed, and
// optional cache.
class SubsetEvaluator {
 public:
  SubsetEvaluator(const Dataset& data, FoldPlan folds, svm::SvmConfig config,
                  std::uint64_t seed, EvalCache* cache = nullptr)
      : data_(&data), folds_(std::move(folds)), config_(config), seed_(seed), cache_(cache) {}

  SubsetEvaluation evaluate(const FeatureSubset& subset) const {
    return evaluate_subset(*data_, subset, folds_, config_, cache_, seed_);
  }

  const Dataset& data() const { return *data_; }
  const FoldPlan& folds() const { return folds_; }
  EvalCache* cache() const { return cache_; }

 private:
  const Dataset* data_;
  FoldPlan folds_;
  svm::SvmConfig config_;
  std::uint64_t seed_;
  EvalCache* cache_;
};

}  // namespace fsrl
