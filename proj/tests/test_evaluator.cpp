#include <bit>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <thread>
#include <vector>

#include "doctest.h"

#include "fsrl/dataset.hpp"
#include "fsrl/evaluator.hpp"
#include "fsrl/feature_subset.hpp"

#include "support/fixtures.hpp"
#include "support/properties.hpp"

namespace {

fsrl::Dataset sixty_forty() {
  std::vector<std::vector<double>> column(1);
  std::vector<int> labels;
  for (int i = 0; i < 100; ++i) {
    column[0].push_back(0.01 * i);
    labels.push_back(i < 60 ? 1 : -1);
  }
  return test_support::from_columns(column, labels);
}

}  // namespace

TEST_SUITE("evaluator") {

TEST_CASE("the empty subset scores the majority rate with zero spread") {
  const fsrl::Dataset data = sixty_forty();
  const fsrl::FoldPlan folds = fsrl::make_folds(data, 5, 1);
  const fsrl::svm::SvmConfig config;
  const fsrl::SubsetEvaluation eval =
      fsrl::evaluate_subset(data, fsrl::FeatureSubset(1), folds, config, nullptr, 0);
  CHECK(eval.mean_accuracy == 0.6);
  CHECK(eval.std_accuracy == 0.0);
  CHECK(eval.fold_accuracies == std::vector<double>(5, 0.6));
  CHECK(eval.converged);
}

TEST_CASE("mean_accuracy is exactly the mean of the fold accuracies") {
  const fsrl::Dataset data = fsrl::generate_synthetic(60, 2, 3, 14);
  const fsrl::FoldPlan folds = fsrl::make_folds(data, 5, 2);
  const fsrl::svm::SvmConfig config;
  const fsrl::SubsetEvaluation eval = fsrl::evaluate_subset(
      data, fsrl::FeatureSubset::of(5, {0, 2}), folds, config, nullptr, 9);
  REQUIRE(eval.fold_accuracies.size() == 5);
  double sum = 0.0;
  for (double a : eval.fold_accuracies) sum += a;
  CHECK(eval.mean_accuracy == doctest::Approx(sum / 5.0).epsilon(1e-12));
  CHECK(eval.mean_accuracy >= 0.0);
  CHECK(eval.mean_accuracy <= 1.0);
}

TEST_CASE("a repeated lookup hits the cache and returns the identical entry") {
  const fsrl::Dataset data = fsrl::generate_synthetic(50, 2, 2, 3);
  const fsrl::FoldPlan folds = fsrl::make_folds(data, 5, 4);
  const fsrl::svm::SvmConfig config;
  fsrl::EvalCache cache;
  const fsrl::FeatureSubset subset = fsrl::FeatureSubset::of(4, {1, 3});

  const fsrl::SubsetEvaluation first =
      fsrl::evaluate_subset(data, subset, folds, config, &cache, 5);
  CHECK(cache.size() == 1);
  CHECK(cache.misses() == 1);
  CHECK(cache.hits() == 0);

  const fsrl::SubsetEvaluation second =
      fsrl::evaluate_subset(data, subset, folds, config, &cache, 5);
  CHECK(cache.hits() == 1);
  CHECK(cache.size() == 1);
  CHECK(test_support::bit_equal(first.mean_accuracy, second.mean_accuracy));
  CHECK(test_support::bit_equal(first.std_accuracy, second.std_accuracy));
  CHECK(first.fold_accuracies == second.fold_accuracies);
}

TEST_CASE("permuted insertion orders share one cache key") {
  const fsrl::Dataset data = fsrl::generate_synthetic(50, 2, 2, 3);
  const fsrl::FoldPlan folds = fsrl::make_folds(data, 5, 4);
  const fsrl::svm::SvmConfig config;
  fsrl::EvalCache cache;

  fsrl::FeatureSubset a(4), b(4);
  a.add(0);
  a.add(2);
  b.add(2);
  b.add(0);
  fsrl::evaluate_subset(data, a, folds, config, &cache, 5);
  fsrl::evaluate_subset(data, b, folds, config, &cache, 5);
  CHECK(cache.size() == 1);
  CHECK(cache.hits() == 1);
}

TEST_CASE("reward is the accuracy delta of adding exactly one feature") {
  fsrl::SubsetEvaluation prev, next;
  prev.subset = fsrl::FeatureSubset::of(5, {0});
  prev.mean_accuracy = 0.70;
  next.subset = fsrl::FeatureSubset::of(5, {0, 3});
  next.mean_accuracy = 0.75;
  CHECK(fsrl::reward(prev, next) == doctest::Approx(0.05));
  next.mean_accuracy = 0.70;
  CHECK(fsrl::reward(prev, next) == 0.0);
  next.mean_accuracy = 0.65;
  CHECK(fsrl::reward(prev, next) == doctest::Approx(-0.05));

  // not a one-step successor: same size, two added, or disjoint
  fsrl::SubsetEvaluation same = prev;
  CHECK_THROWS_WITH_AS(fsrl::reward(prev, same),
                       "reward: states must differ by exactly one added feature",
                       std::invalid_argument);
  fsrl::SubsetEvaluation two = prev;
  two.subset = fsrl::FeatureSubset::of(5, {0, 1, 2});
  CHECK_THROWS_AS(fsrl::reward(prev, two), std::invalid_argument);
  fsrl::SubsetEvaluation disjoint = prev;
  disjoint.subset = fsrl::FeatureSubset::of(5, {1, 2});
  CHECK_THROWS_AS(fsrl::reward(prev, disjoint), std::invalid_argument);
}

TEST_CASE("subset dimension must match the dataset") {
  const fsrl::Dataset data = fsrl::generate_synthetic(40, 2, 2, 6);
  const fsrl::FoldPlan folds = fsrl::make_folds(data, 5, 0);
  const fsrl::svm::SvmConfig config;
  CHECK_THROWS_AS(
      fsrl::evaluate_subset(data, fsrl::FeatureSubset(7), folds, config, nullptr, 0),
      std::out_of_range);
  const fsrl::FoldPlan other = fsrl::make_folds(fsrl::generate_synthetic(30, 2, 2, 6), 5, 0);
  CHECK_THROWS_WITH_AS(
      fsrl::evaluate_subset(data, fsrl::FeatureSubset(4), other, config, nullptr, 0),
      "evaluate_subset: fold plan does not cover the dataset", std::invalid_argument);
}

TEST_CASE("concurrent evaluations agree with the sequential result") {
  const fsrl::Dataset data = fsrl::generate_synthetic(50, 2, 3, 10);
  const fsrl::FoldPlan folds = fsrl::make_folds(data, 5, 11);
  const fsrl::svm::SvmConfig config;
  const std::uint64_t seed = 12;
  const std::size_t d = data.n_features();

  std::vector<fsrl::FeatureSubset> probes;
  for (std::size_t f = 0; f < d; ++f) probes.push_back(fsrl::FeatureSubset::of(d, {f}));
  probes.push_back(fsrl::FeatureSubset(d));
  probes.push_back(fsrl::FeatureSubset::full(d));

  std::vector<fsrl::SubsetEvaluation> sequential;
  for (const auto& s : probes) {
    sequential.push_back(fsrl::evaluate_subset(data, s, folds, config, nullptr, seed));
  }

  fsrl::EvalCache cache;
  std::vector<std::thread> workers;
  std::vector<std::vector<fsrl::SubsetEvaluation>> results(4);
  for (int w = 0; w < 4; ++w) {
    workers.emplace_back([&, w] {
      for (const auto& s : probes) {
        results[w].push_back(fsrl::evaluate_subset(data, s, folds, config, &cache, seed));
      }
    });
  }
  for (auto& t : workers) t.join();

  CHECK(cache.size() == probes.size());
  CHECK(cache.hits() + cache.misses() == 4 * probes.size());
  for (int w = 0; w < 4; ++w) {
    for (std::size_t i = 0; i < probes.size(); ++i) {
      CHECK(test_support::bit_equal(results[w][i].mean_accuracy, sequential[i].mean_accuracy));
      CHECK(results[w][i].fold_accuracies == sequential[i].fold_accuracies);
    }
  }
}

TEST_CASE("best_entry prefers accuracy, then fewer features, then the lower mask") {
  fsrl::EvalCache cache;
  CHECK_FALSE(cache.best_entry().has_value());

  auto put = [&cache](std::initializer_list<std::size_t> features, double acc) {
    fsrl::SubsetEvaluation e;
    e.subset = fsrl::FeatureSubset::of(6, features);
    e.mean_accuracy = acc;
    cache.insert(e.subset, e);
  };
  put({0, 1, 2}, 0.80);
  put({3}, 0.85);        // best accuracy
  put({4, 5}, 0.85);     // same accuracy, larger cardinality
  REQUIRE(cache.best_entry().has_value());
  CHECK(cache.best_entry()->subset == fsrl::FeatureSubset::of(6, {3}));

  put({2}, 0.85);        // same accuracy and cardinality, lower bitmask wins
  CHECK(cache.best_entry()->subset == fsrl::FeatureSubset::of(6, {2}));
}

TEST_CASE("cached and uncached paths are bit-identical") {
  const auto result = test_support::check_cache_transparency();
  INFO(result.detail);
  CHECK(result.pass);
}

TEST_CASE("full-subset accuracy on the australian dataset lands in the published band") {
  const std::filesystem::path path = std::filesystem::path(FSRL_DATA_DIR) / "australian.csv";
  if (!std::filesystem::exists(path)) {
    MESSAGE("skipped: ", path.string(),
            " not present (tools/fetch_uci.py downloads it when network access exists)");
    return;
  }
  const fsrl::Dataset data = fsrl::load_csv(path.string());
  REQUIRE(data.n_features() == 14);
  REQUIRE(data.n_samples() == 690);
  const fsrl::FoldPlan folds = fsrl::make_folds(data, 5, 7);
  const fsrl::svm::SvmConfig config;
  const fsrl::SubsetEvaluation eval = fsrl::evaluate_subset(
      data, fsrl::FeatureSubset::full(14), folds, config, nullptr, 7);
  CHECK(eval.mean_accuracy >= 0.80);
  CHECK(eval.mean_accuracy <= 0.90);
}

}  // TEST_SUITE
