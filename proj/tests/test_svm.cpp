#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "fsrl/matrix.hpp"
#include "fsrl/svm.hpp"

#include "support/properties.hpp"
#include "support/qp_oracle.hpp"

namespace {

fsrl::Matrix from_rows(const std::vector<std::vector<double>>& rows) {
  fsrl::Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

// Two Gaussian blobs around +/-(2, 0), clearly separable.
void make_blobs(std::size_t per_class, fsrl::Matrix& x, std::vector<int>& y,
                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 0.3);
  x = fsrl::Matrix(2 * per_class, 2);
  y.assign(2 * per_class, 0);
  for (std::size_t i = 0; i < per_class; ++i) {
    x(i, 0) = -2.0 + jitter(rng);
    x(i, 1) = jitter(rng);
    y[i] = -1;
    x(per_class + i, 0) = 2.0 + jitter(rng);
    x(per_class + i, 1) = jitter(rng);
    y[per_class + i] = 1;
  }
}

}  // namespace

TEST_SUITE("svm") {

TEST_CASE("a symmetric pair is separated with the boundary at the midpoint") {
  const fsrl::Matrix x = from_rows({{-1.0}, {1.0}});
  const std::vector<int> y{-1, 1};
  fsrl::svm::SvmConfig config;
  const fsrl::svm::SvmModel model = fsrl::svm::train(x, y, config, 1);
  CHECK(model.converged);
  CHECK(fsrl::svm::accuracy(model, x, y) == 1.0);

  const fsrl::Matrix mid = from_rows({{0.0}});
  const std::vector<double> f = fsrl::svm::decision_function(model, mid);
  CHECK(std::abs(f[0]) < 1e-9);  // symmetry pins the boundary at 0
  CHECK(fsrl::svm::predict(model, mid) == std::vector<int>{1});  // sign(0) = +1
  CHECK(fsrl::svm::predict(model, x) == y);
}

TEST_CASE("xor is fit exactly with the gaussian kernel") {
  const fsrl::Matrix x = from_rows({{0, 0}, {1, 1}, {0, 1}, {1, 0}});
  const std::vector<int> y{-1, -1, 1, 1};
  fsrl::svm::SvmConfig config;
  config.c = 10.0;
  config.kernel_gamma = 1.0;
  config.tolerance = 1e-5;
  const fsrl::svm::SvmModel model = fsrl::svm::train(x, y, config, 7);
  CHECK(model.converged);
  CHECK(fsrl::svm::accuracy(model, x, y) == 1.0);

  // cross-check the dual objective against the projected-gradient oracle
  fsrl::Matrix kernel(4, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      kernel(i, j) = fsrl::svm::gaussian_kernel(x.row(i), x.row(j), 1.0);
    }
  }
  const std::vector<double> oracle = test_support::solve_dual_qp(kernel, y, 10.0);
  const double gap = std::abs(test_support::model_dual_objective(model) -
                              test_support::dual_objective(kernel, y, oracle));
  CHECK(gap < 1e-3);
}

TEST_CASE("separable data at large C reaches hard margins") {
  fsrl::Matrix x;
  std::vector<int> y;
  make_blobs(10, x, y, 99);
  fsrl::svm::SvmConfig config;
  config.c = 100.0;
  const fsrl::svm::SvmModel model = fsrl::svm::train(x, y, config, 3);
  CHECK(model.converged);
  const std::vector<double> f = fsrl::svm::decision_function(model, x);
  for (std::size_t i = 0; i < y.size(); ++i) {
    CHECK(y[i] * f[i] >= 1.0 - config.tolerance);
  }
}

TEST_CASE("gaussian kernel is a unit-diagonal symmetric kernel in (0, 1]") {
  const std::vector<double> u{0.3, -1.2, 4.0};
  const std::vector<double> v{-0.5, 0.8, 2.5};
  CHECK(fsrl::svm::gaussian_kernel(u, u, 0.7) == 1.0);
  CHECK(fsrl::svm::gaussian_kernel(u, v, 0.7) == fsrl::svm::gaussian_kernel(v, u, 0.7));
  const double k = fsrl::svm::gaussian_kernel(u, v, 0.7);
  CHECK(k > 0.0);
  CHECK(k <= 1.0);
  const std::vector<double> shorter{1.0, 2.0};
  CHECK_THROWS_WITH_AS(fsrl::svm::gaussian_kernel(u, shorter, 0.7),
                       "gaussian_kernel: dimension mismatch", std::invalid_argument);
}

TEST_CASE("default gamma resolves to one over the column count") {
  fsrl::Matrix x;
  std::vector<int> y;
  make_blobs(5, x, y, 4);
  fsrl::svm::SvmConfig config;  // kernel_gamma unset
  const fsrl::svm::SvmModel model = fsrl::svm::train(x, y, config, 0);
  CHECK(model.kernel_gamma == doctest::Approx(0.5));  // d = 2
  config.kernel_gamma = 1.25;
  const fsrl::svm::SvmModel fixed = fsrl::svm::train(x, y, config, 0);
  CHECK(fixed.kernel_gamma == 1.25);
}

TEST_CASE("training is deterministic for a fixed seed") {
  fsrl::Matrix x;
  std::vector<int> y;
  make_blobs(8, x, y, 21);
  fsrl::svm::SvmConfig config;
  config.c = 2.0;
  const fsrl::svm::SvmModel a = fsrl::svm::train(x, y, config, 1234);
  const fsrl::svm::SvmModel b = fsrl::svm::train(x, y, config, 1234);
  CHECK(a.dual_coefs == b.dual_coefs);
  CHECK(a.bias == b.bias);
  CHECK(a.support_vectors == b.support_vectors);
}

TEST_CASE("train rejects malformed input") {
  const fsrl::Matrix x = from_rows({{1.0}, {2.0}});
  fsrl::svm::SvmConfig config;
  CHECK_THROWS_WITH_AS(fsrl::svm::train(from_rows({{1.0}}), {1}, config, 0),
                       "svm::train: need at least 2 samples", std::invalid_argument);
  CHECK_THROWS_WITH_AS(fsrl::svm::train(x, {1}, config, 0),
                       "svm::train: label count mismatch", std::invalid_argument);
  CHECK_THROWS_WITH_AS(fsrl::svm::train(x, {1, 1}, config, 0),
                       "svm::train: single-class input", std::invalid_argument);
  CHECK_THROWS_WITH_AS(fsrl::svm::train(x, {1, 2}, config, 0),
                       "svm::train: labels must be -1 or +1", std::invalid_argument);
  fsrl::svm::SvmConfig bad = config;
  bad.c = 0.0;
  CHECK_THROWS_WITH_AS(fsrl::svm::train(x, {1, -1}, bad, 0),
                       "svm::train: penalty c must be positive", std::invalid_argument);
  bad = config;
  bad.tolerance = -1.0;
  CHECK_THROWS_WITH_AS(fsrl::svm::train(x, {1, -1}, bad, 0),
                       "svm::train: tolerance must be positive", std::invalid_argument);
  fsrl::Matrix nan_x = x;
  nan_x(0, 0) = std::nan("");
  CHECK_THROWS_WITH_AS(fsrl::svm::train(nan_x, {1, -1}, config, 0),
                       "svm::train: non-finite input", std::invalid_argument);
}

TEST_CASE("accuracy counts correct predictions over the evaluation set") {
  // Hand-built model: one support vector at the origin with positive weight
  // predicts +1 everywhere (the kernel is strictly positive).
  fsrl::svm::SvmModel model;
  model.support_vectors = from_rows({{0.0, 0.0}});
  model.dual_coefs = {1.0};
  model.bias = 0.0;
  model.kernel_gamma = 1.0;
  const fsrl::Matrix x = from_rows({{1, 0}, {0, 2}, {3, 3}, {-1, -1}});
  CHECK(fsrl::svm::accuracy(model, x, {1, 1, -1, -1}) == 0.5);
  CHECK(fsrl::svm::accuracy(model, x, {1, 1, 1, 1}) == 1.0);
  CHECK(fsrl::svm::accuracy(model, x, {-1, -1, -1, -1}) == 0.0);
  CHECK_THROWS_WITH_AS(fsrl::svm::accuracy(model, fsrl::Matrix(), {}),
                       "svm::accuracy: empty evaluation set", std::invalid_argument);
}

TEST_CASE("dual objective matches the projected-gradient oracle on random problems") {
  const auto result = test_support::check_smo_vs_qp();
  INFO(result.detail);
  CHECK(result.pass);
}

}  // TEST_SUITE
