#include "fsrl/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace fsrl::svm {

namespace {

double squared_distance(std::span<const double> u, std::span<const double> v) {
  double sum = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double delta = u[j] - v[j];
    sum += delta * delta;
  }
  return sum;
}

// In-training state for one SMO run over a precomputed Gram matrix.
class SmoSolver {
 public:
  SmoSolver(const Matrix& x, const std::vector<int>& y, double c, double gamma,
            double tol, int max_passes, std::uint64_t max_iterations, std::uint64_t seed)
      : x_(x),
        y_(y),
        n_(x.rows()),
        c_(c),
        tol_(tol),
        max_passes_(max_passes),
        max_iterations_(max_iterations),
        rng_(seed),
        alpha_(n_, 0.0),
        errors_(n_) {
    gram_ = Matrix(n_, n_);
    for (std::size_t i = 0; i < n_; ++i) {
      gram_(i, i) = 1.0;
      for (std::size_t j = 0; j < i; ++j) {
        const double k = std::exp(-gamma * squared_distance(x.row(i), x.row(j)));
        gram_(i, j) = k;
        gram_(j, i) = k;
      }
    }
    // f(x) = 0 everywhere at alpha = 0, so E_i = -y_i.
    for (std::size_t i = 0; i < n_; ++i) errors_[i] = -static_cast<double>(y_[i]);
  }

  void solve() {
    int stall = 0;
    bool examine_all = true;
    bool refreshed = false;
    while (stall < max_passes_ && updates_ < max_iterations_) {
      int changed = 0;
      if (examine_all) {
        for (std::size_t i = 0; i < n_ && updates_ < max_iterations_; ++i) {
          changed += examine(i);
        }
        if (changed == 0) {
          // The incremental error cache drifts; rebuild it exactly once per
          // stall before concluding that no violated pair remains.
          if (!refreshed) {
            refresh_state();
            refreshed = true;
          } else {
            ++stall;
          }
        } else {
          stall = 0;
          refreshed = false;
          examine_all = false;
        }
      } else {
        for (std::size_t i = 0; i < n_ && updates_ < max_iterations_; ++i) {
          if (is_non_bound(i)) changed += examine(i);
        }
        if (changed == 0) {
          examine_all = true;
        } else {
          stall = 0;
          refreshed = false;
        }
      }
    }
  }

  const std::vector<double>& alphas() const { return alpha_; }
  double bias() const { return bias_; }

  // The running bias kept during optimization serves the error cache; it can
  // drift outside the KKT-feasible interval when every support vector ends at
  // a bound. Re-derive the bias from the final coefficients: average the
  // equality condition over non-bound vectors when any exist, otherwise take
  // the midpoint of the interval the bound constraints leave open.
  void finalize_bias() {
    constexpr double kBoundEps = 1e-9;
    double equality_sum = 0.0;
    std::size_t equality_count = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
      double g = 0.0;
      for (std::size_t k = 0; k < n_; ++k) {
        if (alpha_[k] > 0.0) g += alpha_[k] * y_[k] * gram_(k, i);
      }
      const double v = static_cast<double>(y_[i]) - g;
      const bool at_zero = alpha_[i] <= kBoundEps;
      const bool at_c = alpha_[i] >= c_ - kBoundEps;
      if (!at_zero && !at_c) {
        equality_sum += v;
        ++equality_count;
      } else if ((y_[i] > 0) == at_zero) {
        // (y=+1, alpha=0) and (y=-1, alpha=C) demand margin >= 1: b >= v.
        lo = std::max(lo, v);
      } else {
        hi = std::min(hi, v);
      }
    }
    if (equality_count > 0) {
      bias_ = equality_sum / static_cast<double>(equality_count);
    } else if (std::isfinite(lo) && std::isfinite(hi)) {
      bias_ = 0.5 * (lo + hi);
    } else if (std::isfinite(lo)) {
      bias_ = lo;
    } else if (std::isfinite(hi)) {
      bias_ = hi;
    }
  }

  // KKT within tolerance, on errors recomputed from the final coefficients.
  bool kkt_satisfied() const {
    constexpr double kBoundEps = 1e-9;
    for (std::size_t i = 0; i < n_; ++i) {
      double f = bias_;
      for (std::size_t k = 0; k < n_; ++k) {
        if (alpha_[k] > 0.0) f += alpha_[k] * y_[k] * gram_(k, i);
      }
      const double margin = y_[i] * f;
      if (alpha_[i] <= kBoundEps) {
        if (margin < 1.0 - tol_) return false;
      } else if (alpha_[i] >= c_ - kBoundEps) {
        if (margin > 1.0 + tol_) return false;
      } else {
        if (std::abs(margin - 1.0) > tol_) return false;
      }
    }
    return true;
  }

 private:
  bool is_non_bound(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < c_; }

  // Recompute the bias and every cached error from the current coefficients,
  // using the same accumulation order as the final KKT check so the loop's
  // exit decision and the reported convergence flag agree.
  void refresh_state() {
    finalize_bias();
    for (std::size_t i = 0; i < n_; ++i) {
      double f = bias_;
      for (std::size_t k = 0; k < n_; ++k) {
        if (alpha_[k] > 0.0) f += alpha_[k] * y_[k] * gram_(k, i);
      }
      errors_[i] = f - static_cast<double>(y_[i]);
    }
  }

  int examine(std::size_t i) {
    const double r = errors_[i] * y_[i];
    const bool violated = (r < -tol_ && alpha_[i] < c_) || (r > tol_ && alpha_[i] > 0.0);
    if (!violated) return 0;

    // Partner maximizing |E_i - E_j| among non-bound coefficients.
    std::size_t best = n_;
    double best_gap = -1.0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == i || !is_non_bound(j)) continue;
      const double gap = std::abs(errors_[i] - errors_[j]);
      if (gap > best_gap) {
        best_gap = gap;
        best = j;
      }
    }
    if (best < n_ && take_step(best, i)) return 1;

    // Fallbacks: scan non-bound, then everything, from a random origin.
    const std::size_t start = rng_() % n_;
    for (std::size_t off = 0; off < n_; ++off) {
      const std::size_t j = (start + off) % n_;
      if (j == i || !is_non_bound(j)) continue;
      if (take_step(j, i)) return 1;
    }
    const std::size_t start2 = rng_() % n_;
    for (std::size_t off = 0; off < n_; ++off) {
      const std::size_t j = (start2 + off) % n_;
      if (j == i) continue;
      if (take_step(j, i)) return 1;
    }
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    constexpr double kStepEps = 1e-12;
    const double y1 = y_[i1];
    const double y2 = y_[i2];
    const double a1_old = alpha_[i1];
    const double a2_old = alpha_[i2];
    const double e1 = errors_[i1];
    const double e2 = errors_[i2];
    const double s = y1 * y2;

    double low, high;
    if (y1 != y2) {
      low = std::max(0.0, a2_old - a1_old);
      high = std::min(c_, c_ + a2_old - a1_old);
    } else {
      low = std::max(0.0, a1_old + a2_old - c_);
      high = std::min(c_, a1_old + a2_old);
    }
    if (low >= high) return false;

    const double k11 = gram_(i1, i1);
    const double k12 = gram_(i1, i2);
    const double k22 = gram_(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;

    double a2;
    if (eta > 0.0) {
      a2 = a2_old + y2 * (e1 - e2) / eta;
      a2 = std::clamp(a2, low, high);
    } else {
      // Flat direction: compare the dual objective at the segment ends.
      const double f1 = e1 + y1;
      const double f2 = e2 + y2;
      const double v1 = f1 - bias_ - a1_old * y1 * k11 - a2_old * y2 * k12;
      const double v2 = f2 - bias_ - a1_old * y1 * k12 - a2_old * y2 * k22;
      auto objective = [&](double cand) {
        const double a1 = a1_old + s * (a2_old - cand);
        return a1 + cand - 0.5 * k11 * a1 * a1 - 0.5 * k22 * cand * cand -
               s * k12 * a1 * cand - y1 * a1 * v1 - y2 * cand * v2;
      };
      const double obj_low = objective(low);
      const double obj_high = objective(high);
      if (obj_low > obj_high + kStepEps) {
        a2 = low;
      } else if (obj_high > obj_low + kStepEps) {
        a2 = high;
      } else {
        return false;
      }
    }
    if (std::abs(a2 - a2_old) < kStepEps * (a2 + a2_old + kStepEps)) return false;

    double a1 = a1_old + s * (a2_old - a2);
    if (a1 < 0.0) {
      a2 += s * a1;
      a1 = 0.0;
    } else if (a1 > c_) {
      a2 += s * (a1 - c_);
      a1 = c_;
    }

    const double delta1 = (a1 - a1_old) * y1;
    const double delta2 = (a2 - a2_old) * y2;
    const double b1 = bias_ - errors_[i1] - delta1 * k11 - delta2 * k12;
    const double b2 = bias_ - errors_[i2] - delta1 * k12 - delta2 * k22;
    double new_bias;
    if (a1 > 0.0 && a1 < c_) {
      new_bias = b1;
    } else if (a2 > 0.0 && a2 < c_) {
      new_bias = b2;
    } else {
      new_bias = 0.5 * (b1 + b2);
    }
    const double bias_delta = new_bias - bias_;

    for (std::size_t k = 0; k < n_; ++k) {
      errors_[k] += delta1 * gram_(i1, k) + delta2 * gram_(i2, k) + bias_delta;
    }
    alpha_[i1] = a1;
    alpha_[i2] = a2;
    bias_ = new_bias;
    ++updates_;
    return true;
  }

  const Matrix& x_;
  const std::vector<int>& y_;
  std::size_t n_;
  double c_;
  double tol_;
  int max_passes_;
  std::uint64_t max_iterations_;
  std::mt19937_64 rng_;
  std::vector<double> alpha_;
  std::vector<double> errors_;
  Matrix gram_;
  double bias_ = 0.0;
  std::uint64_t updates_ = 0;
};

}  // namespace

double gaussian_kernel(std::span<const double> u, std::span<const double> v, double gamma) {
  if (u.size() != v.size()) throw std::invalid_argument("gaussian_kernel: dimension mismatch");
  return std::exp(-gamma * squared_distance(u, v));
}

SvmModel train(const Matrix& features, const std::vector<int>& labels,
               const SvmConfig& config, std::uint64_t seed) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  if (n < 2) throw std::invalid_argument("svm::train: need at least 2 samples");
  if (d < 1) throw std::invalid_argument("svm::train: need at least 1 feature");
  if (labels.size() != n) throw std::invalid_argument("svm::train: label count mismatch");
  if (config.c <= 0.0) throw std::invalid_argument("svm::train: penalty c must be positive");
  if (config.tolerance <= 0.0) throw std::invalid_argument("svm::train: tolerance must be positive");
  if (config.max_passes < 1) throw std::invalid_argument("svm::train: max_passes must be >= 1");
  bool has_pos = false;
  bool has_neg = false;
  for (int y : labels) {
    if (y == 1) has_pos = true;
    else if (y == -1) has_neg = true;
    else throw std::invalid_argument("svm::train: labels must be -1 or +1");
  }
  if (!has_pos || !has_neg) throw std::invalid_argument("svm::train: single-class input");
  for (double v : features.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("svm::train: non-finite input");
  }

  const double gamma = config.kernel_gamma.value_or(1.0 / static_cast<double>(d));
  if (!(gamma > 0.0)) throw std::invalid_argument("svm::train: kernel_gamma must resolve positive");
  const std::uint64_t default_cap =
      std::min<std::uint64_t>(10ULL * n * n, 1'000'000ULL);
  const std::uint64_t max_iterations = config.max_iterations.value_or(default_cap);

  SmoSolver solver(features, labels, config.c, gamma, config.tolerance, config.max_passes,
                   max_iterations, seed);
  solver.solve();
  solver.finalize_bias();

  SvmModel model;
  model.kernel_gamma = gamma;
  model.c = config.c;
  model.bias = solver.bias();
  model.converged = solver.kkt_satisfied();
  model.active_features = FeatureSubset::full(d);

  constexpr double kSvEps = 1e-12;
  std::vector<std::size_t> sv;
  for (std::size_t i = 0; i < n; ++i) {
    if (solver.alphas()[i] > kSvEps) sv.push_back(i);
  }
  model.support_vectors = Matrix(sv.size(), d);
  model.dual_coefs.reserve(sv.size());
  for (std::size_t r = 0; r < sv.size(); ++r) {
    const std::size_t i = sv[r];
    std::copy(features.row(i).begin(), features.row(i).end(),
              model.support_vectors.row(r).begin());
    model.dual_coefs.push_back(solver.alphas()[i] * labels[i]);
  }
  return model;
}

std::vector<double> decision_function(const SvmModel& model, const Matrix& features) {
  if (features.cols() != model.support_vectors.cols()) {
    throw std::invalid_argument("svm::decision_function: feature dimension mismatch");
  }
  std::vector<double> out(features.rows(), model.bias);
  for (std::size_t q = 0; q < features.rows(); ++q) {
    const auto x = features.row(q);
    double sum = 0.0;
    for (std::size_t i = 0; i < model.support_vectors.rows(); ++i) {
      sum += model.dual_coefs[i] *
             std::exp(-model.kernel_gamma * squared_distance(model.support_vectors.row(i), x));
    }
    out[q] += sum;
  }
  return out;
}

std::vector<int> predict(const SvmModel& model, const Matrix& features) {
  std::vector<double> scores = decision_function(model, features);
  std::vector<int> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] < 0.0 ? -1 : 1;
  return out;
}

double accuracy(const SvmModel& model, const Matrix& features, const std::vector<int>& labels) {
  if (features.rows() == 0) throw std::invalid_argument("svm::accuracy: empty evaluation set");
  if (labels.size() != features.rows()) {
    throw std::invalid_argument("svm::accuracy: label count mismatch");
  }
  const std::vector<int> predicted = predict(model, features);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predicted[i] == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

}  // namespace fsrl::svm
