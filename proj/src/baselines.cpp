#include "fsrl/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fsrl::baselines {

const char* rank_method_name(RankMethod m) {
  switch (m) {
    case RankMethod::Pearson: return "pearson";
    case RankMethod::Fisher: return "fisher";
    case RankMethod::Ttest: return "ttest";
    case RankMethod::RlAor: return "rl-aor";
  }
  return "?";
}

RankMethod parse_rank_method(const std::string& text) {
  if (text == "pearson") return RankMethod::Pearson;
  if (text == "fisher") return RankMethod::Fisher;
  if (text == "ttest") return RankMethod::Ttest;
  if (text == "rl-aor") return RankMethod::RlAor;
  throw std::invalid_argument("unknown ranking method '" + text +
                              "' (expected pearson, fisher, ttest, or rl-aor)");
}

FeatureRanking make_ranking(RankMethod method, std::vector<double> scores) {
  FeatureRanking ranking;
  ranking.method = method;
  ranking.order.resize(scores.size());
  std::iota(ranking.order.begin(), ranking.order.end(), std::size_t{0});
  std::sort(ranking.order.begin(), ranking.order.end(),
            [&scores](std::size_t a, std::size_t b) {
              if (scores[a] != scores[b]) return scores[a] > scores[b];
              return a < b;
            });
  ranking.scores = std::move(scores);
  return ranking;
}

namespace {

// Per-class per-feature means and sample variances (n-1 denominator).
struct ClassStats {
  std::size_t n_pos = 0, n_neg = 0;
  std::vector<double> mean_pos, mean_neg;
  std::vector<double> var_pos, var_neg;
};

ClassStats class_stats(const Dataset& data) {
  const std::size_t d = data.n_features();
  ClassStats s;
  s.mean_pos.assign(d, 0.0);
  s.mean_neg.assign(d, 0.0);
  s.var_pos.assign(d, 0.0);
  s.var_neg.assign(d, 0.0);
  for (int y : data.labels) (y == 1 ? s.n_pos : s.n_neg)++;
  if (s.n_pos < 2 || s.n_neg < 2) {
    throw std::invalid_argument("per-class scores need at least 2 samples in each class");
  }
  for (std::size_t i = 0; i < data.n_samples(); ++i) {
    auto& mean = data.labels[i] == 1 ? s.mean_pos : s.mean_neg;
    for (std::size_t j = 0; j < d; ++j) mean[j] += data.features(i, j);
  }
  for (std::size_t j = 0; j < d; ++j) {
    s.mean_pos[j] /= static_cast<double>(s.n_pos);
    s.mean_neg[j] /= static_cast<double>(s.n_neg);
  }
  for (std::size_t i = 0; i < data.n_samples(); ++i) {
    const bool pos = data.labels[i] == 1;
    auto& mean = pos ? s.mean_pos : s.mean_neg;
    auto& var = pos ? s.var_pos : s.var_neg;
    for (std::size_t j = 0; j < d; ++j) {
      const double delta = data.features(i, j) - mean[j];
      var[j] += delta * delta;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    s.var_pos[j] /= static_cast<double>(s.n_pos - 1);
    s.var_neg[j] /= static_cast<double>(s.n_neg - 1);
  }
  return s;
}

double degenerate_ratio(double num) {
  return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

FeatureRanking score_pearson(const Dataset& data) {
  validate_dataset(data);
  const std::size_t n = data.n_samples();
  const std::size_t d = data.n_features();

  double mean_y = 0.0;
  for (int y : data.labels) mean_y += y;
  mean_y /= static_cast<double>(n);

  std::vector<double> mean_x(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) mean_x[j] += data.features(i, j);
  }
  for (double& m : mean_x) m /= static_cast<double>(n);

  std::vector<double> num(d, 0.0), ss_x(d, 0.0);
  double ss_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dy = data.labels[i] - mean_y;
    ss_y += dy * dy;
    for (std::size_t j = 0; j < d; ++j) {
      const double dx = data.features(i, j) - mean_x[j];
      num[j] += dx * dy;
      ss_x[j] += dx * dx;
    }
  }

  std::vector<double> scores(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    const double den = std::sqrt(ss_x[j] * ss_y);
    scores[j] = den == 0.0 ? 0.0 : std::abs(num[j]) / den;
  }
  return make_ranking(RankMethod::Pearson, std::move(scores));
}

FeatureRanking score_fisher(const Dataset& data) {
  validate_dataset(data);
  const ClassStats s = class_stats(data);
  std::vector<double> scores(data.n_features());
  for (std::size_t j = 0; j < scores.size(); ++j) {
    const double gap = s.mean_pos[j] - s.mean_neg[j];
    const double num = gap * gap;
    const double den = s.var_pos[j] + s.var_neg[j];
    scores[j] = den == 0.0 ? degenerate_ratio(num) : num / den;
  }
  return make_ranking(RankMethod::Fisher, std::move(scores));
}

FeatureRanking score_ttest(const Dataset& data) {
  validate_dataset(data);
  const ClassStats s = class_stats(data);
  std::vector<double> scores(data.n_features());
  for (std::size_t j = 0; j < scores.size(); ++j) {
    const double num = std::abs(s.mean_pos[j] - s.mean_neg[j]);
    const double den = std::sqrt(s.var_pos[j] / static_cast<double>(s.n_pos) +
                                 s.var_neg[j] / static_cast<double>(s.n_neg));
    scores[j] = den == 0.0 ? degenerate_ratio(num) : num / den;
  }
  return make_ranking(RankMethod::Ttest, std::move(scores));
}

FeatureRanking ranking_from_aor(const AorTable& aor) {
  std::vector<double> scores(aor.dimension());
  for (std::size_t f = 0; f < scores.size(); ++f) {
    scores[f] = aor.counts[f] > 0 ? aor.averages[f]
                                  : -std::numeric_limits<double>::infinity();
  }
  return make_ranking(RankMethod::RlAor, std::move(scores));
}

std::vector<TopkPoint> evaluate_topk_curve(const SubsetEvaluator& evaluator,
                                           const FeatureRanking& ranking, std::size_t k_max) {
  const std::size_t d = evaluator.data().n_features();
  if (ranking.order.size() != d) {
    throw std::invalid_argument("evaluate_topk_curve: ranking is over " +
                                std::to_string(ranking.order.size()) +
                                " features but the dataset has " + std::to_string(d));
  }
  if (k_max < 1 || k_max > d) {
    throw std::invalid_argument("evaluate_topk_curve: k_max must be in [1, " +
                                std::to_string(d) + "]");
  }
  std::vector<TopkPoint> curve;
  curve.reserve(k_max);
  FeatureSubset subset(d);
  for (std::size_t k = 1; k <= k_max; ++k) {
    subset = subset.with(ranking.order[k - 1]);
    const SubsetEvaluation eval = evaluator.evaluate(subset);
    curve.push_back({k, eval.mean_accuracy, eval.std_accuracy});
  }
  return curve;
}

}  // namespace fsrl::baselines
