#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fsrl/agent.hpp"
#include "fsrl/dataset.hpp"
#include "fsrl/evaluator.hpp"

namespace fsrl::baselines {

enum class RankMethod { Pearson, Fisher, Ttest, RlAor };

const char* rank_method_name(RankMethod m);
RankMethod parse_rank_method(const std::string& text);

// A scored feature ranking: order is the permutation of 0..d-1 sorting
// scores descending, ties to the lower index.
struct FeatureRanking {
  RankMethod method = RankMethod::Pearson;
  std::vector<double> scores;
  std::vector<std::size_t> order;
};

FeatureRanking make_ranking(RankMethod method, std::vector<double> scores);

// |Pearson correlation| of each feature column with the ±1 labels; constant
// columns score 0.
FeatureRanking score_pearson(const Dataset& data);

// Fisher score (mu+ - mu-)^2 / (v+ + v-) with per-class sample variances.
// 0/0 scores 0; a nonzero mean gap over zero variance scores +inf and ranks
// first. Requires at least two samples per class.
FeatureRanking score_fisher(const Dataset& data);

// |Welch t-statistic| per feature; degenerate denominators follow the Fisher
// convention. Requires at least two samples per class.
FeatureRanking score_ttest(const Dataset& data);

// AOR averages as a ranking; never-selected features score -inf so they rank
// last (by index among themselves), matching rank_features_by_aor.
FeatureRanking ranking_from_aor(const AorTable& aor);

struct TopkPoint {
  std::size_t k = 0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
};

// Cross-validated accuracy of the ranking's top-k prefix for k = 1..k_max,
// evaluated against the evaluator's bound dataset.
std::vector<TopkPoint> evaluate_topk_curve(const SubsetEvaluator& evaluator,
                                           const FeatureRanking& ranking, std::size_t k_max);

}  // namespace fsrl::baselines
