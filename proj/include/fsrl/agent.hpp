#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fsrl/dataset.hpp"
#include "fsrl/evaluator.hpp"
#include "fsrl/feature_subset.hpp"

namespace fsrl {

enum class Phase { Random, Explore, Greedy };
enum class StartMode { Empty, RandomSubset };

const char* phase_name(Phase p);
const char* start_mode_name(StartMode m);
StartMode parse_start_mode(const std::string& text);  // "empty" | "random-subset"

struct AgentConfig {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon = 0.5;
  int episodes = 100;
  StartMode start_mode = StartMode::RandomSubset;
  std::optional<std::size_t> max_subset_size;  // early-stop cardinality
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument naming the offending field.
void validate_agent_config(const AgentConfig& config);

// Tabular state values over feature subsets. Absent states read as zero;
// a state counts as visited once it has received a TD update.
class StateValueTable {
 public:
  double value(const FeatureSubset& s) const;
  std::uint64_t visits(const FeatureSubset& s) const;
  bool visited(const FeatureSubset& s) const;
  std::size_t size() const { return entries_.size(); }

  // Stores the new value and bumps the visit count.
  void record(const FeatureSubset& s, double v);

  // Max stored value; 0 when the table is empty (every state reads 0 then).
  double max_value() const;

  // States ordered by bitmask, for deterministic reports.
  std::vector<std::pair<FeatureSubset, double>> entries_sorted() const;

 private:
  struct Entry {
    double value = 0.0;
    std::uint64_t visits = 0;
  };
  std::unordered_map<FeatureSubset, Entry, FeatureSubsetHash> entries_;
};

// Per-feature selection counts and running average of rewards.
struct AorTable {
  std::vector<std::uint64_t> counts;
  std::vector<double> averages;

  AorTable() = default;
  explicit AorTable(std::size_t dimension)
      : counts(dimension, 0), averages(dimension, 0.0) {}

  std::size_t dimension() const { return averages.size(); }
};

// Source of the agent's random decisions. Virtual so tests can record or
// script the exact choice sequence; production code uses MtRandomSource.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual double uniform01() = 0;                                // [0, 1)
  virtual std::size_t pick_count(std::size_t max_inclusive) = 0; // uniform over {0..max}
  // Uniform choice from a non-empty ascending candidate list; returns the
  // chosen value, not its position.
  virtual std::size_t pick_feature(std::span<const std::size_t> candidates) = 0;
};

class MtRandomSource final : public RandomSource {
 public:
  explicit MtRandomSource(std::uint64_t seed) : engine_(seed) {}
  double uniform01() override;
  std::size_t pick_count(std::size_t max_inclusive) override;
  std::size_t pick_feature(std::span<const std::size_t> candidates) override;

 private:
  std::uint64_t bounded(std::uint64_t n);  // unbiased uniform over [0, n)
  std::mt19937_64 engine_;
};

// V(s) <- V(s) + alpha * (r + gamma * V(s_next) - V(s)), absent states read
// as zero. Requires s_next = s plus exactly one feature. Returns the new V(s).
double td_update(StateValueTable& table, const FeatureSubset& s, const FeatureSubset& s_next,
                 double r, double alpha, double gamma);

// Folds r into feature f's running average: k <- k+1, avg <- ((k-1)*avg + r)/k.
// Returns the new average.
double update_aor(AorTable& table, std::size_t f, double r);

struct ActionChoice {
  std::size_t feature = 0;
  Phase phase = Phase::Random;
};

// Unvisited state: uniform random over available features. Visited state:
// explore (uniform) with probability epsilon, otherwise greedy argmax of AOR
// over available features, ties to the lowest index. Throws on a state with
// no available feature.
ActionChoice select_action(const FeatureSubset& state, const AorTable& aor,
                           const StateValueTable& values, double epsilon, RandomSource& rng);

struct EpisodeStep {
  FeatureSubset state;  // before the action
  std::size_t feature = 0;
  double reward = 0.0;
  double value_after = 0.0;  // V(state) after the TD update
  Phase phase = Phase::Random;
};

struct EpisodeTrace {
  FeatureSubset start_state;
  std::vector<EpisodeStep> steps;
  bool terminal = false;
};

// Plays one episode: draw the start state per start_mode (random-subset mode
// draws a cardinality uniform in [0, d/2], capped below max_subset_size),
// then add one feature per step until the subset reaches max_subset_size or
// the full set. Both tables are updated in place.
EpisodeTrace run_episode(const AgentConfig& config, StateValueTable& values, AorTable& aor,
                         const SubsetEvaluator& evaluator, RandomSource& rng);

// Features sorted by AOR descending, ties to the lower index; never-selected
// features come last, ordered by index.
std::vector<std::size_t> rank_features_by_aor(const AorTable& aor);

struct EpisodeStats {
  int episode = 0;
  std::size_t steps = 0;
  std::size_t states_visited = 0;   // distinct states in the value table
  double max_state_value = 0.0;     // max V over visited states, after this episode
  double running_max_value = 0.0;   // running max of the above across episodes
  double best_accuracy = 0.0;       // best cached mean accuracy so far
};

struct SearchParams {
  AgentConfig agent;
  int folds = 5;
  svm::SvmConfig svm;
};

struct SearchResult {
  StateValueTable values;
  AorTable aor;
  std::vector<EpisodeTrace> traces;
  std::vector<EpisodeStats> episode_stats;
  // Best evaluated subset: argmax mean accuracy, ties to the smaller
  // cardinality then the smaller bitmask. Absent when episodes == 0.
  std::optional<SubsetEvaluation> best;
  FoldPlan folds;
  EvalCache* cache = nullptr;  // owned_cache.get() unless an external cache was passed
  std::unique_ptr<EvalCache> owned_cache;
};

// Runs `episodes` episodes over one shared value table, AOR table, and
// evaluation cache. All randomness derives from params.agent.seed through
// the named streams "agent" (episodes), "folds", and "svm". Passing an
// external cache reuses prior evaluations; by default the result owns a
// fresh one.
SearchResult run_search(const SearchParams& params, const Dataset& data,
                        EvalCache* external_cache = nullptr);

}  // namespace fsrl
