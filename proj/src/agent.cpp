#include "fsrl/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fsrl/rng.hpp"

namespace fsrl {

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Random: return "random";
    case Phase::Explore: return "explore";
    case Phase::Greedy: return "greedy";
  }
  return "?";
}

const char* start_mode_name(StartMode m) {
  return m == StartMode::Empty ? "empty" : "random-subset";
}

StartMode parse_start_mode(const std::string& text) {
  if (text == "empty") return StartMode::Empty;
  if (text == "random-subset") return StartMode::RandomSubset;
  throw std::invalid_argument("unknown start mode '" + text +
                              "' (expected 'empty' or 'random-subset')");
}

void validate_agent_config(const AgentConfig& config) {
  if (!(config.alpha > 0.0 && config.alpha <= 1.0)) {
    throw std::invalid_argument("alpha must be in (0, 1]");
  }
  if (!(config.gamma >= 0.0 && config.gamma <= 1.0)) {
    throw std::invalid_argument("gamma must be in [0, 1]");
  }
  if (!(config.epsilon >= 0.0 && config.epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must be in [0, 1]");
  }
  if (config.episodes < 0) {
    throw std::invalid_argument("episodes must be >= 0");
  }
  if (config.max_subset_size && *config.max_subset_size == 0) {
    throw std::invalid_argument("max_subset_size must be >= 1 when set");
  }
}

double StateValueTable::value(const FeatureSubset& s) const {
  auto it = entries_.find(s);
  return it == entries_.end() ? 0.0 : it->second.value;
}

std::uint64_t StateValueTable::visits(const FeatureSubset& s) const {
  auto it = entries_.find(s);
  return it == entries_.end() ? 0 : it->second.visits;
}

bool StateValueTable::visited(const FeatureSubset& s) const {
  return entries_.find(s) != entries_.end();
}

void StateValueTable::record(const FeatureSubset& s, double v) {
  Entry& e = entries_[s];
  e.value = v;
  e.visits += 1;
}

double StateValueTable::max_value() const {
  double best = 0.0;
  bool first = true;
  for (const auto& [key, entry] : entries_) {
    if (first || entry.value > best) best = entry.value;
    first = false;
  }
  return best;
}

std::vector<std::pair<FeatureSubset, double>> StateValueTable::entries_sorted() const {
  std::vector<std::pair<FeatureSubset, double>> out;
  out.reserve(entries_.size());
  for (const auto& [key, entry] : entries_) out.emplace_back(key, entry.value);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return FeatureSubset::compare_bits(a.first, b.first) < 0;
  });
  return out;
}

double MtRandomSource::uniform01() {
  // 53 random bits into [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t MtRandomSource::bounded(std::uint64_t n) {
  // Unbiased modulo: reject draws from the final partial bucket.
  std::uint64_t x, r;
  do {
    x = engine_();
    r = x % n;
  } while (x - r > std::uint64_t(0) - n);
  return r;
}

std::size_t MtRandomSource::pick_count(std::size_t max_inclusive) {
  return static_cast<std::size_t>(bounded(static_cast<std::uint64_t>(max_inclusive) + 1));
}

std::size_t MtRandomSource::pick_feature(std::span<const std::size_t> candidates) {
  if (candidates.empty()) {
    throw std::invalid_argument("pick_feature: no candidates");
  }
  return candidates[static_cast<std::size_t>(bounded(candidates.size()))];
}

namespace {

void require_successor(const FeatureSubset& s, const FeatureSubset& s_next, const char* who) {
  if (s_next.cardinality() != s.cardinality() + 1 || !s.is_subset_of(s_next)) {
    throw std::invalid_argument(std::string(who) +
                                ": next state must add exactly one feature to the current state");
  }
}

}  // namespace

double td_update(StateValueTable& table, const FeatureSubset& s, const FeatureSubset& s_next,
                 double r, double alpha, double gamma) {
  require_successor(s, s_next, "td_update");
  const double v = table.value(s);
  const double v_next = table.value(s_next);
  const double updated = v + alpha * (r + gamma * v_next - v);
  table.record(s, updated);
  return updated;
}

double update_aor(AorTable& table, std::size_t f, double r) {
  if (f >= table.dimension()) {
    throw std::out_of_range("update_aor: feature " + std::to_string(f) +
                            " out of range for " + std::to_string(table.dimension()) +
                            " features");
  }
  const std::uint64_t k = ++table.counts[f];
  table.averages[f] = (static_cast<double>(k - 1) * table.averages[f] + r) /
                      static_cast<double>(k);
  return table.averages[f];
}

ActionChoice select_action(const FeatureSubset& state, const AorTable& aor,
                           const StateValueTable& values, double epsilon, RandomSource& rng) {
  if (aor.dimension() != state.dimension()) {
    throw std::invalid_argument("select_action: AOR table dimension mismatch");
  }
  const std::vector<std::size_t> avail = state.available();
  if (avail.empty()) {
    throw std::invalid_argument("select_action: terminal state, no available feature");
  }
  if (!values.visited(state)) {
    return {rng.pick_feature(avail), Phase::Random};
  }
  if (rng.uniform01() < epsilon) {
    return {rng.pick_feature(avail), Phase::Explore};
  }
  // Greedy over available features; avail is ascending, so > keeps the
  // lowest index on ties.
  std::size_t best = avail[0];
  for (std::size_t f : avail) {
    if (aor.averages[f] > aor.averages[best]) best = f;
  }
  return {best, Phase::Greedy};
}

namespace {

FeatureSubset draw_start_state(const AgentConfig& config, std::size_t d, RandomSource& rng) {
  FeatureSubset state(d);
  if (config.start_mode == StartMode::Empty) return state;
  std::size_t cap = d / 2;
  if (config.max_subset_size && *config.max_subset_size - 1 < cap) {
    cap = *config.max_subset_size - 1;  // leave room for at least one step
  }
  const std::size_t cardinality = rng.pick_count(cap);
  for (std::size_t i = 0; i < cardinality; ++i) {
    state = state.with(rng.pick_feature(state.available()));
  }
  return state;
}

}  // namespace

EpisodeTrace run_episode(const AgentConfig& config, StateValueTable& values, AorTable& aor,
                         const SubsetEvaluator& evaluator, RandomSource& rng) {
  validate_agent_config(config);
  const std::size_t d = evaluator.data().n_features();
  if (aor.dimension() != d) {
    throw std::invalid_argument("run_episode: AOR table dimension mismatch");
  }

  EpisodeTrace trace;
  trace.start_state = draw_start_state(config, d, rng);

  std::size_t limit = d;
  if (config.max_subset_size && *config.max_subset_size < d) {
    limit = *config.max_subset_size;
  }

  FeatureSubset state = trace.start_state;
  std::optional<SubsetEvaluation> prev;
  while (state.cardinality() < limit) {
    if (!prev) prev = evaluator.evaluate(state);
    const ActionChoice choice = select_action(state, aor, values, config.epsilon, rng);
    const FeatureSubset next = state.with(choice.feature);
    const SubsetEvaluation next_eval = evaluator.evaluate(next);
    const double r = reward(*prev, next_eval);
    const double v = td_update(values, state, next, r, config.alpha, config.gamma);
    update_aor(aor, choice.feature, r);
    trace.steps.push_back({state, choice.feature, r, v, choice.phase});
    state = next;
    prev = next_eval;
  }
  trace.terminal = true;
  return trace;
}

std::vector<std::size_t> rank_features_by_aor(const AorTable& aor) {
  std::vector<std::size_t> order(aor.dimension());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&aor](std::size_t a, std::size_t b) {
    const bool seen_a = aor.counts[a] > 0;
    const bool seen_b = aor.counts[b] > 0;
    if (seen_a != seen_b) return seen_a;  // never-selected features go last
    if (seen_a && aor.averages[a] != aor.averages[b]) {
      return aor.averages[a] > aor.averages[b];
    }
    return a < b;
  });
  return order;
}

SearchResult run_search(const SearchParams& params, const Dataset& data,
                        EvalCache* external_cache) {
  validate_agent_config(params.agent);

  SearchResult result;
  if (external_cache) {
    result.cache = external_cache;
  } else {
    result.owned_cache = std::make_unique<EvalCache>();
    result.cache = result.owned_cache.get();
  }

  const std::uint64_t seed = params.agent.seed;
  result.folds = make_folds(data, params.folds, derive_seed(seed, "folds"));
  result.aor = AorTable(data.n_features());

  const SubsetEvaluator evaluator(data, result.folds, params.svm, derive_seed(seed, "svm"),
                                  result.cache);
  MtRandomSource rng(derive_seed(seed, "agent"));

  double running_max = -std::numeric_limits<double>::infinity();
  for (int e = 0; e < params.agent.episodes; ++e) {
    EpisodeTrace trace = run_episode(params.agent, result.values, result.aor, evaluator, rng);

    EpisodeStats stats;
    stats.episode = e;
    stats.steps = trace.steps.size();
    stats.states_visited = result.values.size();
    stats.max_state_value = result.values.max_value();
    running_max = std::max(running_max, stats.max_state_value);
    stats.running_max_value = running_max;
    if (auto best = result.cache->best_entry()) stats.best_accuracy = best->mean_accuracy;
    result.episode_stats.push_back(stats);
    result.traces.push_back(std::move(trace));
  }

  if (params.agent.episodes > 0) result.best = result.cache->best_entry();
  return result;
}

}  // namespace fsrl
