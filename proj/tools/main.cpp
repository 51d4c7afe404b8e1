#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fsrl/cli.hpp"

namespace {

// Raw flag storage; only flags actually given on the command line override
// the config file, which overrides built-in defaults.
struct FlagBag {
  std::string config_path;
  std::string data;
  std::string label_column;
  std::string start_mode;
  std::string out_dir;
  double alpha = 0.0, gamma = 0.0, epsilon = 0.0, svm_c = 0.0, svm_gamma = 0.0;
  int episodes = 0, folds = 0, sweep_seeds = 0;
  std::uint64_t seed = 0;
  std::size_t max_subset_size = 0, top_k = 0;
  std::size_t samples = 0, informative = 0, noise = 0;
  std::vector<double> epsilons;
  std::vector<std::string> methods;
};

void add_common_flags(CLI::App* cmd, FlagBag& f) {
  cmd->add_option("--config", f.config_path,
                  "JSON config file; explicit flags override its values");
  cmd->add_option("--data", f.data, "input CSV with a header row");
  cmd->add_option("--label-column", f.label_column, "label column name, or 'last'");
  cmd->add_option("--alpha", f.alpha, "TD learning rate in (0,1]");
  cmd->add_option("--gamma", f.gamma, "TD discount in [0,1]");
  cmd->add_option("--epsilon", f.epsilon, "exploration probability in [0,1]");
  cmd->add_option("--episodes", f.episodes, "number of episodes");
  cmd->add_option("--start-mode", f.start_mode, "'empty' or 'random-subset'");
  cmd->add_option("--max-subset-size", f.max_subset_size, "stop episodes at this cardinality");
  cmd->add_option("--folds", f.folds, "cross-validation folds");
  cmd->add_option("--svm-c", f.svm_c, "SVM soft-margin C");
  cmd->add_option("--svm-gamma", f.svm_gamma, "Gaussian kernel width (default 1/d)");
  cmd->add_option("--seed", f.seed, "root random seed");
  cmd->add_option("--out-dir", f.out_dir, "output directory");
}

bool given(const CLI::App* cmd, const std::string& name) {
  const CLI::Option* opt = cmd->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

fsrl::cli::RunConfig resolve(const CLI::App* cmd, const FlagBag& f) {
  fsrl::cli::RunConfig c;
  if (given(cmd, "--config")) c = fsrl::cli::load_config_file(f.config_path);
  if (given(cmd, "--data")) c.data_path = f.data;
  if (given(cmd, "--label-column")) c.label_column = f.label_column;
  if (given(cmd, "--alpha")) c.alpha = f.alpha;
  if (given(cmd, "--gamma")) c.gamma = f.gamma;
  if (given(cmd, "--epsilon")) c.epsilon = f.epsilon;
  if (given(cmd, "--episodes")) c.episodes = f.episodes;
  if (given(cmd, "--start-mode")) c.start_mode = f.start_mode;
  if (given(cmd, "--max-subset-size")) c.max_subset_size = f.max_subset_size;
  if (given(cmd, "--folds")) c.folds = f.folds;
  if (given(cmd, "--svm-c")) c.svm_c = f.svm_c;
  if (given(cmd, "--svm-gamma")) c.svm_gamma = f.svm_gamma;
  if (given(cmd, "--seed")) c.seed = f.seed;
  if (given(cmd, "--out-dir")) c.out_dir = f.out_dir;
  if (given(cmd, "--epsilons")) c.sweep_epsilons = f.epsilons;
  if (given(cmd, "--sweep-seeds")) c.sweep_seeds = f.sweep_seeds;
  if (given(cmd, "--methods")) c.methods = f.methods;
  if (given(cmd, "--top-k")) c.top_k = f.top_k;
  if (given(cmd, "--samples")) c.synth_samples = f.samples;
  if (given(cmd, "--informative")) c.synth_informative = f.informative;
  if (given(cmd, "--noise")) c.synth_noise = f.noise;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fsrl: feature selection by TD(0) reinforcement learning over feature subsets,"
               " with an SVM wrapper evaluator and filter-method baselines"};
  app.require_subcommand(1);
  FlagBag f;

  CLI::App* select = app.add_subcommand(
      "select", "run the RL search and report the best feature subset");
  add_common_flags(select, f);

  CLI::App* sweep = app.add_subcommand(
      "sweep-epsilon", "run a grid of searches across epsilon values and seeds");
  add_common_flags(sweep, f);
  sweep->add_option("--epsilons", f.epsilons, "comma-separated epsilon values")
      ->delimiter(',');
  sweep->add_option("--sweep-seeds", f.sweep_seeds, "seeds per epsilon (seed, seed+1, ...)");

  CLI::App* rank = app.add_subcommand(
      "rank", "produce feature rankings and top-k accuracy curves");
  add_common_flags(rank, f);
  rank->add_option("--methods", f.methods,
                   "comma-separated subset of rl-aor,pearson,fisher,ttest")
      ->delimiter(',');
  rank->add_option("--top-k", f.top_k, "curve length (default: all features)");

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic benchmark dataset");
  add_common_flags(synth, f);
  synth->add_option("--samples", f.samples, "number of rows");
  synth->add_option("--informative", f.informative, "label-carrying feature count");
  synth->add_option("--noise", f.noise, "label-independent feature count");

  CLI11_PARSE(app, argc, argv);

  try {
    const CLI::App* cmd = app.get_subcommands().front();
    const fsrl::cli::RunConfig config = resolve(cmd, f);
    if (cmd == select) return fsrl::cli::cmd_select(config);
    if (cmd == sweep) return fsrl::cli::cmd_sweep_epsilon(config);
    if (cmd == rank) return fsrl::cli::cmd_rank(config);
    return fsrl::cli::cmd_synth(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
