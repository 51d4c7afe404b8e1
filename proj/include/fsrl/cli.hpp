#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fsrl/agent.hpp"

namespace fsrl::cli {

// One flat configuration for every command; each command reads the fields it
// needs. The fully-resolved config is echoed into every output artifact, and
// any artifact's embedded config can be fed back through --config to
// reproduce the run.
struct RunConfig {
  std::string data_path;
  std::string label_column = "last";

  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon = 0.5;
  int episodes = 100;
  std::string start_mode = "random-subset";
  std::optional<std::size_t> max_subset_size;

  int folds = 5;
  double svm_c = 1.0;
  std::optional<double> svm_gamma;  // absent = 1/d

  std::uint64_t seed = 0;
  std::string out_dir = "out";

  // sweep-epsilon
  std::vector<double> sweep_epsilons{0.0, 0.25, 0.5, 0.75, 1.0};
  int sweep_seeds = 20;

  // rank
  std::vector<std::string> methods{"rl-aor", "pearson", "fisher", "ttest"};
  std::optional<std::size_t> top_k;  // curve length, default d

  // synth
  std::size_t synth_samples = 200;
  std::size_t synth_informative = 3;
  std::size_t synth_noise = 7;
};

nlohmann::json config_to_json(const RunConfig& config);

// Reads a config object, starting from defaults. A {"config": {...}} wrapper
// (as emitted in report.json) is unwrapped; unknown keys other than
// "command" are rejected.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

// Range checks shared by every command; throws std::invalid_argument.
void validate_run_config(const RunConfig& config);

svm::SvmConfig svm_config(const RunConfig& config);
SearchParams search_params(const RunConfig& config);

// Commands return a process exit code; they throw on config/data errors
// (main turns that into a diagnostic plus a nonzero exit). Computation runs
// before any file is written, and a failed write removes the files already
// written, so failures leave no partial artifacts.
int cmd_select(const RunConfig& config);
int cmd_sweep_epsilon(const RunConfig& config);
int cmd_rank(const RunConfig& config);
int cmd_synth(const RunConfig& config);

}  // namespace fsrl::cli
