#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlcg/agent.hpp"
#include "rlcg/hyper.hpp"
#include "rlcg/instances.hpp"
#include "rlcg/policies.hpp"

namespace rlcg::cli {

// Errors surfaced to the user as "error: <code>: <message>" with exit code 2.
class CommandError : public std::runtime_error {
 public:
  CommandError(std::string code, const std::string& what) : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Named stage lists: full, desk, desk-val, desk-test.
std::vector<CurriculumStage> preset_stages(const std::string& name);
std::uint64_t preset_seed(const std::string& name);

// Instance files of a directory (*.txt) in filename order.
std::vector<Instance> load_instance_dir(const std::string& dir);
// A directory of instance files, a stage config file, or "preset:<name>".
std::vector<Instance> load_instances(const std::string& source, std::uint64_t seed_if_generated);

struct GenerateArgs {
  std::optional<std::string> preset;
  std::optional<std::string> stage_config_path;
  std::optional<CurriculumStage> stage;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};
// Writes "NNNN_<name>.txt" files so that filename order is curriculum order.
std::vector<std::string> cmd_generate(const GenerateArgs& args);

struct RunRecord {
  std::string instance_name;
  std::string policy;
  int iterations = 0;
  double wall_time_seconds = 0.0;
  double objective = 0.0;
  bool converged = false;
};

struct SolveArgs {
  std::string instance_path;
  std::string policy = "greedy";
  std::optional<std::string> model_path;
  std::size_t k = kDefaultPoolSize;
  int max_iters = 1000;
  std::optional<std::string> trajectory_csv;
  std::optional<std::string> record_csv;
};
RunRecord cmd_solve(const SolveArgs& args);

struct TrainArgs {
  std::string curriculum;  // see load_instances
  std::optional<std::string> validation;
  HyperParams hyper;
  std::uint64_t seed = 0;
  int episodes = -1;
  int validate_every = 20;
  std::string out_dir;
  std::ostream* progress = nullptr;
};
struct TrainOutputs {
  std::string checkpoint_path;
  std::string training_log_path;
  std::string validation_log_path;
  TrainingResult result;
};
TrainOutputs cmd_train(const TrainArgs& args);

struct EvaluateArgs {
  std::string test_dir;
  std::vector<std::string> policies = {"greedy", "rl"};
  std::optional<std::string> model_path;
  std::size_t k = kDefaultPoolSize;
  int max_iters = 1000;
  std::string out_csv;
  // Writes 0 for wall times so the files are byte-reproducible.
  bool omit_timing = false;
  std::size_t threads = 1;
};
struct EvaluateOutputs {
  std::vector<RunRecord> runs;
  std::string comparison_path;
  std::string convergence_path;
};
EvaluateOutputs cmd_evaluate(const EvaluateArgs& args);

// Sibling file holding the mean normalized trajectories.
std::string convergence_path_for(const std::string& comparison_csv);

struct PlotArgs {
  std::string comparison_csv;
  std::string out_dir;
};
std::vector<std::string> cmd_plot(const PlotArgs& args);

struct SweepArgs {
  SweepGrid grid = default_grid();
  std::size_t n_samples = 31;
  std::string curriculum;
  std::string validation;
  HyperParams base;
  std::uint64_t seed = 0;
  int episodes = -1;
  std::string out_csv;
  std::size_t threads = 1;
};
std::vector<SweepResult> cmd_sweep(const SweepArgs& args);

void write_training_log(std::ostream& out, const std::vector<EpisodeLog>& log);
void write_validation_log(std::ostream& out, const std::vector<ValidationRecord>& log);
void write_sweep_report(std::ostream& out, const std::vector<SweepResult>& results);

// RLCG_THREADS, default 1.
std::size_t thread_cap();

}  // namespace rlcg::cli
