#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "rlcg/checkpoint.hpp"
#include "rlcg/commands.hpp"
#include "rlcg/csv.hpp"
#include "rlcg/io_error.hpp"

using namespace rlcg;
using namespace rlcg::cli;

namespace {

void add_hyper_flags(CLI::App* app, HyperParams& h) {
  app->add_option("--alpha", h.alpha, "reward weight of the objective decrease")->capture_default_str();
  app->add_option("--epsilon", h.epsilon, "exploration probability")->capture_default_str();
  app->add_option("--gamma", h.gamma, "discount factor")->capture_default_str();
  app->add_option("--lr", h.lr, "Adam learning rate")->capture_default_str();
  app->add_option("--k", h.k_candidates, "candidate pool size")->capture_default_str();
  app->add_option("--max-iters", h.max_iters, "CG iteration cap per episode")->capture_default_str();
  app->add_option("--batch-size", h.batch_size)->capture_default_str();
  app->add_option("--replay-capacity", h.replay_capacity)->capture_default_str();
  app->add_option("--hidden", h.hidden, "embedding width")->capture_default_str();
  app->add_option("--rounds", h.rounds, "message-passing rounds")->capture_default_str();
  app->add_option("--target-sync", h.target_sync_every, "0 = bootstrap from the online network")
      ->capture_default_str();
  app->add_option("--updates-per-step", h.updates_per_step, "Adam steps per environment step")
      ->capture_default_str();
}

void print_record(const RunRecord& r) {
  std::cout << r.instance_name << " policy=" << r.policy << " iterations=" << r.iterations
            << " objective=" << format_double(r.objective) << " time=" << format_double(r.wall_time_seconds)
            << (r.converged ? "" : " (iteration cap reached)") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reinforcement-learning-guided column generation for cutting stock"};
  app.require_subcommand(1);

  GenerateArgs gen;
  std::string gen_preset, gen_config, gen_stage;
  std::uint64_t gen_seed = 0;
  auto* generate = app.add_subcommand("generate", "write BPPLIB instance files");
  generate->add_option("--preset", gen_preset, "full | desk | desk-val | desk-test");
  generate->add_option("--config", gen_config, "stage file with lines 'count L m fmin fmax'");
  generate->add_option("--stage", gen_stage, "single stage 'count L m fmin fmax'");
  auto* gen_seed_opt = generate->add_option("--seed", gen_seed, "base seed (instance i uses seed + i)");
  generate->add_option("--out", gen.out_dir, "output directory")->required();

  SolveArgs solve;
  std::string solve_model;
  auto* solve_cmd = app.add_subcommand("solve", "run column generation on one instance");
  solve_cmd->add_option("--instance", solve.instance_path, "BPPLIB file")->required();
  solve_cmd->add_option("--policy", solve.policy, "greedy | expert | rl")->capture_default_str();
  auto* solve_model_opt = solve_cmd->add_option("--model", solve_model, "checkpoint for --policy rl");
  solve_cmd->add_option("--k", solve.k)->capture_default_str();
  solve_cmd->add_option("--max-iters", solve.max_iters)->capture_default_str();
  std::string solve_out, solve_traj;
  solve_cmd->add_option("--out", solve_out, "RunRecord CSV");
  solve_cmd->add_option("--trajectory", solve_traj, "normalized trajectory CSV");

  TrainArgs train;
  std::string train_val;
  auto* train_cmd = app.add_subcommand("train", "train a DQN agent over a curriculum");
  train_cmd->add_option("--curriculum", train.curriculum, "instance dir, stage file, or preset:<name>")
      ->default_val("preset:desk");
  train_cmd->add_option("--val", train_val, "validation instances (same forms as --curriculum)");
  add_hyper_flags(train_cmd, train.hyper);
  train_cmd->add_option("--seed", train.seed)->capture_default_str();
  train_cmd->add_option("--episodes", train.episodes, "cap on episodes; negative = whole curriculum")
      ->capture_default_str();
  train_cmd->add_option("--validate-every", train.validate_every)->capture_default_str();
  train_cmd->add_option("--out", train.out_dir, "output directory")->required();
  bool train_quiet = false;
  train_cmd->add_flag("--quiet", train_quiet, "no per-episode progress");

  EvaluateArgs eval;
  std::string eval_model;
  auto* eval_cmd = app.add_subcommand("evaluate", "compare policies on a test directory");
  eval_cmd->add_option("--test", eval.test_dir, "directory of BPPLIB files")->required();
  eval_cmd->add_option("--policies", eval.policies, "policies to compare")->delimiter(',')->capture_default_str();
  auto* eval_model_opt = eval_cmd->add_option("--model", eval_model, "checkpoint for rl");
  eval_cmd->add_option("--k", eval.k)->capture_default_str();
  eval_cmd->add_option("--max-iters", eval.max_iters)->capture_default_str();
  eval_cmd->add_option("--out", eval.out_csv, "comparison CSV")->required();
  eval_cmd->add_flag("--omit-timing", eval.omit_timing, "write 0 for wall times");

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "render SVG charts from a comparison CSV");
  plot_cmd->add_option("--in", plot.comparison_csv, "comparison CSV")->required();
  plot_cmd->add_option("--out", plot.out_dir, "output directory")->required();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "random search over the hyperparameter grid");
  sweep_cmd->add_option("--alphas", sweep.grid.alphas)->delimiter(',');
  sweep_cmd->add_option("--epsilons", sweep.grid.epsilons)->delimiter(',');
  sweep_cmd->add_option("--gammas", sweep.grid.gammas)->delimiter(',');
  sweep_cmd->add_option("--lrs", sweep.grid.lrs)->delimiter(',');
  sweep_cmd->add_option("--n-samples", sweep.n_samples)->capture_default_str();
  sweep_cmd->add_option("--curriculum", sweep.curriculum)->default_val("preset:desk");
  sweep_cmd->add_option("--val", sweep.validation)->default_val("preset:desk-val");
  sweep_cmd->add_option("--seed", sweep.seed)->capture_default_str();
  sweep_cmd->add_option("--episodes", sweep.episodes)->capture_default_str();
  sweep_cmd->add_option("--k", sweep.base.k_candidates)->capture_default_str();
  sweep_cmd->add_option("--max-iters", sweep.base.max_iters)->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out_csv, "sweep report CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (auto& c : msg)
      if (c == '\n') c = ' ';
    std::cerr << "error: usage: " << msg << '\n';
    return 2;
  }

  try {
    const std::size_t threads = thread_cap();
    if (generate->parsed()) {
      if (!gen_preset.empty()) gen.preset = gen_preset;
      if (!gen_config.empty()) gen.stage_config_path = gen_config;
      if (!gen_stage.empty()) {
        const auto stages = parse_stage_config(gen_stage);
        if (stages.size() != 1) throw CommandError("invalid_spec", "--stage takes one 'count L m fmin fmax' line");
        gen.stage = stages.front();
      }
      if (gen_seed_opt->count() > 0) gen.seed = gen_seed;
      const auto files = cmd_generate(gen);
      std::cout << "wrote " << files.size() << " instance files to " << gen.out_dir << '\n';
    } else if (solve_cmd->parsed()) {
      if (solve_model_opt->count() > 0) solve.model_path = solve_model;
      if (!solve_out.empty()) solve.record_csv = solve_out;
      if (!solve_traj.empty()) solve.trajectory_csv = solve_traj;
      print_record(cmd_solve(solve));
    } else if (train_cmd->parsed()) {
      if (!train_val.empty()) train.validation = train_val;
      if (!train_quiet) train.progress = &std::cerr;
      const auto out = cmd_train(train);
      std::cout << "checkpoint " << out.checkpoint_path << '\n';
      for (const auto& v : out.result.validation_log)
        std::cout << "validation episode " << v.episode << " mean_ratio=" << format_double(v.mean_ratio) << '\n';
    } else if (eval_cmd->parsed()) {
      if (eval_model_opt->count() > 0) eval.model_path = eval_model;
      eval.threads = threads;
      const auto out = cmd_evaluate(eval);
      std::cout << "wrote " << out.comparison_path << " and " << out.convergence_path << '\n';
    } else if (plot_cmd->parsed()) {
      for (const auto& f : cmd_plot(plot)) std::cout << f << '\n';
    } else if (sweep_cmd->parsed()) {
      sweep.threads = threads;
      const auto results = cmd_sweep(sweep);
      std::cout << "wrote " << results.size() << " configurations to " << sweep.out_csv << '\n';
    }
  } catch (const CommandError& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: io: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: parse: " << e.what() << '\n';
    return 2;
  } catch (const InstanceError& e) {
    std::cerr << "error: invalid_spec: " << e.what() << '\n';
    return 2;
  } catch (const CheckpointError& e) {
    std::cerr << "error: checkpoint: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
