#include "rlcg/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "rlcg/checkpoint.hpp"
#include "rlcg/csv.hpp"
#include "rlcg/io_error.hpp"
#include "rlcg/svg_plot.hpp"

namespace rlcg::cli {

namespace fs = std::filesystem;

std::size_t thread_cap() {
  const char* env = std::getenv("RLCG_THREADS");
  if (env == nullptr) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || v < 1) return 1;
  return static_cast<std::size_t>(v);
}

std::vector<CurriculumStage> preset_stages(const std::string& name) {
  if (name == "full") return presets::full_curriculum();
  if (name == "desk") return presets::desk_curriculum();
  if (name == "desk-val") return presets::desk_validation();
  if (name == "desk-test") return presets::desk_test();
  throw CommandError("invalid_preset", "unknown preset '" + name + "' (full, desk, desk-val, desk-test)");
}

std::uint64_t preset_seed(const std::string& name) {
  if (name == "desk-val") return presets::kValidationSeed;
  if (name == "desk-test") return presets::kTestSeed;
  return presets::kTrainSeed;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CommandError("io", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ofstream open_out(const std::string& path) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CommandError("io", "cannot write " + path);
  return out;
}

std::string pad_index(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return buf;
}

// Strips the "NNNN_" ordering prefix written by cmd_generate.
std::string display_name(const std::string& stem) {
  if (stem.size() > 5 && stem[4] == '_' && std::all_of(stem.begin(), stem.begin() + 4, ::isdigit)) return stem.substr(5);
  return stem;
}

}  // namespace

std::vector<Instance> load_instance_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw CommandError("io", "not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  std::vector<Instance> out;
  for (const auto& f : files) {
    Instance inst = load_bpplib_file(f);
    inst.name = display_name(inst.name);
    out.push_back(std::move(inst));
  }
  if (out.empty()) throw CommandError("io", "no instance files (*.txt) in " + dir);
  return out;
}

std::vector<Instance> load_instances(const std::string& source, std::uint64_t seed_if_generated) {
  if (source.rfind("preset:", 0) == 0) return build_curriculum(preset_stages(source.substr(7)), seed_if_generated);
  if (fs::is_directory(source)) return load_instance_dir(source);
  return build_curriculum(parse_stage_config(read_file(source)), seed_if_generated);
}

std::vector<std::string> cmd_generate(const GenerateArgs& args) {
  std::vector<CurriculumStage> stages;
  std::uint64_t seed = presets::kTrainSeed;
  const int sources = (args.preset ? 1 : 0) + (args.stage_config_path ? 1 : 0) + (args.stage ? 1 : 0);
  if (sources != 1) throw CommandError("usage", "give exactly one of --preset, --config or --stage");
  if (args.preset) {
    stages = preset_stages(*args.preset);
    seed = preset_seed(*args.preset);
  } else if (args.stage_config_path) {
    stages = parse_stage_config(read_file(*args.stage_config_path));
  } else {
    try {
      validate(*args.stage);
    } catch (const InstanceError& e) {
      throw CommandError("invalid_spec", e.what());
    }
    stages = {*args.stage};
  }
  if (args.seed) seed = *args.seed;
  std::vector<Instance> instances;
  try {
    instances = build_curriculum(stages, seed);
  } catch (const InstanceError& e) {
    throw CommandError("invalid_spec", e.what());
  }
  fs::create_directories(args.out_dir);
  std::vector<std::string> paths;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const std::string path = (fs::path(args.out_dir) / (pad_index(i) + "_" + instances[i].name + ".txt")).string();
    save_bpplib_file(instances[i], path);
    paths.push_back(path);
  }
  return paths;
}

namespace {

EnvironmentOptions env_options(std::size_t k) {
  EnvironmentOptions o;
  o.k = k;
  return o;
}

std::unique_ptr<ColumnSelector> policy_from(const std::string& name, const std::optional<std::string>& model_path) {
  PolicyKind kind;
  try {
    kind = parse_policy_kind(name);
  } catch (const std::invalid_argument& e) {
    throw CommandError("usage", e.what());
  }
  if (kind != PolicyKind::Rl) return make_policy(kind);
  if (!model_path) throw CommandError("usage", "--policy rl requires --model");
  const Checkpoint ckpt = read_checkpoint_file(*model_path);
  return make_policy(kind, &ckpt.params);
}

const std::vector<std::string> kRecordHeader = {"instance_name", "policy", "iterations", "wall_time_seconds",
                                                "objective", "converged"};

}  // namespace

RunRecord cmd_solve(const SolveArgs& args) {
  auto policy = policy_from(args.policy, args.model_path);
  const Instance instance = load_bpplib_file(args.instance_path);
  const CgRun run = run_cg(instance, *policy, {args.max_iters}, env_options(args.k));
  RunRecord rec{display_name(instance.name), args.policy, run.iterations, run.wall_time_seconds, run.objective,
                run.converged};
  if (args.trajectory_csv) {
    auto out = open_out(*args.trajectory_csv);
    write_trajectory_csv(out, run.trajectory);
  }
  if (args.record_csv) {
    auto out = open_out(*args.record_csv);
    CsvWriter csv(out, kRecordHeader);
    csv.row(rec.instance_name, rec.policy, rec.iterations, rec.wall_time_seconds, rec.objective,
            static_cast<int>(rec.converged));
  }
  return rec;
}

void write_training_log(std::ostream& out, const std::vector<EpisodeLog>& log) {
  CsvWriter csv(out, {"episode", "instance_name", "iterations", "total_reward", "mean_loss"});
  for (const auto& e : log) csv.row(e.episode, e.instance_name, e.iterations, e.total_reward, e.mean_loss);
}

void write_validation_log(std::ostream& out, const std::vector<ValidationRecord>& log) {
  CsvWriter csv(out, {"episode", "mean_ratio", "std_ratio"});
  for (const auto& v : log) csv.row(v.episode, v.mean_ratio, v.std_ratio);
}

void write_sweep_report(std::ostream& out, const std::vector<SweepResult>& results) {
  CsvWriter csv(out, {"rank", "model_index", "alpha", "epsilon", "gamma", "lr", "mean_ratio", "median_ratio",
                      "std_ratio"});
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    csv.row(static_cast<long long>(i + 1), static_cast<long long>(r.sample_index), r.config.alpha, r.config.epsilon,
            r.config.gamma, r.config.lr, r.mean_ratio, r.median_ratio, r.std_ratio);
  }
}

TrainOutputs cmd_train(const TrainArgs& args) {
  try {
    validate(args.hyper);
  } catch (const std::invalid_argument& e) {
    throw CommandError("invalid_hyperparameters", e.what());
  }
  const auto curriculum = load_instances(args.curriculum, presets::kTrainSeed);
  std::vector<Instance> validation;
  if (args.validation) validation = load_instances(*args.validation, presets::kValidationSeed);

  TrainingOptions opts;
  opts.validate_every = args.validate_every;
  opts.max_episodes = args.episodes;
  if (args.progress) {
    std::ostream* progress = args.progress;
    opts.on_episode = [progress](const EpisodeLog& e) {
      *progress << "episode " << e.episode << " " << e.instance_name << " iterations=" << e.iterations
                << " reward=" << format_double(e.total_reward) << '\n';
    };
  }
  TrainOutputs out;
  out.result = train_curriculum(curriculum, args.hyper, validation, args.seed, opts);
  fs::create_directories(args.out_dir);
  out.checkpoint_path = (fs::path(args.out_dir) / "model.ckpt").string();
  out.training_log_path = (fs::path(args.out_dir) / "training_log.csv").string();
  out.validation_log_path = (fs::path(args.out_dir) / "validation_log.csv").string();
  write_checkpoint_file(out.checkpoint_path, out.result.params, args.hyper);
  {
    auto f = open_out(out.training_log_path);
    write_training_log(f, out.result.training_log);
  }
  {
    auto f = open_out(out.validation_log_path);
    write_validation_log(f, out.result.validation_log);
  }
  return out;
}

std::string convergence_path_for(const std::string& comparison_csv) {
  fs::path p(comparison_csv);
  return (p.parent_path() / (p.stem().string() + "_convergence.csv")).string();
}

EvaluateOutputs cmd_evaluate(const EvaluateArgs& args) {
  if (args.policies.empty()) throw CommandError("usage", "no policies given");
  const auto instances = load_instance_dir(args.test_dir);
  std::optional<Checkpoint> ckpt;
  for (const auto& p : args.policies) {
    try {
      if (parse_policy_kind(p) == PolicyKind::Rl && !ckpt) {
        if (!args.model_path) throw CommandError("usage", "policy rl requires --model");
        ckpt = read_checkpoint_file(*args.model_path);
      }
    } catch (const std::invalid_argument& e) {
      throw CommandError("usage", e.what());
    }
  }

  struct Job {
    std::size_t instance;
    std::size_t policy;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < args.policies.size(); ++p)
    for (std::size_t i = 0; i < instances.size(); ++i) jobs.push_back({i, p});
  std::vector<CgRun> runs(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
      try {
        const auto kind = parse_policy_kind(args.policies[jobs[j].policy]);
        auto policy = make_policy(kind, ckpt ? &ckpt->params : nullptr);
        runs[j] = run_cg(instances[jobs[j].instance], *policy, {args.max_iters}, env_options(args.k));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(args.threads, jobs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  EvaluateOutputs out;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto& run = runs[j];
    out.runs.push_back({instances[jobs[j].instance].name, args.policies[jobs[j].policy], run.iterations,
                        args.omit_timing ? 0.0 : run.wall_time_seconds, run.objective, run.converged});
  }

  // Greedy iterations per instance for the geometric-mean ratio column.
  std::map<std::string, int> greedy_iters;
  for (const auto& r : out.runs)
    if (r.policy == "greedy") greedy_iters[r.instance_name] = r.iterations;

  out.comparison_path = args.out_csv;
  {
    auto f = open_out(args.out_csv);
    CsvWriter csv(f, {"kind", "policy", "instance_name", "iterations", "wall_time_seconds", "objective", "iter_mean",
                      "iter_median", "iter_std", "time_mean", "time_median", "time_std",
                      "geomean_greedy_over_policy"});
    for (const auto& r : out.runs)
      csv.raw_row({"run", r.policy, r.instance_name, std::to_string(r.iterations), format_double(r.wall_time_seconds),
                   format_double(r.objective), "", "", "", "", "", "", ""});
    for (const auto& policy : args.policies) {
      std::vector<double> iters, times, log_ratios;
      for (const auto& r : out.runs) {
        if (r.policy != policy) continue;
        iters.push_back(r.iterations);
        times.push_back(r.wall_time_seconds);
        if (auto it = greedy_iters.find(r.instance_name); it != greedy_iters.end())
          log_ratios.push_back(std::log(iteration_ratio(it->second, r.iterations)));
      }
      const RatioSummary si = summarize(iters);
      const RatioSummary st = summarize(times);
      std::string geo;
      if (!log_ratios.empty()) {
        double sum = 0.0;
        for (double l : log_ratios) sum += l;
        geo = format_double(std::exp(sum / static_cast<double>(log_ratios.size())));
      }
      csv.raw_row({"summary", policy, "*", "", "", "", format_double(si.mean), format_double(si.median),
                   format_double(si.std), format_double(st.mean), format_double(st.median), format_double(st.std), geo});
    }
  }

  out.convergence_path = convergence_path_for(args.out_csv);
  {
    auto f = open_out(out.convergence_path);
    CsvWriter csv(f, {"policy", "iteration", "mean_normalized", "std_normalized", "instances"});
    for (std::size_t p = 0; p < args.policies.size(); ++p) {
      std::vector<std::vector<double>> curves;
      std::size_t len = 0;
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (jobs[j].policy != p) continue;
        curves.push_back(normalize_trajectory(runs[j].trajectory));
        len = std::max(len, curves.back().size());
      }
      // Finished runs stay at their converged value (0) until the longest one ends.
      for (std::size_t t = 0; t < len; ++t) {
        std::vector<double> vals;
        for (const auto& c : curves) vals.push_back(t < c.size() ? c[t] : 0.0);
        const RatioSummary s = summarize(vals);
        csv.row(args.policies[p], static_cast<long long>(t), s.mean, s.std, static_cast<long long>(vals.size()));
      }
    }
  }
  return out;
}

std::vector<std::string> cmd_plot(const PlotArgs& args) {
  CsvTable table;
  try {
    table = read_csv_file(args.comparison_csv);
  } catch (const IoError& e) {
    throw CommandError("io", e.what());
  } catch (const CsvError& e) {
    throw CommandError("malformed_csv", e.what());
  }
  std::map<std::string, std::map<std::string, std::pair<double, double>>> by_policy;  // policy -> instance -> (iters, time)
  std::vector<std::string> order;
  try {
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      if (table.text(r, "kind") != "run") continue;
      const std::string& policy = table.text(r, "policy");
      if (!by_policy.count(policy)) order.push_back(policy);
      by_policy[policy][table.text(r, "instance_name")] = {table.number(r, "iterations"),
                                                           table.number(r, "wall_time_seconds")};
    }
  } catch (const CsvError& e) {
    throw CommandError("malformed_csv", e.what());
  }
  if (order.empty()) throw CommandError("malformed_csv", "comparison CSV has no run rows");

  fs::create_directories(args.out_dir);
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& body) {
    const std::string path = (fs::path(args.out_dir) / name).string();
    auto f = open_out(path);
    f << body;
    written.push_back(path);
  };

  const std::string base = by_policy.count("rl") ? "rl" : order.front();
  for (const auto& other : order) {
    if (other == base) continue;
    std::vector<svg::Point> iters, times;
    for (const auto& [inst, v] : by_policy[base]) {
      auto it = by_policy[other].find(inst);
      if (it == by_policy[other].end()) continue;
      iters.push_back({v.first, it->second.first});
      times.push_back({v.second, it->second.second});
    }
    emit("scatter_iterations_" + other + "_vs_" + base + ".svg",
         svg::scatter("CG iterations: " + other + " vs " + base, base + " iterations", other + " iterations", iters));
    emit("scatter_time_" + other + "_vs_" + base + ".svg",
         svg::scatter("Time (s): " + other + " vs " + base, base + " seconds", other + " seconds", times));
  }
  std::vector<svg::BoxGroup> iter_groups, time_groups;
  for (const auto& policy : order) {
    svg::BoxGroup gi{policy, {}}, gt{policy, {}};
    for (const auto& [inst, v] : by_policy[policy]) gi.values.push_back(v.first), gt.values.push_back(v.second);
    iter_groups.push_back(std::move(gi));
    time_groups.push_back(std::move(gt));
  }
  emit("box_iterations.svg", svg::box("CG iterations", "iterations", iter_groups));
  emit("box_time.svg", svg::box("Time in seconds", "seconds", time_groups));

  const std::string conv = convergence_path_for(args.comparison_csv);
  if (fs::exists(conv)) {
    try {
      const CsvTable ct = read_csv_file(conv);
      std::vector<svg::Band> series;
      std::map<std::string, std::size_t> index;
      for (std::size_t r = 0; r < ct.rows.size(); ++r) {
        const std::string& policy = ct.text(r, "policy");
        if (!index.count(policy)) index[policy] = series.size(), series.push_back({policy, {}, {}});
        auto& b = series[index[policy]];
        b.mean.push_back(ct.number(r, "mean_normalized"));
        b.std.push_back(ct.number(r, "std_normalized"));
      }
      emit("convergence.svg", svg::bands("CG convergence", "iteration", "normalized objective", series));
    } catch (const CsvError& e) {
      throw CommandError("malformed_csv", e.what());
    }
  }
  return written;
}

std::vector<SweepResult> cmd_sweep(const SweepArgs& args) {
  if (args.grid.size() == 0) throw CommandError("invalid_grid", "hyperparameter grid is empty");
  if (args.n_samples > args.grid.size())
    throw CommandError("invalid_grid", "n_samples " + std::to_string(args.n_samples) + " exceeds grid size " +
                                           std::to_string(args.grid.size()));
  const auto curriculum = load_instances(args.curriculum, presets::kTrainSeed);
  const auto validation = load_instances(args.validation, presets::kValidationSeed);
  SweepOptions opts;
  opts.training.max_episodes = args.episodes;
  opts.threads = args.threads;
  auto results = hyperparameter_sweep(args.grid, args.n_samples, curriculum, validation, args.base, args.seed, opts);
  auto f = open_out(args.out_csv);
  write_sweep_report(f, results);
  return results;
}

}  // namespace rlcg::cli
