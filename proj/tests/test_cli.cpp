#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "rlcg/checkpoint.hpp"
#include "rlcg/commands.hpp"
#include "rlcg/csv.hpp"

using namespace rlcg;
using namespace rlcg::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("rlcg_cli_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Exec {
  int status;
  std::string output;
};

Exec run_cli(const std::string& args) {
  const std::string cmd = std::string(RLCG_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe) != nullptr) out += buf;
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const CommandError& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST_CASE("generate: presets and stages") {
  TempDir dir("gen");
  GenerateArgs test;
  test.preset = "desk-test";
  test.out_dir = dir / "test";
  CHECK(cmd_generate(test).size() == 20);
  GenerateArgs train;
  train.preset = "desk";
  train.out_dir = dir / "train";
  cmd_generate(train);
  int max_train = 0;
  for (const auto& i : load_instance_dir(train.out_dir)) max_train = std::max(max_train, i.roll_length);
  for (const auto& i : load_instance_dir(test.out_dir)) CHECK(i.roll_length > max_train);

  GenerateArgs one;
  one.stage = CurriculumStage{1, 20, 10, 0.1, 0.7};
  one.out_dir = dir / "one";
  CHECK(cmd_generate(one).size() == 1);

  GenerateArgs bad;
  bad.stage = CurriculumStage{1, 20, 10, 0.7, 0.1};
  bad.out_dir = dir / "bad";
  CHECK(code_of([&] { cmd_generate(bad); }) == "invalid_spec");
  GenerateArgs none;
  none.out_dir = dir / "none";
  CHECK(code_of([&] { cmd_generate(none); }) == "usage");
}

TEST_CASE("solve: greedy reaches the enumerated LP optimum") {
  TempDir dir("solve");
  const Instance inst{"tiny", 10, {5, 4, 3}, {1, 2, 2}};
  save_bpplib_file(inst, dir / "tiny.txt");
  SolveArgs args;
  args.instance_path = dir / "tiny.txt";
  args.trajectory_csv = dir / "traj.csv";
  args.record_csv = dir / "rec.csv";
  const RunRecord rec = cmd_solve(args);
  std::vector<std::vector<int>> cols;
  for (auto& x : oracle::all_patterns(inst.sizes, inst.roll_length))
    if (std::any_of(x.begin(), x.end(), [](int v) { return v > 0; })) cols.push_back(x);
  const auto opt = oracle::bfs_optimum(cols, inst.demands);
  REQUIRE(opt.has_value());
  CHECK(rec.iterations >= 1);
  CHECK(rec.objective == doctest::Approx(*opt).epsilon(1e-9));
  const CsvTable traj = read_csv_file(*args.trajectory_csv);
  CHECK(traj.number(0, "normalized_objective") == 1.0);
  CHECK(traj.number(traj.rows.size() - 1, "normalized_objective") == 0.0);
  const CsvTable r = read_csv_file(*args.record_csv);
  CHECK(r.header == std::vector<std::string>{"instance_name", "policy", "iterations", "wall_time_seconds", "objective",
                                              "converged"});
  CHECK(r.text(0, "instance_name") == "tiny");

  SolveArgs rl = args;
  rl.policy = "rl";
  CHECK(code_of([&] { cmd_solve(rl); }) == "usage");
}

TEST_CASE("train: defaults, zero episodes, reproducible bytes") {
  TempDir dir("train");
  TrainArgs args;
  CHECK(args.hyper.alpha == 300.0);
  CHECK(args.hyper.epsilon == 0.05);
  CHECK(args.hyper.gamma == 0.9);
  CHECK(args.hyper.lr == 0.001);
  fs::create_directories(dir / "cur");
  save_bpplib_file(generate_instance(12, 6, 0.2, 0.6, 1), dir / "cur/0000_a.txt");
  save_bpplib_file(generate_instance(12, 8, 0.2, 0.6, 2), dir / "cur/0001_b.txt");
  args.curriculum = dir / "cur";
  args.hyper.hidden = 8;
  args.hyper.rounds = 1;
  args.hyper.batch_size = 4;
  args.seed = 11;

  args.episodes = 0;
  args.out_dir = dir / "zero";
  const auto zero = cmd_train(args);
  const Checkpoint z = read_checkpoint_file(zero.checkpoint_path);
  CHECK(z.params == DqnTrainer(args.hyper, 11).params());

  args.episodes = -1;
  args.out_dir = dir / "a";
  const auto a = cmd_train(args);
  args.out_dir = dir / "b";
  const auto b = cmd_train(args);
  CHECK(slurp(a.checkpoint_path) == slurp(b.checkpoint_path));
  CHECK(slurp(a.training_log_path) == slurp(b.training_log_path));
  const CsvTable log = read_csv_file(a.training_log_path);
  CHECK(log.header == std::vector<std::string>{"episode", "instance_name", "iterations", "total_reward", "mean_loss"});
  CHECK(log.rows.size() == 2);
  CHECK(read_csv_file(a.validation_log_path).header == std::vector<std::string>{"episode", "mean_ratio", "std_ratio"});

  args.hyper.gamma = 1.0;
  CHECK(code_of([&] { cmd_train(args); }) == "invalid_hyperparameters");
}

TEST_CASE("evaluate: rows, summaries and reproducibility") {
  TempDir dir("eval");
  fs::create_directories(dir / "test");
  for (int i = 0; i < 3; ++i)
    save_bpplib_file(generate_instance(20 + i, 12, 0.1, 0.7, static_cast<std::uint64_t>(i)),
                     dir / ("test/000" + std::to_string(i) + "_x.txt"));
  EvaluateArgs args;
  args.test_dir = dir / "test";
  args.policies = {"greedy", "expert"};
  args.out_csv = dir / "cmp.csv";
  const auto out = cmd_evaluate(args);
  CHECK(out.runs.size() == 6);
  const CsvTable t = read_csv_file(out.comparison_path);
  std::size_t runs = 0, summaries = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) (t.text(r, "kind") == "run" ? runs : summaries)++;
  CHECK(runs == 6);
  CHECK(summaries == 2);
  for (const std::string policy : {"greedy", "expert"}) {
    double sum = 0.0, log_ratio = 0.0;
    std::map<std::string, double> greedy_iters;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
      if (t.text(r, "kind") == "run" && t.text(r, "policy") == "greedy")
        greedy_iters[t.text(r, "instance_name")] = t.number(r, "iterations");
    for (std::size_t r = 0; r < t.rows.size(); ++r)
      if (t.text(r, "kind") == "run" && t.text(r, "policy") == policy) {
        sum += t.number(r, "iterations");
        log_ratio += std::log(greedy_iters[t.text(r, "instance_name")] / t.number(r, "iterations"));
      }
    for (std::size_t r = 0; r < t.rows.size(); ++r)
      if (t.text(r, "kind") == "summary" && t.text(r, "policy") == policy) {
        CHECK(std::abs(t.number(r, "iter_mean") - sum / 3) <= 1e-12);
        CHECK(t.number(r, "geomean_greedy_over_policy") == doctest::Approx(std::exp(log_ratio / 3)).epsilon(1e-12));
      }
  }
  const CsvTable conv = read_csv_file(out.convergence_path);
  CHECK(conv.number(0, "mean_normalized") == 1.0);

  EvaluateArgs g1;
  g1.test_dir = args.test_dir;
  g1.policies = {"greedy"};
  g1.omit_timing = true;
  g1.out_csv = dir / "g1.csv";
  cmd_evaluate(g1);
  EvaluateArgs g2 = g1;
  g2.out_csv = dir / "g2.csv";
  g2.threads = 3;
  cmd_evaluate(g2);
  CHECK(slurp(g1.out_csv) == slurp(g2.out_csv));
  CHECK(slurp(convergence_path_for(g1.out_csv)) == slurp(convergence_path_for(g2.out_csv)));

  EvaluateArgs rl = g1;
  rl.policies = {"rl"};
  CHECK(code_of([&] { cmd_evaluate(rl); }) == "usage");
}

TEST_CASE("plot: SVG output") {
  TempDir dir("plot");
  fs::create_directories(dir / "test");
  for (int i = 0; i < 3; ++i)
    save_bpplib_file(generate_instance(25, 15, 0.1, 0.7, static_cast<std::uint64_t>(i + 10)),
                     dir / ("test/000" + std::to_string(i) + "_x.txt"));
  EvaluateArgs e;
  e.test_dir = dir / "test";
  e.policies = {"greedy", "expert"};
  e.omit_timing = true;
  e.out_csv = dir / "cmp.csv";
  cmd_evaluate(e);
  PlotArgs p{e.out_csv, dir / "svg"};
  const auto files = cmd_plot(p);
  CHECK(files.size() == 5);
  const std::string scatter = slurp(files[0]);
  CHECK(scatter.find("viewBox=\"0 0 800 600\"") != std::string::npos);
  CHECK(scatter.find("class=\"diagonal\"") != std::string::npos);
  PlotArgs again{e.out_csv, dir / "svg2"};
  const auto files2 = cmd_plot(again);
  for (std::size_t i = 0; i < files.size(); ++i) CHECK(slurp(files[i]) == slurp(files2[i]));

  std::ofstream(dir / "empty.csv") << "";
  CHECK(code_of([&] { cmd_plot({dir / "empty.csv", dir / "x"}); }) == "malformed_csv");
  std::ofstream(dir / "header.csv") << "# rlcg-csv v1\nkind,policy\n";
  CHECK(code_of([&] { cmd_plot({dir / "header.csv", dir / "x"}); }) == "malformed_csv");
}

TEST_CASE("sweep: report rows and schema") {
  TempDir dir("sweep");
  std::ofstream(dir / "cur.cfg") << "2 12 6 0.2 0.6\n";
  std::ofstream(dir / "val.cfg") << "1 14 6 0.2 0.6\n";
  SweepArgs args;
  args.n_samples = 1;
  args.curriculum = dir / "cur.cfg";
  args.validation = dir / "val.cfg";
  args.base.hidden = 4;
  args.base.rounds = 1;
  args.base.batch_size = 2;
  args.out_csv = dir / "sweep.csv";
  CHECK(cmd_sweep(args).size() == 1);
  const CsvTable t = read_csv_file(args.out_csv);
  CHECK(t.header == std::vector<std::string>{"rank", "model_index", "alpha", "epsilon", "gamma", "lr", "mean_ratio",
                                              "median_ratio", "std_ratio"});
  CHECK(t.rows.size() == 1);
  CHECK(std::isfinite(t.number(0, "mean_ratio")));
  args.n_samples = 82;
  CHECK(code_of([&] { cmd_sweep(args); }) == "invalid_grid");
  args.grid = SweepGrid{};
  args.n_samples = 1;
  CHECK(code_of([&] { cmd_sweep(args); }) == "invalid_grid");
}

TEST_CASE("binary: exit codes and one-line errors") {
  TempDir dir("bin");
  const Exec bad = run_cli("solve --instance " + (dir / "missing.txt"));
  CHECK(bad.status != 0);
  CHECK(bad.output.rfind("error: ", 0) == 0);
  CHECK(std::count(bad.output.begin(), bad.output.end(), '\n') == 1);

  const Exec usage = run_cli("frobnicate");
  CHECK(usage.status != 0);
  CHECK(usage.output.rfind("error: usage: ", 0) == 0);

  const Exec gen = run_cli("generate --stage \"2 12 6 0.2 0.6\" --out " + (dir / "inst"));
  CHECK(gen.status == 0);
  const Exec solve = run_cli("solve --policy rl --instance " + (dir / "inst") + "/0000_BPP_12_6_0.2_0.6_1000.txt");
  CHECK(solve.status != 0);
  CHECK(solve.output.rfind("error: usage: ", 0) == 0);
  const Exec ok = run_cli("solve --policy expert --instance " + (dir / "inst") + "/0000_BPP_12_6_0.2_0.6_1000.txt");
  CHECK(ok.status == 0);
  const Exec model = run_cli("solve --policy rl --model " + (dir / "nope.ckpt") + " --instance " + (dir / "inst") +
                             "/0000_BPP_12_6_0.2_0.6_1000.txt");
  CHECK(model.status != 0);
  CHECK(model.output.rfind("error: io: ", 0) == 0);
}

TEST_CASE("thread cap from the environment") {
  setenv("RLCG_THREADS", "3", 1);
  CHECK(thread_cap() == 3);
  setenv("RLCG_THREADS", "junk", 1);
  CHECK(thread_cap() == 1);
  unsetenv("RLCG_THREADS");
  CHECK(thread_cap() == 1);
}
