// Copyright 2026 The lexpg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lexpg/checkpoint.hpp"
#include "lexpg_cli/commands.hpp"
#include "lexpg_cli/config.hpp"

namespace lexpg::cli {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() /
                     ("lexpg_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

struct Invocation {
  int status;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "lexpg");
  std::ostringstream out, err;
  const int status = run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string config_error(const std::string& text) {
  Config c = Config::defaults();
  try {
    c.merge_text(text, "run.ini");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, DefaultsMatchTrainConfig) {
  Config c = Config::defaults();
  c.set("env.variant", "nav2d-1g", "test");
  const TrainConfig t = train_config(c);
  const TrainConfig d;
  EXPECT_EQ(t.actor_lr, d.actor_lr);
  EXPECT_EQ(t.critic_lr, d.critic_lr);
  EXPECT_EQ(t.gamma, d.gamma);
  EXPECT_EQ(t.gae_lambda, d.gae_lambda);
  EXPECT_EQ(t.batch, d.batch);
  EXPECT_EQ(t.minibatch, d.minibatch);
  EXPECT_EQ(t.epochs, d.epochs);
  EXPECT_EQ(t.clip_ratio, d.clip_ratio);
  EXPECT_EQ(t.dykstra_tol, d.dykstra_tol);
  EXPECT_EQ(t.dykstra_max_iter, d.dykstra_max_iter);
  EXPECT_EQ(t.total_steps, d.total_steps);
  EXPECT_EQ(t.actor_hidden, d.actor_hidden);
  EXPECT_EQ(t.critic_hidden, d.critic_hidden);
  EXPECT_EQ(t.workers, 1);
  EXPECT_EQ(t.eps.size(), 0);
  EXPECT_EQ(t.actor_step, ActorStep::kSgd);
  EXPECT_TRUE(t.subproblem_exploration);
}

TEST(Config, ParsesSectionsCommentsAndDottedKeys) {
  Config c = Config::defaults();
  c.merge_text(
      "# comment\n"
      "env.variant = nav2d-2g\n"
      "[train]\n"
      "batch = 512   # inline\n"
      "; another comment\n"
      "eps = 0, 0.1, 0, 0\n"
      "[output]\n"
      "dir = /tmp/x\n",
      "run.ini");
  EXPECT_EQ(c.str("env.variant"), "nav2d-2g");
  EXPECT_EQ(c.integer("train.batch"), 512);
  EXPECT_EQ(c.reals("train.eps"), (std::vector<double>{0, 0.1, 0, 0}));
  EXPECT_EQ(c.str("output.dir"), "/tmp/x");
  EXPECT_EQ(c.entry("train.batch").origin, "run.ini:4");
}

TEST(Config, ErrorsAreLinePrecise) {
  EXPECT_EQ(config_error("[train]\nbatch = 5\nbogus = 1\n"), "run.ini:3: unknown key 'train.bogus'");
  EXPECT_EQ(config_error("[train]\n\nbatch = many\n"),
            "run.ini:3: train.batch: expected an integer, got 'many'");
  EXPECT_EQ(config_error("[train]\nbatch = 5\nbatch = 6\n"),
            "run.ini:3: duplicate key 'train.batch' (first set on line 2)");
  EXPECT_EQ(config_error("batch = 5\n"), "run.ini:1: key 'batch' outside any section");
  EXPECT_EQ(config_error("[train\n"), "run.ini:1: unterminated section header");
  EXPECT_EQ(config_error("[env]\nvariant\n"), "run.ini:2: expected 'key = value'");
  EXPECT_EQ(config_error("[train]\nactor_step = adam\n"),
            "run.ini:2: train.actor_step: expected one of sgd rms, got 'adam'");
  EXPECT_NE(config_error("[env]\nvariant = nav2d-0g\n").find("run.ini:2: env.variant:"), std::string::npos);
  EXPECT_EQ(config_error("[train]\nseed = -1\n"),
            "run.ini:2: train.seed: expected a non-negative integer, got '-1'");
}

TEST(Config, RangeErrorsNameTheOrigin) {
  Config c = Config::defaults();
  c.merge_text("[env]\nvariant = nav2d-1g\n[train]\nminibatch = 4096\n", "run.ini");
  try {
    train_config(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()), "run.ini:4: train.minibatch: must lie in [1, batch]");
  }
}

TEST(Config, MissingRequiredKeyIsNamed) {
  const Config c = Config::defaults();
  try {
    c.require_complete();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("env.variant"), std::string::npos);
  }
  const Invocation r = invoke({"train", "--steps", "10"});
  EXPECT_EQ(r.status, kExitUsage);
  EXPECT_NE(r.err.find("missing config key 'env.variant'"), std::string::npos) << r.err;
}

TEST(Config, EpsLengthCheckedAgainstVariant) {
  Config c = Config::defaults();
  c.set("env.variant", "nav2d-1g", "cli");
  c.set("train.eps", "0,0", "cli");
  EXPECT_THROW(make_environment(c), ConfigError);
}

TEST(Config, PrecedenceDefaultsFileEnvironmentCli) {
  const fs::path dir = scratch("precedence");
  std::ofstream(dir / "a.ini") << "[env]\nvariant = nav2d-1g\n[train]\nbatch = 100\nepochs = 3\nseed = 4\n";
  ::setenv("LEXPG_TRAIN_EPOCHS", "5", 1);
  ::setenv("LEXPG_TRAIN_SEED", "6", 1);
  const Config c = load_config(dir / "a.ini", {{"train.seed", "9"}});
  ::unsetenv("LEXPG_TRAIN_EPOCHS");
  ::unsetenv("LEXPG_TRAIN_SEED");
  EXPECT_EQ(c.integer("train.minibatch"), 64);
  EXPECT_EQ(c.entry("train.minibatch").origin, "default");
  EXPECT_EQ(c.integer("train.batch"), 100);
  EXPECT_EQ(c.integer("train.epochs"), 5);
  EXPECT_EQ(c.entry("train.epochs").origin, "env LEXPG_TRAIN_EPOCHS");
  EXPECT_EQ(c.integer("train.seed"), 9);
  EXPECT_EQ(c.entry("train.seed").origin, "cli");
}

TEST(Config, BadEnvironmentValueNamesVariable) {
  ::setenv("LEXPG_TRAIN_BATCH", "x", 1);
  try {
    load_config(std::nullopt, {});
    ::unsetenv("LEXPG_TRAIN_BATCH");
    FAIL();
  } catch (const ConfigError& e) {
    ::unsetenv("LEXPG_TRAIN_BATCH");
    EXPECT_EQ(std::string(e.what()), "env LEXPG_TRAIN_BATCH: train.batch: expected an integer, got 'x'");
  }
}

TEST(Config, DumpRoundTrips) {
  Config a = Config::defaults();
  a.set("env.variant", "nav2d-2g-rev", "cli");
  a.set("train.eps", "0,0,0.5,0", "cli");
  Config b = Config::defaults();
  b.merge_text(a.dump(), "dump");
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(env_var_name("train.actor_lr"), "LEXPG_TRAIN_ACTOR_LR");
}

TEST(ParseIntList, RangesAndLists) {
  EXPECT_EQ(parse_int_list("2..6"), (std::vector<long long>{2, 3, 4, 5, 6}));
  EXPECT_EQ(parse_int_list("1,10"), (std::vector<long long>{1, 10}));
  EXPECT_EQ(parse_int_list("1,3..4,9"), (std::vector<long long>{1, 3, 4, 9}));
  EXPECT_THROW(parse_int_list("3..1"), std::invalid_argument);
  EXPECT_THROW(parse_int_list("a"), std::invalid_argument);
}

TEST(FormatReal, ShortestRoundTrip) {
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(std::nan("")), "NA");
  EXPECT_EQ(std::stod(format_real(1.0 / 3.0)), 1.0 / 3.0);
}

class TrainCommand : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(scratch("train"));
    const Invocation r = invoke({"train", "--env", "nav2d-1g", "--steps", "1000", "--seed", "7",
                                 "--out", dir_->string(), "--set", "output.checkpoint_every=1"});
    ASSERT_EQ(r.status, 0) << r.err;
    for (const auto& e : fs::directory_iterator(*dir_)) run_ = new fs::path(e.path());
  }
  static void TearDownTestSuite() {
    delete dir_;
    delete run_;
  }
  static fs::path* dir_;
  static fs::path* run_;
};
fs::path* TrainCommand::dir_ = nullptr;
fs::path* TrainCommand::run_ = nullptr;

TEST_F(TrainCommand, WritesStatsManifestAndCheckpoints) {
  ASSERT_NE(run_, nullptr);
  const std::string stats = slurp(*run_ / "stats.csv");
  std::istringstream in(stats);
  std::string header, columns, row;
  std::getline(in, header);
  std::getline(in, columns);
  std::getline(in, row);
  EXPECT_EQ(header.rfind("# lexpg-stats v1 run=nav2d-1g-s7-", 0), 0u) << header;
  EXPECT_NE(header.find("manifest=manifest.json"), std::string::npos);
  EXPECT_EQ(columns.rfind("update,step,episodes,return_1,return_2,return_3,", 0), 0u) << columns;
  EXPECT_EQ(row.rfind("1,2048,", 0), 0u) << row;

  const std::string manifest = slurp(*run_ / "manifest.json");
  EXPECT_NE(manifest.find("\"status\": \"completed\""), std::string::npos);
  EXPECT_NE(manifest.find("\"final_param_hash\""), std::string::npos);
  EXPECT_NE(manifest.find("\"origin\": \"cli\""), std::string::npos);
  EXPECT_TRUE(fs::exists(*run_ / "checkpoints" / "final.ckpt"));
  EXPECT_TRUE(fs::exists(*run_ / "checkpoints" / "update_000001.ckpt"));
  const Checkpoint c = load_checkpoint(*run_ / "checkpoints" / "final.ckpt");
  EXPECT_EQ(c.env_variant, "nav2d-1g");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.steps, 2048u);
}

TEST_F(TrainCommand, RunIdIsDeterministicAndStatsByteIdentical) {
  const fs::path again = scratch("train_again");
  const Invocation r = invoke({"train", "--env", "nav2d-1g", "--steps", "1000", "--seed", "7",
                               "--out", again.string(), "--set", "output.checkpoint_every=1"});
  ASSERT_EQ(r.status, 0) << r.err;
  const fs::path other = again / run_->filename();
  ASSERT_TRUE(fs::exists(other / "stats.csv"));
  EXPECT_EQ(slurp(*run_ / "stats.csv"), slurp(other / "stats.csv"));
  EXPECT_EQ(slurp(*run_ / "checkpoints" / "final.ckpt"), slurp(other / "checkpoints" / "final.ckpt"));
}

TEST_F(TrainCommand, EvalSummary) {
  const fs::path out = scratch("eval");
  const Invocation r = invoke({"eval", (*run_ / "checkpoints" / "final.ckpt").string(), "--episodes",
                               "3", "--summary", (out / "s.csv").string(), "--trajectory",
                               (out / "t.csv").string()});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("K1 in_boundary"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find(" ± "), std::string::npos);
  const std::string summary = slurp(out / "s.csv");
  EXPECT_EQ(summary.rfind("# lexpg-eval v1", 0), 0u);
  EXPECT_NE(summary.find("\nsubtask,name,mean,std,positive_fraction\nK1,in_boundary,"), std::string::npos);
  EXPECT_EQ(slurp(out / "t.csv").rfind("# lexpg-trajectory v1\nepisode,t,x,y,action_x,action_y,r_1,r_2,r_3,done\n", 0), 0u);
}

TEST_F(TrainCommand, EvalDeterministicAndNoise) {
  const fs::path out = scratch("eval_modes");
  const std::string ckpt = (*run_ / "checkpoints" / "final.ckpt").string();
  auto traj = [&](std::vector<std::string> extra, const std::string& name) {
    std::vector<std::string> args{"eval", ckpt, "--episodes", "2", "--trajectory", (out / name).string()};
    args.insert(args.end(), extra.begin(), extra.end());
    EXPECT_EQ(invoke(args).status, 0);
    return slurp(out / name);
  };
  EXPECT_EQ(traj({"--deterministic"}, "a.csv"), traj({"--deterministic"}, "b.csv"));
  EXPECT_NE(traj({"--deterministic", "--obs-noise", "0.1", "--seed", "1"}, "c.csv"),
            traj({"--deterministic", "--obs-noise", "0.1", "--seed", "2"}, "d.csv"));
}

TEST_F(TrainCommand, EvalArchitectureMismatch) {
  const Invocation r = invoke({"eval", (*run_ / "checkpoints" / "final.ckpt").string(), "--env", "nav2d-2g"});
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("does not match nav2d-2g"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("state_dim 4"), std::string::npos);
}

TEST_F(TrainCommand, ExportParams) {
  const Invocation r = invoke({"export", "params", (*run_ / "checkpoints" / "final.ckpt").string()});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out.rfind("# lexpg-params v1 variant=nav2d-1g", 0), 0u);
  EXPECT_NE(r.out.find("\nnet,block,row,col,value\n"), std::string::npos);
  EXPECT_NE(r.out.find("\ncritic,"), std::string::npos);
}

TEST(ExportConfig, ReloadsAsConfig) {
  const Invocation r = invoke({"export", "config", "--set", "env.variant=nav2d-2g"});
  ASSERT_EQ(r.status, 0) << r.err;
  Config c = Config::defaults();
  c.merge_text(r.out, "exported");
  EXPECT_EQ(c.str("env.variant"), "nav2d-2g");
  EXPECT_EQ(c.str("train.actor_lr"), "5e-05");
}

TEST(BenchCommand, SyntheticOneRowPerSolverAndM) {
  const Invocation r = invoke({"bench", "--synthetic", "--M", "2..3", "--P", "50", "--seeds", "0",
                               "--instances", "2", "--warmup", "1"});
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#' && line.rfind("solver,", 0) != 0) ++rows;
  }
  EXPECT_EQ(rows, 4 * 2);
}

TEST(BenchCommand, EnvRecords) {
  const Invocation r = invoke({"bench", "--env", "--goals", "1,2", "--steps", "2048", "--seeds", "0",
                               "--solvers", "dykstra,noop"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("\ndykstra,1,3,"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\nnoop,2,4,"), std::string::npos) << r.out;
}

TEST(BenchCommand, InvalidSolverListsValidOnes) {
  const Invocation r = invoke({"bench", "--synthetic", "--solvers", "dykstra,osqp"});
  EXPECT_NE(r.status, 0);
  for (const char* n : {"dykstra", "sop", "reference_qp", "noop"}) {
    EXPECT_NE(r.err.find(n), std::string::npos) << r.err;
  }
}

TEST(BenchCommand, RequiresOneMode) {
  EXPECT_NE(invoke({"bench"}).status, 0);
  EXPECT_NE(invoke({"bench", "--synthetic", "--env"}).status, 0);
}

TEST(Cli, ConfigFileErrorReportedWithLine) {
  const fs::path dir = scratch("badcfg");
  std::ofstream(dir / "bad.ini") << "[env]\nvariant = nav2d-1g\n[train]\nbatch = 0x10\n";
  const Invocation r = invoke({"train", "-c", (dir / "bad.ini").string()});
  EXPECT_EQ(r.status, kExitUsage);
  EXPECT_NE(r.err.find("bad.ini:4: train.batch"), std::string::npos) << r.err;
}

TEST(Cli, UnknownSubcommand) {
  EXPECT_NE(invoke({"frobnicate"}).status, 0);
  EXPECT_NE(invoke({}).status, 0);
}

}  // namespace
}  // namespace lexpg::cli
