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

#include "lexpg_cli/commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lexpg/checkpoint.hpp"
#include "lexpg/nav2d.hpp"

namespace lexpg::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v, int width = 16) {
  std::ostringstream s;
  s << std::hex << std::setw(width) << std::setfill('0') << v;
  return s.str().substr(0, static_cast<std::size_t>(width));
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

std::uint64_t params_hash(const Vector& actor, const Vector& critic) {
  Vector all(actor.size() + critic.size());
  all << actor, critic;
  return content_hash(all);
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

void write_stats_header(std::ostream& s, const std::string& id, int M) {
  s << "# lexpg-stats v1 run=" << id << " manifest=manifest.json\n";
  s << "update,step,episodes";
  for (int i = 1; i <= M; ++i) s << ",return_" << i;
  for (int i = 1; i <= M; ++i) s << ",surrogate_" << i;
  s << ",d_norm,used_level_mean";
  for (int i = 0; i <= M; ++i) s << ",used_level_" << i;
  s << ",critic_loss,dykstra_iterations,fallback_steps,nonconverged,nonconverged_warning,"
       "min_relative_slack\n";
}

void write_stats_row(std::ostream& s, const UpdateRecord& r) {
  const auto M = r.episode_return.size();
  s << r.update << ',' << r.step << ',' << r.episodes;
  for (Eigen::Index i = 0; i < M; ++i) s << ',' << format_real(r.episode_return(i));
  for (Eigen::Index i = 0; i < M; ++i) {
    s << ',' << format_real(i < r.stats.surrogate.size() ? r.stats.surrogate(i) : std::nan(""));
  }
  double mean = 0.0;
  int calls = 0;
  for (std::size_t k = 0; k < r.stats.used_levels.size(); ++k) {
    mean += static_cast<double>(k) * r.stats.used_levels[k];
    calls += r.stats.used_levels[k];
  }
  s << ',' << format_real(r.stats.direction_norm) << ','
    << format_real(calls > 0 ? mean / calls : std::nan(""));
  for (int c : r.stats.used_levels) s << ',' << c;
  s << ',' << format_real(r.stats.critic_loss) << ',' << format_real(r.stats.dykstra_iterations)
    << ',' << r.stats.fallback_steps << ',' << r.stats.nonconverged << ','
    << (r.stats.nonconverged_warning ? 1 : 0) << ',' << format_real(r.stats.min_relative_slack)
    << '\n';
}

Checkpoint make_checkpoint(const Trainer& t, const std::string& variant, int M) {
  Checkpoint c;
  c.env_variant = variant;
  c.state_dim = t.policy().state_dim();
  c.action_dim = t.policy().action_dim();
  c.subtasks = M;
  c.actor_hidden = t.config().actor_hidden;
  c.critic_hidden = t.config().critic_hidden;
  c.seed = t.config().seed;
  c.steps = t.steps();
  c.actor = t.actor_params();
  c.critic = t.critic_params();
  return c;
}

std::string checkpoint_name(int update) {
  std::ostringstream s;
  s << "update_" << std::setw(6) << std::setfill('0') << update << ".ckpt";
  return s.str();
}

Override split_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set " + text + ": expected section.key=value");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

Config load_config(const std::optional<fs::path>& file, const std::vector<Override>& overrides,
                   bool use_environment) {
  Config c = Config::defaults();
  if (file) c.merge_file(*file);
  if (use_environment) c.merge_environment();
  for (const auto& [k, v] : overrides) c.set(k, v, "cli");
  return c;
}

std::string run_id(const Config& config) {
  if (config.has("output.run_name") && !config.str("output.run_name").empty()) {
    return config.str("output.run_name");
  }
  Config keyed = config;
  // The output location does not change what is computed.
  keyed.set("output.dir", "runs", "default");
  return config.str("env.variant") + "-s" + config.str("train.seed") + "-" +
         hex(fnv1a(keyed.dump()), 8);
}

TrainResult cmd_train(const Config& config, std::ostream& log) {
  config.require_complete();
  const TrainConfig tc = train_config(config);
  std::unique_ptr<Environment> env = make_environment(config);
  const std::string variant = env->name();
  const int M = env->subtasks();
  const auto names = env->subtask_names();

  TrainResult result;
  result.run_id = run_id(config);
  result.run_dir = fs::path(config.str("output.dir")) / result.run_id;
  fs::create_directories(result.run_dir / "checkpoints");

  Trainer trainer(tc, std::move(env));

  json manifest;
  manifest["format"] = "lexpg-manifest v1";
  manifest["run_id"] = result.run_id;
  manifest["command"] = "train";
  manifest["variant"] = variant;
  manifest["seed"] = tc.seed;
  manifest["subtasks"] = names;
  manifest["output_dir"] = result.run_dir.string();
  manifest["config_text"] = config.dump();
  json cfg = json::object();
  for (const auto& [k, e] : config.entries()) cfg[k] = {{"value", e.value}, {"origin", e.origin}};
  manifest["config"] = cfg;
  manifest["initial_param_hash"] = hex(params_hash(trainer.actor_params(), trainer.critic_params()));
  manifest["files"] = {{"stats", "stats.csv"}, {"checkpoints", json::array()}};
  manifest["started_at"] = utc_now();
  manifest["status"] = "running";
  write_json(result.run_dir / "manifest.json", manifest);

  std::ofstream stats = open_out(result.run_dir / "stats.csv");
  write_stats_header(stats, result.run_id, M);

  const long long every = config.integer("output.checkpoint_every");
  auto save = [&](const std::string& name) {
    save_checkpoint(result.run_dir / "checkpoints" / name, make_checkpoint(trainer, variant, M));
    manifest["files"]["checkpoints"].push_back("checkpoints/" + name);
  };

  log << "run " << result.run_id << " -> " << result.run_dir.string() << '\n';
  try {
    trainer.run([&](const UpdateRecord& r) {
      write_stats_row(stats, r);
      if (r.stats.nonconverged_warning) {
        log << "warning: update " << r.update << ": Dykstra did not converge on more than "
            << tc.nonconverged_budget << " consecutive projections\n";
      }
      if (every > 0 && r.update % every == 0) save(checkpoint_name(r.update));
      result.updates = r.update;
    });
  } catch (const AbortUpdate& e) {
    stats.flush();
    manifest["status"] = "aborted";
    manifest["error"] = e.what();
    manifest["finished_at"] = utc_now();
    write_json(result.run_dir / "manifest.json", manifest);
    log << "error: update aborted: " << e.what() << '\n';
    result.status = kExitAbort;
    return result;
  }
  save("final.ckpt");
  stats.flush();
  if (!stats) throw std::runtime_error("failed writing stats.csv");

  result.steps = trainer.steps();
  manifest["steps"] = trainer.steps();
  manifest["updates"] = result.updates;
  manifest["final_param_hash"] = hex(params_hash(trainer.actor_params(), trainer.critic_params()));
  manifest["finished_at"] = utc_now();
  manifest["status"] = "completed";
  write_json(result.run_dir / "manifest.json", manifest);
  log << "done: " << result.updates << " updates, " << trainer.steps() << " steps\n";
  return result;
}

int cmd_eval(const EvalRequest& request, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(request.checkpoint);
  Config c = Config::defaults();
  c.set("env.variant", request.variant.value_or(ckpt.env_variant), "eval");
  for (const auto& [k, v] : request.env_overrides) {
    if (k.rfind("env.", 0) != 0) throw ConfigError("eval: only env.* keys may be overridden, got '" + k + "'");
    c.set(k, v, "cli");
  }
  std::unique_ptr<Environment> env = make_environment(c);
  if (ckpt.state_dim != env->observation_dim() || ckpt.action_dim != env->action_dim() ||
      ckpt.subtasks != env->subtasks()) {
    std::ostringstream msg;
    msg << "checkpoint " << request.checkpoint.string() << " (trained on " << ckpt.env_variant
        << ": state_dim " << ckpt.state_dim << ", action_dim " << ckpt.action_dim << ", subtasks "
        << ckpt.subtasks << ") does not match " << env->name() << " (state_dim "
        << env->observation_dim() << ", action_dim " << env->action_dim() << ", subtasks "
        << env->subtasks() << ")";
    throw std::invalid_argument(msg.str());
  }
  const GaussianPolicy policy(ckpt.state_dim, ckpt.action_dim, ckpt.actor_hidden);
  if (policy.layout().size() != ckpt.actor.size()) {
    throw std::invalid_argument("checkpoint actor has " + std::to_string(ckpt.actor.size()) +
                                " parameters, architecture expects " +
                                std::to_string(policy.layout().size()));
  }

  EvalOptions opt;
  opt.episodes = request.episodes;
  opt.deterministic = request.deterministic;
  opt.obs_noise = request.obs_noise;
  opt.seed = request.seed;

  std::ofstream traj;
  if (request.trajectory) {
    traj = open_out(*request.trajectory);
    nav2d::write_trajectory_header(traj, env->subtasks());
  }
  const Matrix returns = evaluate_policy(*env, policy, ckpt.actor, opt, [&](const EvalStep& s) {
    if (!traj.is_open()) return;
    nav2d::TrajectoryRow row;
    row.episode = s.episode;
    row.t = s.t;
    row.x = s.observation(0);
    row.y = s.observation(1);
    row.action_x = s.action(0);
    row.action_y = s.action(1);
    row.rewards = s.rewards;
    row.done = s.done;
    nav2d::write_trajectory_row(traj, row);
  });

  const auto names = env->subtask_names();
  std::ostringstream summary;
  summary << "# lexpg-eval v1 checkpoint=" << request.checkpoint.filename().string()
          << " variant=" << env->name() << " episodes=" << opt.episodes
          << " deterministic=" << (opt.deterministic ? 1 : 0)
          << " obs_noise=" << format_real(opt.obs_noise) << " seed=" << opt.seed << '\n';
  summary << "subtask,name,mean,std,positive_fraction\n";
  out << env->name() << ", " << opt.episodes << " episodes\n";
  for (Eigen::Index i = 0; i < returns.cols(); ++i) {
    const auto col = returns.col(i);
    const double mean = col.mean();
    const double var = returns.rows() > 1
                           ? (col.array() - mean).square().sum() / static_cast<double>(returns.rows() - 1)
                           : 0.0;
    const double positive = (col.array() > 0.0).cast<double>().mean();
    summary << 'K' << i + 1 << ',' << names[static_cast<std::size_t>(i)] << ',' << format_real(mean)
            << ',' << format_real(std::sqrt(var)) << ',' << format_real(positive) << '\n';
    out << "  K" << i + 1 << ' ' << std::left << std::setw(16) << names[static_cast<std::size_t>(i)]
        << std::right << std::fixed << std::setprecision(2) << mean << " ± " << std::sqrt(var)
        << "  (return > 0 in " << std::setprecision(0) << 100.0 * positive << "% of episodes)\n";
    out.unsetf(std::ios::fixed);
  }
  if (request.summary) {
    std::ofstream f = open_out(*request.summary);
    f << summary.str();
  }
  return kExitOk;
}

int cmd_bench(const BenchRequest& r, std::ostream& out) {
  const BenchMeta meta = probe_timer();
  LppgConfig lppg;
  lppg.dykstra_tol = r.dykstra_tol;
  lppg.dykstra_max_iter = r.dykstra_max_iter;
  std::vector<BenchRecord> recs;
  if (r.synthetic) {
    SyntheticBenchOptions o;
    o.M_list = r.M_list;
    o.P_list = r.P_list;
    o.seeds = r.seeds;
    o.solvers = r.solvers;
    o.instances = r.instances;
    o.warmup = r.warmup;
    o.lppg = lppg;
    recs = run_synthetic_bench(o);
  } else {
    ProjectionBenchOptions o;
    o.variants = r.goals;
    o.steps = r.steps;
    o.seeds = r.seeds;
    o.solvers = r.solvers;
    o.warmup = r.warmup;
    o.agreement_every = r.agreement_every;
    o.train.dykstra_tol = r.dykstra_tol;
    o.train.dykstra_max_iter = r.dykstra_max_iter;
    recs = run_projection_bench(o);
  }
  if (r.output) {
    std::ofstream f = open_out(*r.output);
    write_bench_csv(f, recs, meta);
  } else {
    write_bench_csv(out, recs, meta);
  }
  return kExitOk;
}

int cmd_export_params(const fs::path& checkpoint, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  const GaussianPolicy policy(ckpt.state_dim, ckpt.action_dim, ckpt.actor_hidden);
  const MultiHeadCritic critic(ckpt.state_dim, ckpt.subtasks, ckpt.critic_hidden);
  if (policy.layout().size() != ckpt.actor.size() || critic.layout().size() != ckpt.critic.size()) {
    throw std::invalid_argument("checkpoint parameter counts do not match its architecture");
  }
  out << "# lexpg-params v1 variant=" << ckpt.env_variant << " steps=" << ckpt.steps
      << " hash=" << hex(params_hash(ckpt.actor, ckpt.critic)) << '\n';
  out << "net,block,row,col,value\n";
  auto dump = [&](const char* net, const ParamLayout& layout, const Vector& v) {
    for (const auto& b : layout.blocks()) {
      for (Eigen::Index j = 0; j < b.cols; ++j) {
        for (Eigen::Index i = 0; i < b.rows; ++i) {
          out << net << ',' << b.name << ',' << i << ',' << j << ','
              << format_real(v(b.offset + j * b.rows + i)) << '\n';
        }
      }
    }
  };
  dump("actor", policy.layout(), ckpt.actor);
  dump("critic", critic.layout(), ckpt.critic);
  return kExitOk;
}

int cmd_export_config(const Config& config, std::ostream& out) {
  out << "# lexpg config\n";
  std::string section;
  for (const auto& k : schema()) {
    const auto dot = k.key.find('.');
    const std::string sec = k.key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out << '\n';
      out << '[' << sec << "]\n";
      section = sec;
    }
    if (!k.help.empty()) out << "# " << k.help << '\n';
    if (config.has(k.key)) {
      out << k.key.substr(dot + 1) << " = " << config.str(k.key) << '\n';
    } else {
      out << "# " << k.key.substr(dot + 1) << " =   (required)\n";
    }
  }
  return kExitOk;
}

std::vector<long long> parse_int_list(const std::string& text) {
  std::vector<long long> out;
  std::istringstream in(text);
  std::string part;
  auto num = [&](const std::string& s) {
    long long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) {
      throw std::invalid_argument("bad integer '" + s + "' in list '" + text + "'");
    }
    return v;
  };
  while (std::getline(in, part, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(num(part));
      continue;
    }
    const long long a = num(part.substr(0, dots));
    const long long b = num(part.substr(dots + 2));
    if (b < a) throw std::invalid_argument("empty range '" + part + "'");
    for (long long v = a; v <= b; ++v) out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lexicographic projection policy gradient toolkit", "lexpg"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "train LPPG-PPO on a Nav2D variant");
  std::string config_file;
  std::string env_variant, out_dir, run_name;
  std::uint64_t steps = 0, seed = 0;
  int workers = 0;
  std::vector<std::string> sets;
  train->add_option("-c,--config", config_file, "config file (key = value with [sections])");
  train->add_option("--env", env_variant, "environment variant, overrides env.variant");
  train->add_option("--steps", steps, "overrides train.total_steps");
  train->add_option("--seed", seed, "overrides train.seed");
  train->add_option("--workers", workers, "parallel rollout collectors (default 1)");
  train->add_option("--out", out_dir, "overrides output.dir");
  train->add_option("--name", run_name, "overrides output.run_name");
  train->add_option("--set", sets, "section.key=value, repeatable");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  EvalRequest er;
  std::string eval_ckpt, eval_env, eval_traj, eval_summary;
  std::vector<std::string> eval_sets;
  eval->add_option("checkpoint", eval_ckpt, "checkpoint file")->required();
  eval->add_option("--env", eval_env, "evaluate on another variant");
  eval->add_option("--episodes", er.episodes, "episodes (default 50)")->check(CLI::PositiveNumber);
  eval->add_flag("--deterministic", er.deterministic, "act with tanh(mean)");
  eval->add_option("--obs-noise", er.obs_noise, "std of Gaussian noise on the observed position")
      ->check(CLI::NonNegativeNumber);
  eval->add_option("--seed", er.seed, "evaluation seed");
  eval->add_option("--trajectory", eval_traj, "trajectory CSV path");
  eval->add_option("--summary", eval_summary, "summary CSV path");
  eval->add_option("--set", eval_sets, "env.key=value, repeatable");

  // bench
  auto* bench = app.add_subcommand("bench", "time direction solvers");
  BenchRequest br;
  bool synth = false, env_bench = false;
  std::string m_list = "2..6", p_list = "100,10000", goals = "1", seeds = "0..4",
              solvers = "dykstra,sop,reference_qp,noop";
  std::string bench_out;
  bench->add_flag("--synthetic", synth, "random Gaussian gradient stacks");
  bench->add_flag("--env", env_bench, "stacks from Nav2D-nG training with SE off");
  bench->add_option("--M", m_list, "subtask counts, e.g. 2..6");
  bench->add_option("--P", p_list, "parameter dimensions, e.g. 100,10000");
  bench->add_option("--goals", goals, "Nav2D goal counts, e.g. 1,10");
  bench->add_option("--steps", br.steps, "training steps per seed (env mode)");
  bench->add_option("--seeds", seeds, "seed list, e.g. 0..4");
  bench->add_option("--solvers", solvers, "comma-separated solver names");
  bench->add_option("--instances", br.instances, "stacks per seed (synthetic)")->check(CLI::PositiveNumber);
  bench->add_option("--warmup", br.warmup, "untimed calls per configuration")->check(CLI::NonNegativeNumber);
  bench->add_option("--agreement-every", br.agreement_every, "check every k-th call")->check(CLI::PositiveNumber);
  bench->add_option("--dykstra-tol", br.dykstra_tol, "Dykstra tolerance")->check(CLI::PositiveNumber);
  bench->add_option("--dykstra-max-iter", br.dykstra_max_iter, "Dykstra sweep limit")->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_out, "CSV path, stdout when omitted");

  // export
  auto* exp = app.add_subcommand("export", "export checkpoint parameters or the config schema");
  exp->require_subcommand(1);
  auto* exp_params = exp->add_subcommand("params", "checkpoint parameters as CSV");
  std::string exp_ckpt, exp_out;
  exp_params->add_option("checkpoint", exp_ckpt, "checkpoint file")->required();
  exp_params->add_option("--out", exp_out, "CSV path, stdout when omitted");
  auto* exp_config = exp->add_subcommand("config", "effective configuration as a config file");
  std::string exp_cfg_file, exp_cfg_out;
  std::vector<std::string> exp_sets;
  exp_config->add_option("-c,--config", exp_cfg_file, "config file to merge");
  exp_config->add_option("--set", exp_sets, "section.key=value, repeatable");
  exp_config->add_option("--out", exp_cfg_out, "path, stdout when omitted");

  std::vector<const char*> cargs;
  for (const auto& a : argv) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*train) {
      std::vector<Override> ov;
      for (const auto& s : sets) ov.push_back(split_override(s));
      if (!env_variant.empty()) ov.emplace_back("env.variant", env_variant);
      if (train->count("--steps")) ov.emplace_back("train.total_steps", std::to_string(steps));
      if (train->count("--seed")) ov.emplace_back("train.seed", std::to_string(seed));
      if (train->count("--workers")) ov.emplace_back("train.workers", std::to_string(workers));
      if (!out_dir.empty()) ov.emplace_back("output.dir", out_dir);
      if (!run_name.empty()) ov.emplace_back("output.run_name", run_name);
      const Config cfg = load_config(config_file.empty() ? std::nullopt
                                                         : std::optional<fs::path>(config_file),
                                     ov);
      return cmd_train(cfg, out).status;
    }
    if (*eval) {
      er.checkpoint = eval_ckpt;
      if (!eval_env.empty()) er.variant = eval_env;
      for (const auto& s : eval_sets) er.env_overrides.push_back(split_override(s));
      if (!eval_traj.empty()) er.trajectory = fs::path(eval_traj);
      if (!eval_summary.empty()) er.summary = fs::path(eval_summary);
      return cmd_eval(er, out);
    }
    if (*bench) {
      if (synth == env_bench) throw std::invalid_argument("bench: pass exactly one of --synthetic or --env");
      br.synthetic = synth;
      br.M_list.clear();
      for (long long v : parse_int_list(m_list)) br.M_list.push_back(static_cast<int>(v));
      br.P_list.clear();
      for (long long v : parse_int_list(p_list)) br.P_list.push_back(static_cast<Eigen::Index>(v));
      br.goals.clear();
      for (long long v : parse_int_list(goals)) br.goals.push_back(static_cast<int>(v));
      br.seeds.clear();
      for (long long v : parse_int_list(seeds)) br.seeds.push_back(static_cast<std::uint64_t>(v));
      br.solvers.clear();
      std::istringstream in(solvers);
      std::string name;
      while (std::getline(in, name, ',')) br.solvers.push_back(parse_solver(name));
      if (!bench_out.empty()) br.output = fs::path(bench_out);
      return cmd_bench(br, out);
    }
    if (*exp_params) {
      if (exp_out.empty()) return cmd_export_params(exp_ckpt, out);
      std::ofstream f = open_out(exp_out);
      return cmd_export_params(exp_ckpt, f);
    }
    if (*exp_config) {
      std::vector<Override> ov;
      for (const auto& s : exp_sets) ov.push_back(split_override(s));
      const Config cfg = load_config(exp_cfg_file.empty() ? std::nullopt
                                                          : std::optional<fs::path>(exp_cfg_file),
                                     ov);
      if (exp_cfg_out.empty()) return cmd_export_config(cfg, out);
      std::ofstream f = open_out(exp_cfg_out);
      return cmd_export_config(cfg, f);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}

}  // namespace lexpg::cli
