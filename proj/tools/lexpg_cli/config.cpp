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

#include "lexpg_cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lexpg/nav2d.hpp"

namespace lexpg::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  if (s.empty() || s.front() == '+') return false;
  if constexpr (std::is_unsigned_v<T>) {
    if (s.front() == '-') return false;
  }
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end) return false;
  if constexpr (std::is_floating_point_v<T>) return std::isfinite(out);
  return true;
}

std::string type_name(const KeySpec& k) {
  switch (k.type) {
    case ValueType::kString: return "a string";
    case ValueType::kReal: return "a real number";
    case ValueType::kInt: return "an integer";
    case ValueType::kUint: return "a non-negative integer";
    case ValueType::kBool: return "true or false";
    case ValueType::kReals: return "a comma-separated list of reals";
    case ValueType::kInts: return "a comma-separated list of integers";
    case ValueType::kChoice: {
      std::string s = "one of";
      for (const auto& c : k.choices) s += " " + c;
      return s;
    }
  }
  return "?";
}

bool parse_bool(const std::string& v, bool& out) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0" || s == "no" || s == "off") {
    out = false;
    return true;
  }
  return false;
}

bool valid(const KeySpec& k, const std::string& v) {
  switch (k.type) {
    case ValueType::kString: return !v.empty() || !k.required;
    case ValueType::kReal: {
      double d;
      return parse_number(v, d);
    }
    case ValueType::kInt: {
      long long i;
      return parse_number(v, i);
    }
    case ValueType::kUint: {
      std::uint64_t u;
      return parse_number(v, u);
    }
    case ValueType::kBool: {
      bool b;
      return parse_bool(v, b);
    }
    case ValueType::kReals: {
      if (v.empty()) return true;
      for (const auto& p : split(v, ',')) {
        double d;
        if (!parse_number(p, d)) return false;
      }
      return true;
    }
    case ValueType::kInts: {
      if (v.empty()) return false;
      for (const auto& p : split(v, ',')) {
        int i;
        if (!parse_number(p, i)) return false;
      }
      return true;
    }
    case ValueType::kChoice:
      return std::find(k.choices.begin(), k.choices.end(), v) != k.choices.end();
  }
  return false;
}

}  // namespace

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> keys = {
      {"env.variant", ValueType::kString, "", true, {}, "nav2d-1g, nav2d-2g, nav2d-2g-rev or nav2d-<n>g"},
      {"env.goal_penalty", ValueType::kChoice, "divisor", false, {"divisor", "multiplier"},
       "distance penalty -d^2/lambda (divisor) or -lambda*d^2 (multiplier)"},
      {"env.lambda", ValueType::kReal, "100", false, {}, "goal distance penalty scale"},
      {"train.total_steps", ValueType::kUint, "1000000", false, {}, "environment steps"},
      {"train.seed", ValueType::kUint, "0", false, {}, "root seed"},
      {"train.actor_lr", ValueType::kReal, "5e-05", false, {}, ""},
      {"train.critic_lr", ValueType::kReal, "0.0001", false, {}, ""},
      {"train.gamma", ValueType::kReal, "0.99", false, {}, ""},
      {"train.gae_lambda", ValueType::kReal, "0.95", false, {}, ""},
      {"train.batch", ValueType::kInt, "2048", false, {}, "rollout steps per update"},
      {"train.minibatch", ValueType::kInt, "64", false, {}, ""},
      {"train.epochs", ValueType::kInt, "10", false, {}, ""},
      {"train.clip_ratio", ValueType::kReal, "0.2", false, {}, ""},
      {"train.eps", ValueType::kReals, "", false, {}, "per-subtask slack, empty = all zero"},
      {"train.dykstra_tol", ValueType::kReal, "1e-06", false, {}, ""},
      {"train.dykstra_max_iter", ValueType::kInt, "500", false, {}, ""},
      {"train.resample_shortcut", ValueType::kBool, "false", false, {}, ""},
      {"train.subproblem_exploration", ValueType::kBool, "true", false, {}, ""},
      {"train.normalize_advantages", ValueType::kBool, "true", false, {}, ""},
      {"train.actor_step", ValueType::kChoice, "sgd", false, {"sgd", "rms"}, ""},
      {"train.rms_decay", ValueType::kReal, "0.999", false, {}, ""},
      {"train.nonconverged_budget", ValueType::kInt, "10", false, {}, ""},
      {"train.actor_hidden", ValueType::kInts, "64,64,64", false, {}, ""},
      {"train.critic_hidden", ValueType::kInts, "64,64,64", false, {}, ""},
      {"train.workers", ValueType::kInt, "1", false, {}, "parallel rollout collectors"},
      {"output.dir", ValueType::kString, "runs", false, {}, "parent directory of run folders"},
      {"output.run_name", ValueType::kString, "", false, {}, "empty derives one from the config"},
      {"output.checkpoint_every", ValueType::kInt, "0", false, {}, "updates between checkpoints, 0 = final only"},
  };
  return keys;
}

const KeySpec* find_key(const std::string& key) {
  for (const auto& k : schema()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

std::string env_var_name(const std::string& key) {
  std::string s = "LEXPG_";
  for (char c : key) s += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

Config Config::defaults() {
  Config c;
  for (const auto& k : schema()) {
    if (!k.required) c.entries_[k.key] = Entry{k.default_value, "default"};
  }
  return c;
}

void Config::set(const std::string& key, const std::string& value, const std::string& origin) {
  const KeySpec* k = find_key(key);
  if (!k) throw ConfigError(origin + ": unknown key '" + key + "'");
  if (!valid(*k, value)) {
    throw ConfigError(origin + ": " + key + ": expected " + type_name(*k) + ", got '" + value + "'");
  }
  if (key == "env.variant") {
    try {
      nav2d::Variant::parse(value);
    } catch (const std::exception& e) {
      throw ConfigError(origin + ": env.variant: " + e.what());
    }
  }
  entries_[key] = Entry{value, origin};
}

void Config::merge_text(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::map<std::string, int> seen;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string where = name + ":" + std::to_string(line);
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s.resize(hash);
    s = trim(s);
    if (s.empty() || s.front() == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty() || section.find_first_of(" \t.=") != std::string::npos) {
        throw ConfigError(where + ": invalid section name '" + section + "'");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string name_part = trim(s.substr(0, eq));
    if (name_part.empty()) throw ConfigError(where + ": missing key before '='");
    std::string key = name_part;
    if (name_part.find('.') == std::string::npos) {
      if (section.empty()) throw ConfigError(where + ": key '" + name_part + "' outside any section");
      key = section + "." + name_part;
    }
    if (auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(where + ": duplicate key '" + key + "' (first set on line " +
                        std::to_string(it->second) + ")");
    }
    seen[key] = line;
    set(key, trim(s.substr(eq + 1)), where);
  }
}

void Config::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  merge_text(text.str(), path.string());
}

void Config::merge_environment() {
  for (const auto& k : schema()) {
    const std::string var = env_var_name(k.key);
    if (const char* v = std::getenv(var.c_str())) set(k.key, trim(v), "env " + var);
  }
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

const Entry& Config::entry(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

const std::string& Config::str(const std::string& key) const { return entry(key).value; }

double Config::real(const std::string& key) const {
  double d = 0.0;
  parse_number(str(key), d);
  return d;
}

long long Config::integer(const std::string& key) const {
  long long i = 0;
  parse_number(str(key), i);
  return i;
}

std::uint64_t Config::uinteger(const std::string& key) const {
  std::uint64_t u = 0;
  parse_number(str(key), u);
  return u;
}

bool Config::boolean(const std::string& key) const {
  bool b = false;
  parse_bool(str(key), b);
  return b;
}

std::vector<double> Config::reals(const std::string& key) const {
  std::vector<double> out;
  const std::string& v = str(key);
  if (v.empty()) return out;
  for (const auto& p : split(v, ',')) {
    double d = 0.0;
    parse_number(p, d);
    out.push_back(d);
  }
  return out;
}

std::vector<int> Config::ints(const std::string& key) const {
  std::vector<int> out;
  for (const auto& p : split(str(key), ',')) {
    int i = 0;
    parse_number(p, i);
    out.push_back(i);
  }
  return out;
}

void Config::require_complete() const {
  for (const auto& k : schema()) {
    if (k.required && !has(k.key)) {
      throw ConfigError("missing config key '" + k.key + "' (set it in the config file, with " +
                        env_var_name(k.key) + ", or on the command line)");
    }
  }
}

std::string Config::dump() const {
  std::ostringstream out;
  std::string section;
  for (const auto& k : schema()) {
    const auto it = entries_.find(k.key);
    if (it == entries_.end()) continue;
    const auto dot = k.key.find('.');
    const std::string sec = k.key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out << '\n';
      out << '[' << sec << "]\n";
      section = sec;
    }
    out << k.key.substr(dot + 1) << " = " << it->second.value << '\n';
  }
  return out.str();
}

namespace {

void check(bool ok, const Config& c, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(c.entry(key).origin + ": " + key + ": " + what);
}

}  // namespace

TrainConfig train_config(const Config& c) {
  TrainConfig t;
  t.actor_lr = c.real("train.actor_lr");
  t.critic_lr = c.real("train.critic_lr");
  t.gamma = c.real("train.gamma");
  t.gae_lambda = c.real("train.gae_lambda");
  t.batch = static_cast<int>(c.integer("train.batch"));
  t.minibatch = static_cast<int>(c.integer("train.minibatch"));
  t.epochs = static_cast<int>(c.integer("train.epochs"));
  t.clip_ratio = c.real("train.clip_ratio");
  const auto eps = c.reals("train.eps");
  t.eps = Eigen::Map<const Vector>(eps.data(), static_cast<Eigen::Index>(eps.size()));
  t.dykstra_tol = c.real("train.dykstra_tol");
  t.dykstra_max_iter = static_cast<int>(c.integer("train.dykstra_max_iter"));
  t.resample_shortcut = c.boolean("train.resample_shortcut");
  t.subproblem_exploration = c.boolean("train.subproblem_exploration");
  t.normalize_advantages = c.boolean("train.normalize_advantages");
  t.actor_step = c.str("train.actor_step") == "rms" ? ActorStep::kRms : ActorStep::kSgd;
  t.rms_decay = c.real("train.rms_decay");
  t.nonconverged_budget = static_cast<int>(c.integer("train.nonconverged_budget"));
  t.actor_hidden = c.ints("train.actor_hidden");
  t.critic_hidden = c.ints("train.critic_hidden");
  t.workers = static_cast<int>(c.integer("train.workers"));
  t.total_steps = c.uinteger("train.total_steps");
  t.seed = c.uinteger("train.seed");

  check(t.actor_lr > 0, c, "train.actor_lr", "must be positive");
  check(t.critic_lr > 0, c, "train.critic_lr", "must be positive");
  check(t.gamma > 0 && t.gamma <= 1, c, "train.gamma", "must lie in (0, 1]");
  check(t.gae_lambda >= 0 && t.gae_lambda <= 1, c, "train.gae_lambda", "must lie in [0, 1]");
  check(t.batch >= 1, c, "train.batch", "must be positive");
  check(t.minibatch >= 1 && t.minibatch <= t.batch, c, "train.minibatch", "must lie in [1, batch]");
  check(t.epochs >= 1, c, "train.epochs", "must be positive");
  check(t.clip_ratio > 0 && t.clip_ratio < 1, c, "train.clip_ratio", "must lie in (0, 1)");
  check((t.eps.array() >= 0).all(), c, "train.eps", "entries must be non-negative");
  check(t.dykstra_tol > 0, c, "train.dykstra_tol", "must be positive");
  check(t.dykstra_max_iter >= 1, c, "train.dykstra_max_iter", "must be positive");
  check(t.rms_decay > 0 && t.rms_decay < 1, c, "train.rms_decay", "must lie in (0, 1)");
  check(t.nonconverged_budget >= 0, c, "train.nonconverged_budget", "must be non-negative");
  for (const char* key : {"train.actor_hidden", "train.critic_hidden"}) {
    const auto h = c.ints(key);
    check(std::all_of(h.begin(), h.end(), [](int w) { return w >= 1; }), c, key,
          "layer widths must be positive");
  }
  check(t.workers >= 1 && t.workers <= t.batch, c, "train.workers", "must lie in [1, batch]");
  check(t.total_steps >= 1, c, "train.total_steps", "must be positive");
  check(c.integer("output.checkpoint_every") >= 0, c, "output.checkpoint_every",
        "must be non-negative");
  return t;
}

std::unique_ptr<Environment> make_environment(const Config& c) {
  c.require_complete();
  const nav2d::Variant v = nav2d::Variant::parse(c.str("env.variant"));
  nav2d::MapSpec map = nav2d::make_map(v);
  map.lambda = c.real("env.lambda");
  check(map.lambda > 0, c, "env.lambda", "must be positive");
  map.goal_penalty = c.str("env.goal_penalty") == "multiplier" ? nav2d::GoalPenalty::kMultiplier
                                                               : nav2d::GoalPenalty::kDivisor;
  auto env = std::make_unique<nav2d::Nav2DEnv>(std::move(map), v.name());
  const auto eps = c.reals("train.eps");
  check(eps.empty() || static_cast<int>(eps.size()) == env->subtasks(), c, "train.eps",
        "needs one entry per subtask (" + std::to_string(env->subtasks()) + " for " + v.name() + ")");
  return env;
}

}  // namespace lexpg::cli
