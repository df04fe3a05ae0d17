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

#ifndef LEXPG_CLI_CONFIG_HPP_
#define LEXPG_CLI_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lexpg/ppo.hpp"

namespace lexpg::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ValueType { kString, kReal, kInt, kUint, kBool, kReals, kInts, kChoice };

struct KeySpec {
  std::string key;  // section.name
  ValueType type = ValueType::kString;
  std::string default_value;  // empty with required = true means no default
  bool required = false;
  std::vector<std::string> choices;  // kChoice only
  std::string help;
};

const std::vector<KeySpec>& schema();
const KeySpec* find_key(const std::string& key);

struct Entry {
  std::string value;
  std::string origin;  // "default", "file:line", "env NAME" or "cli"
};

/// Effective configuration, layered defaults < file < environment < command line.
class Config {
 public:
  static Config defaults();

  void merge_file(const std::filesystem::path& path);
  /// Parses `key = value` lines with [section] headers; `name` prefixes errors.
  void merge_text(const std::string& text, const std::string& name);
  /// Reads LEXPG_<SECTION>_<KEY> for every schema key.
  void merge_environment();
  void set(const std::string& key, const std::string& value, const std::string& origin);

  bool has(const std::string& key) const;
  const Entry& entry(const std::string& key) const;
  const std::string& str(const std::string& key) const;
  double real(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::uint64_t uinteger(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<int> ints(const std::string& key) const;

  /// Throws naming the first required key without a value.
  void require_complete() const;
  /// Canonical `key = value` text grouped by section; stable across runs.
  std::string dump() const;
  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
};

std::string env_var_name(const std::string& key);

TrainConfig train_config(const Config& c);
std::unique_ptr<Environment> make_environment(const Config& c);

}  // namespace lexpg::cli

#endif  // LEXPG_CLI_CONFIG_HPP_
