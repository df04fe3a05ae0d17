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

#include "lexpg/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace lexpg {

namespace {

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), c, c + n);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  void bytes(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw std::runtime_error("checkpoint: truncated input");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void write_widths(Writer& w, const std::vector<int>& widths) {
  w.u32(static_cast<std::uint32_t>(widths.size()));
  for (int h : widths) w.u32(static_cast<std::uint32_t>(h));
}

std::vector<int> read_widths(Reader& r) {
  const std::uint32_t n = r.u32();
  if (n > 64) throw std::runtime_error("checkpoint: implausible hidden layer count");
  std::vector<int> widths(n);
  for (auto& h : widths) h = static_cast<int>(r.u32());
  return widths;
}

}  // namespace

bool Checkpoint::operator==(const Checkpoint& o) const {
  auto same_bits = [](const Vector& a, const Vector& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
  };
  return env_variant == o.env_variant && state_dim == o.state_dim &&
         action_dim == o.action_dim && subtasks == o.subtasks && activation == o.activation &&
         actor_hidden == o.actor_hidden && critic_hidden == o.critic_hidden && seed == o.seed &&
         steps == o.steps && same_bits(actor, o.actor) && same_bits(critic, o.critic);
}

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& c) {
  Writer w;
  w.bytes(kCheckpointMagic, sizeof(kCheckpointMagic));
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(c.state_dim));
  w.u32(static_cast<std::uint32_t>(c.action_dim));
  w.u32(static_cast<std::uint32_t>(c.subtasks));
  w.u32(static_cast<std::uint32_t>(c.activation));
  write_widths(w, c.actor_hidden);
  write_widths(w, c.critic_hidden);
  w.u32(static_cast<std::uint32_t>(c.env_variant.size()));
  w.bytes(c.env_variant.data(), c.env_variant.size());
  w.u64(c.seed);
  w.u64(c.steps);
  w.u64(static_cast<std::uint64_t>(c.actor.size()));
  w.u64(static_cast<std::uint64_t>(c.critic.size()));
  for (Eigen::Index i = 0; i < c.actor.size(); ++i) w.f64(c.actor(i));
  for (Eigen::Index i = 0; i < c.critic.size(); ++i) w.f64(c.critic(i));
  return w.take();
}

Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  char magic[sizeof(kCheckpointMagic)];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("checkpoint: bad magic");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  }
  Checkpoint c;
  c.state_dim = static_cast<int>(r.u32());
  c.action_dim = static_cast<int>(r.u32());
  c.subtasks = static_cast<int>(r.u32());
  const std::uint32_t act = r.u32();
  if (act != 0) throw std::runtime_error("checkpoint: unknown activation " + std::to_string(act));
  c.activation = Activation::kTanh;
  c.actor_hidden = read_widths(r);
  c.critic_hidden = read_widths(r);
  const std::uint32_t len = r.u32();
  c.env_variant.resize(len);
  r.bytes(c.env_variant.data(), len);
  c.seed = r.u64();
  c.steps = r.u64();
  const std::uint64_t na = r.u64();
  const std::uint64_t nc = r.u64();
  if (na > bytes.size() / 8 || nc > bytes.size() / 8) {
    throw std::runtime_error("checkpoint: parameter count exceeds file size");
  }
  c.actor.resize(static_cast<Eigen::Index>(na));
  c.critic.resize(static_cast<Eigen::Index>(nc));
  for (Eigen::Index i = 0; i < c.actor.size(); ++i) c.actor(i) = r.f64();
  for (Eigen::Index i = 0; i < c.critic.size(); ++i) c.critic(i) = r.f64();
  if (!r.done()) throw std::runtime_error("checkpoint: trailing bytes");

  const auto expect_actor = MlpSpec{c.state_dim, c.actor_hidden, c.action_dim}.param_count() + c.action_dim;
  const auto expect_critic = MlpSpec{c.state_dim, c.critic_hidden, c.subtasks}.param_count();
  if (c.actor.size() != expect_actor || c.critic.size() != expect_critic) {
    throw std::runtime_error("checkpoint: parameter counts do not match the architecture");
  }
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const auto bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

std::uint64_t content_hash(const Vector& values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values(i));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace lexpg
