/*
 Copyright 2026 The Paddle Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "paddle/policy/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "paddle/errors.hpp"
#include "paddle/util/csv.hpp"

namespace paddle::policy {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

const NamedArray* Checkpoint::find(const std::string& name) const {
  for (const auto& a : arrays) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

void Checkpoint::put(std::string name, std::vector<float> data) {
  for (auto& a : arrays) {
    if (a.name == name) {
      a.data = std::move(data);
      return;
    }
  }
  arrays.push_back({std::move(name), std::move(data)});
}

namespace {

template <typename T>
void append_raw(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

void append_string(std::string& out, const std::string& s) {
  append_raw<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T raw() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string str() {
    const auto len = raw<std::uint32_t>();
    need(len);
    std::string s = bytes_.substr(pos_, len);
    pos_ += len;
    return s;
  }

  void floats(std::vector<float>& out, std::uint64_t count) {
    if (count > (bytes_.size() - pos_) / sizeof(float)) throw IoError("checkpoint truncated");
    out.resize(static_cast<std::size_t>(count));
    std::memcpy(out.data(), bytes_.data() + pos_, static_cast<std::size_t>(count) * sizeof(float));
    pos_ += static_cast<std::size_t>(count) * sizeof(float);
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw IoError("checkpoint truncated");
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string checkpoint_to_bytes(const Checkpoint& ckpt) {
  std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
  append_raw<std::uint32_t>(out, kCheckpointVersion);
  append_string(out, ckpt.fingerprint);
  append_string(out, ckpt.spec.to_json().dump());
  append_raw<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.arrays.size()));
  for (const auto& a : ckpt.arrays) {
    append_string(out, a.name);
    append_raw<std::uint64_t>(out, a.data.size());
    out.append(reinterpret_cast<const char*>(a.data.data()), a.data.size() * sizeof(float));
  }
  return out;
}

Checkpoint checkpoint_from_bytes(const std::string& bytes) {
  if (bytes.size() < sizeof(kCheckpointMagic) ||
      std::memcmp(bytes.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0) {
    throw IoError("not a checkpoint file (bad magic)");
  }
  Reader r(bytes);
  for (std::size_t i = 0; i < sizeof(kCheckpointMagic); ++i) r.raw<char>();
  const auto version = r.raw<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw IoError("checkpoint version " + std::to_string(version) + " is not supported");
  }
  Checkpoint ckpt;
  ckpt.fingerprint = r.str();
  const std::string spec_text = r.str();
  try {
    ckpt.spec = PolicySpec::from_json(nlohmann::json::parse(spec_text));
  } catch (const std::exception& e) {
    throw IoError(std::string("checkpoint policy spec unreadable: ") + e.what());
  }
  const auto n = r.raw<std::uint32_t>();
  for (std::uint32_t i = 0; i < n; ++i) {
    NamedArray a;
    a.name = r.str();
    const auto count = r.raw<std::uint64_t>();
    r.floats(a.data, count);
    ckpt.arrays.push_back(std::move(a));
  }
  if (!r.at_end()) throw IoError("checkpoint has trailing bytes");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  util::write_text_file(path, checkpoint_to_bytes(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const std::optional<std::string>& expected_fingerprint,
                           bool force) {
  Checkpoint ckpt = checkpoint_from_bytes(util::read_text_file(path));
  if (expected_fingerprint && *expected_fingerprint != ckpt.fingerprint) {
    const std::string msg = "checkpoint fingerprint " + ckpt.fingerprint + " does not match config fingerprint " +
                            *expected_fingerprint;
    if (!force) throw ConfigError(msg);
    ckpt.warnings.push_back(msg + " (loaded anyway: forced)");
  }
  return ckpt;
}

}  // namespace paddle::policy
