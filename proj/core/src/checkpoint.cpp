// Copyright 2026 The qdenoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qdn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

#include "qdn/error.hpp"

namespace qdn {
namespace {

constexpr std::string_view kTag = "QDNCKPT1";

class Writer {
 public:
  void raw(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void doubles(std::span<const double> vs) {
    for (const double v : vs) f64(v);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw LengthError("checkpoint: truncated at byte " + std::to_string(pos_));
  }
  std::string_view raw(std::size_t n) {
    need(n);
    std::string_view s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void doubles(std::span<double> out) {
    need(out.size() * 8);
    for (auto& v : out) v = f64();
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.raw(kTag);
  w.u64(ckpt.model.n);
  const auto& c = ckpt.config;
  w.u64(c.epochs);
  w.u64(c.batch_size);
  w.f64(c.lr);
  w.f64(c.beta1);
  w.f64(c.beta2);
  w.f64(c.epsilon);
  w.u64(c.seed);
  w.u64(ckpt.optimizer.t);
  for (const auto& t : ckpt.model.params.tensors) {
    w.u64(t.rank());
    for (const auto e : t.shape()) w.u64(e);
    w.doubles(t.data());
  }
  for (const auto* moments : {&ckpt.optimizer.m, &ckpt.optimizer.v}) {
    if (!moments->empty() && moments->size() != kParamCount) {
      throw ShapeError("checkpoint: optimizer state does not match the parameter count");
    }
    for (std::size_t i = 0; i < kParamCount; ++i) {
      if (moments->empty()) {
        w.u64(0);
        continue;
      }
      w.u64((*moments)[i].size());
      w.doubles((*moments)[i]);
    }
  }
  return w.take();
}

Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (bytes.size() < kTag.size() || r.raw(kTag.size()) != kTag) throw FormatError("checkpoint: bad format tag");
  Checkpoint ck;
  const std::uint64_t n = r.u64();
  ck.model = CnnModel::zeros(n);
  auto& c = ck.config;
  c.epochs = r.u64();
  c.batch_size = r.u64();
  c.lr = r.f64();
  c.beta1 = r.f64();
  c.beta2 = r.f64();
  c.epsilon = r.f64();
  c.seed = r.u64();
  ck.optimizer.config = c.adam();
  ck.optimizer.t = r.u64();
  for (auto& t : ck.model.params.tensors) {
    const std::uint64_t rank = r.u64();
    if (rank != t.rank()) throw FormatError("checkpoint: tensor rank mismatch");
    for (std::size_t a = 0; a < rank; ++a) {
      if (r.u64() != t.extent(a)) throw FormatError("checkpoint: tensor extent mismatch");
    }
    r.doubles(t.data());
  }
  for (auto* moments : {&ck.optimizer.m, &ck.optimizer.v}) {
    std::vector<std::vector<double>> buffers(kParamCount);
    bool any = false;
    for (std::size_t i = 0; i < kParamCount; ++i) {
      const std::uint64_t count = r.u64();
      if (count != 0 && count != ck.model.params.tensors[i].size()) {
        throw FormatError("checkpoint: optimizer moment size mismatch");
      }
      buffers[i].resize(count);
      r.doubles(buffers[i]);
      any = any || count != 0;
    }
    if (any) *moments = std::move(buffers);
  }
  if (!r.done()) throw FormatError("checkpoint: trailing bytes");
  return ck;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(ckpt);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  try {
    return deserialize_checkpoint(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace qdn
