// core/src/common.cc
//
// Copyright 2026  metainit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "mi/common.h"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <ostream>
#include <thread>

namespace mi {

uint64_t MixSeed(uint64_t x) {
  // SplitMix64 finalizer (Steele, Lea, Flood 2014).
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t MixSeed(uint64_t a, uint64_t b) { return MixSeed(MixSeed(a) ^ b); }

uint64_t MixSeed(uint64_t a, uint64_t b, uint64_t c) {
  return MixSeed(MixSeed(a, b) ^ c);
}

uint64_t MixSeed(uint64_t a, uint64_t b, uint64_t c, uint64_t d) {
  return MixSeed(MixSeed(a, b, c) ^ d);
}

double RandUniform(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int64_t RandInt(Rng& rng, int64_t lo, int64_t hi) {
  Require(lo <= hi, "RandInt: empty range");
  uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  return lo + static_cast<int64_t>(rng() % span);
}

double RandRange(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * RandUniform(rng);
}

std::vector<int> SampleWithoutReplacement(Rng& rng, int n, int k) {
  Require(k >= 0 && k <= n, "SampleWithoutReplacement: k out of range");
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  std::vector<int> out(k);
  for (int i = 0; i < k; ++i) {
    int j = static_cast<int>(RandInt(rng, i, n - 1));
    std::swap(pool[i], pool[j]);
    out[i] = pool[i];
  }
  return out;
}

void ParallelFor(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  int workers = std::min(threads, n);
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

void WriteBytes(std::ostream& os, const void* data, size_t n) {
  os.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!os) throw std::runtime_error("write failed");
}

void ReadBytes(std::istream& is, void* data, size_t n) {
  is.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (!is) throw std::runtime_error("read failed: truncated input");
}

namespace {

static_assert(sizeof(float) == 4 && sizeof(double) == 8, "IEEE-754 expected");

template <typename T>
void WriteLe(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));  // host is little-endian on all targets
  WriteBytes(os, buf, sizeof(T));
}

template <typename T>
T ReadLe(std::istream& is) {
  unsigned char buf[sizeof(T)];
  ReadBytes(is, buf, sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

void WriteU32(std::ostream& os, uint32_t v) { WriteLe(os, v); }
void WriteU64(std::ostream& os, uint64_t v) { WriteLe(os, v); }
void WriteF32(std::ostream& os, float v) { WriteLe(os, v); }
void WriteF64(std::ostream& os, double v) { WriteLe(os, v); }
uint32_t ReadU32(std::istream& is) { return ReadLe<uint32_t>(is); }
uint64_t ReadU64(std::istream& is) { return ReadLe<uint64_t>(is); }
float ReadF32(std::istream& is) { return ReadLe<float>(is); }
double ReadF64(std::istream& is) { return ReadLe<double>(is); }

int EnvThreadCap(const char* env_var) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (env_var != nullptr) {
    const char* v = std::getenv(env_var);
    if (v != nullptr && *v != '\0') {
      int cap = std::atoi(v);
      if (cap >= 1) return std::min(hw, cap);
    }
  }
  return hw;
}

}  // namespace mi
