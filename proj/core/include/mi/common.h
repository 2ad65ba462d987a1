// mi/common.h
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

#ifndef MI_COMMON_H_
#define MI_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mi {

// Precondition check used across the library; throws std::invalid_argument.
inline void Require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent rng streams from a master
// seed so that per-(iteration, task) sampling is order independent.
uint64_t MixSeed(uint64_t x);
uint64_t MixSeed(uint64_t a, uint64_t b);
uint64_t MixSeed(uint64_t a, uint64_t b, uint64_t c);
uint64_t MixSeed(uint64_t a, uint64_t b, uint64_t c, uint64_t d);

// Uniform double in [0, 1). Hand-rolled from the raw 64-bit draw so results
// do not depend on the standard library's distribution implementation.
double RandUniform(Rng& rng);

// Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
int64_t RandInt(Rng& rng, int64_t lo, int64_t hi);

// Uniform double in [lo, hi).
double RandRange(Rng& rng, double lo, double hi);

// Sample `k` distinct indices from [0, n) without replacement; order is the
// draw order (partial Fisher-Yates).
std::vector<int> SampleWithoutReplacement(Rng& rng, int n, int k);

// Fork-join helper: runs fn(i) for i in [0, n) on up to `threads` workers.
// With threads <= 1 it degenerates to a plain loop. fn must not throw.
void ParallelFor(int n, int threads, const std::function<void(int)>& fn);

// Little-endian binary primitives for the feature/checkpoint file formats.
void WriteU32(std::ostream& os, uint32_t v);
void WriteU64(std::ostream& os, uint64_t v);
void WriteF32(std::ostream& os, float v);
void WriteF64(std::ostream& os, double v);
void WriteBytes(std::ostream& os, const void* data, size_t n);
uint32_t ReadU32(std::istream& is);
uint64_t ReadU64(std::istream& is);
float ReadF32(std::istream& is);
double ReadF64(std::istream& is);
void ReadBytes(std::istream& is, void* data, size_t n);

// Hardware thread count, optionally capped by the given environment variable
// (used for MI_THREADS). Returns at least 1.
int EnvThreadCap(const char* env_var);

}  // namespace mi

#endif  // MI_COMMON_H_
