// core/src/wav.cc
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

#include "mi/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "mi/common.h"

namespace mi {

namespace {

constexpr uint32_t kRiffTag = 0x46464952;  // "RIFF"
constexpr uint32_t kWaveTag = 0x45564157;  // "WAVE"
constexpr uint32_t kFmtTag = 0x20746d66;   // "fmt "
constexpr uint32_t kDataTag = 0x61746164;  // "data"

void WriteU16(std::ostream& os, uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>(v >> 8)};
  WriteBytes(os, b, 2);
}

uint16_t ReadU16(std::istream& is) {
  unsigned char b[2];
  ReadBytes(is, b, 2);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

}  // namespace

void WriteWav(const std::string& path, const Waveform& wav) {
  Require(wav.sample_rate > 0, "WriteWav: sample_rate must be positive");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("WriteWav: cannot open " + path);

  uint32_t n = static_cast<uint32_t>(wav.samples.size());
  uint32_t data_bytes = n * 2;
  uint32_t sr = static_cast<uint32_t>(wav.sample_rate);

  WriteU32(os, kRiffTag);
  WriteU32(os, 36 + data_bytes);
  WriteU32(os, kWaveTag);
  WriteU32(os, kFmtTag);
  WriteU32(os, 16);          // PCM fmt chunk size
  WriteU16(os, 1);           // PCM
  WriteU16(os, 1);           // mono
  WriteU32(os, sr);
  WriteU32(os, sr * 2);      // byte rate
  WriteU16(os, 2);           // block align
  WriteU16(os, 16);          // bits per sample
  WriteU32(os, kDataTag);
  WriteU32(os, data_bytes);
  for (double s : wav.samples) {
    double clipped = std::clamp(s, -1.0, 1.0);
    int16_t q = static_cast<int16_t>(std::lround(clipped * 32767.0));
    WriteU16(os, static_cast<uint16_t>(q));
  }
  if (!os) throw std::runtime_error("WriteWav: write failed for " + path);
}

Waveform ReadWav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("ReadWav: cannot open " + path);

  if (ReadU32(is) != kRiffTag) throw std::runtime_error("ReadWav: not RIFF");
  ReadU32(is);  // riff size, unused
  if (ReadU32(is) != kWaveTag) throw std::runtime_error("ReadWav: not WAVE");

  Waveform wav;
  bool have_fmt = false;
  for (;;) {
    uint32_t tag, size;
    try {
      tag = ReadU32(is);
      size = ReadU32(is);
    } catch (const std::runtime_error&) {
      throw std::runtime_error("ReadWav: missing data chunk in " + path);
    }
    if (tag == kFmtTag) {
      uint16_t format = ReadU16(is);
      uint16_t channels = ReadU16(is);
      uint32_t sr = ReadU32(is);
      ReadU32(is);  // byte rate
      ReadU16(is);  // block align
      uint16_t bits = ReadU16(is);
      if (format != 1 || bits != 16)
        throw std::runtime_error("ReadWav: only 16-bit PCM supported");
      if (channels != 1)
        throw std::runtime_error("ReadWav: only mono supported");
      wav.sample_rate = static_cast<int>(sr);
      if (size > 16) is.seekg(size - 16, std::ios::cur);
      have_fmt = true;
    } else if (tag == kDataTag) {
      if (!have_fmt) throw std::runtime_error("ReadWav: data before fmt");
      uint32_t n = size / 2;
      wav.samples.resize(n);
      for (uint32_t i = 0; i < n; ++i) {
        int16_t q = static_cast<int16_t>(ReadU16(is));
        wav.samples[i] = static_cast<double>(q) / 32767.0;
      }
      return wav;
    } else {
      is.seekg(size + (size & 1), std::ios::cur);
      if (!is) throw std::runtime_error("ReadWav: truncated chunk");
    }
  }
}

}  // namespace mi
