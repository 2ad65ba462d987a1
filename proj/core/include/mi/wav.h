// mi/wav.h  --  waveform container and 16-bit PCM RIFF I/O
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

#ifndef MI_WAV_H_
#define MI_WAV_H_

#include <string>
#include <vector>

namespace mi {

// Mono audio in double precision, nominal range [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  int NumSamples() const { return static_cast<int>(samples.size()); }
  double DurationSec() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Mono 16-bit PCM RIFF files. Samples are scaled by 32767 and rounded on
// write, so a write/read round trip is exact at int16 resolution.
void WriteWav(const std::string& path, const Waveform& wav);
Waveform ReadWav(const std::string& path);

}  // namespace mi

#endif  // MI_WAV_H_
