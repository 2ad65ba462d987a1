// mi/config.h  --  INI-style config files for the training and harness CLIs
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

#ifndef MI_CONFIG_H_
#define MI_CONFIG_H_

#include <map>
#include <string>
#include <vector>

#include "mi/harness.h"

namespace mi {

// Sectioned key-value text: `[section]` headers, `key = value` lines, `#` or
// `;` comments. Values keep their raw text; typed getters parse on demand.
class Ini {
 public:
  static Ini FromFile(const std::string& path);
  static Ini FromString(const std::string& text);

  bool Has(const std::string& section, const std::string& key) const;
  std::string GetString(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
  int64_t GetInt(const std::string& section, const std::string& key,
                 int64_t fallback) const;
  double GetDouble(const std::string& section, const std::string& key,
                   double fallback) const;
  bool GetBool(const std::string& section, const std::string& key,
               bool fallback) const;
  std::vector<double> GetDoubleList(const std::string& section,
                                    const std::string& key,
                                    const std::vector<double>& fallback) const;
  std::vector<int64_t> GetIntList(const std::string& section,
                                  const std::string& key,
                                  const std::vector<int64_t>& fallback) const;
  std::vector<std::string> GetStringList(
      const std::string& section, const std::string& key,
      const std::vector<std::string>& fallback) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

// Each loader starts from the given defaults and overrides whatever keys the
// file provides, so config files only need to name what they change.
SynthSpec ParseSynthSpec(const Ini& ini, const SynthSpec& defaults);
SplitSpec ParseSplitSpec(const Ini& ini, const SplitSpec& defaults);
FeatureConfig ParseFeatureConfig(const Ini& ini, const FeatureConfig& defaults);
ModelConfig ParseModelConfig(const Ini& ini, const ModelConfig& defaults);
MultiStepSchedule ParseSchedule(const Ini& ini, const std::string& section,
                                const MultiStepSchedule& defaults);
MetaConfig ParseMetaConfig(const Ini& ini, const MetaConfig& defaults);
AdaptConfig ParseAdaptConfig(const Ini& ini, const AdaptConfig& defaults);
ExperimentPlan ParseExperimentPlan(const Ini& ini);
AblationPlan ParseAblationPlan(const Ini& ini);

ExperimentPlan LoadExperimentPlan(const std::string& path);
AblationPlan LoadAblationPlan(const std::string& path);

}  // namespace mi

#endif  // MI_CONFIG_H_
