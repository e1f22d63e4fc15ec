// Copyright 2026 The vflsim Authors
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
//

#ifndef VFLSIM_HARNESS_REPORT_H_
#define VFLSIM_HARNESS_REPORT_H_

#include <string>

#include "vflsim/harness/experiment.h"
#include "vflsim/harness/sweep.h"

namespace vflsim {

std::string ReportToJson(const ExperimentReport& report);
void WriteReport(const ExperimentReport& report, const std::string& path);

// Per-run rows: axis_value,seed,final_mta,final_asr,lia_at_rn.
std::string SweepRunsCsv(const SweepResult& result);
// Per-value rows with mean and sample stdev of each metric.
std::string SweepSummaryCsv(const SweepResult& result);
void WriteText(const std::string& text, const std::string& path);

}  // namespace vflsim

#endif  // VFLSIM_HARNESS_REPORT_H_
