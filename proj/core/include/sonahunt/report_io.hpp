// Copyright 2026 The Sonahunt Authors.
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

#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "sonahunt/metrics.hpp"

namespace sonahunt {

// Run settings echoed at the top of every report, in insertion order.
using ReportHeader = std::vector<std::pair<std::string, std::string>>;

// Column order of the published result tables.
inline constexpr const char* kReportColumns[] = {"MAP", "MP@1", "MP@10", "MRR",
                                                 "Acc@1", "Acc@10", "Median Rank"};

// "key=value" lines: header settings, then the seven columns, then counts.
void write_report_text(std::ostream& out, const ReportHeader& header, const EvalReport& report);

// JSON document with the same content plus per-query records.
std::string report_json(const ReportHeader& header, const EvalReport& report);

// Writes `path` (text) and `path` + ".json".
void write_report_files(const std::filesystem::path& path, const ReportHeader& header,
                        const EvalReport& report);

// Labeled protocol: one block per query language.
void write_report_files(const std::filesystem::path& path, const ReportHeader& header,
                        const std::map<LanguageCode, EvalReport>& reports);

}  // namespace sonahunt
