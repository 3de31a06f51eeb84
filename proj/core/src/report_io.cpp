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

#include "sonahunt/report_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "sonahunt/error.hpp"

namespace sonahunt {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::pair<std::string, double>> columns(const EvalReport& r) {
  return {{"MAP", r.map},
          {"MP@1", r.mp_at.at(1)},
          {"MP@10", r.mp_at.at(10)},
          {"MRR", r.mrr},
          {"Acc@1", r.acc_at.at(1)},
          {"Acc@10", r.acc_at.at(10)},
          {"Median Rank", static_cast<double>(r.median_rank)}};
}

void write_metrics(std::ostream& out, const std::string& prefix, const EvalReport& r) {
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::fixed << std::setprecision(6);
  for (const auto& [name, value] : columns(r)) {
    if (name == "Median Rank") {
      out << prefix << name << '=' << r.median_rank << '\n';
    } else {
      out << prefix << name << '=' << value << '\n';
    }
  }
  out << prefix << "query_count=" << r.query_count << '\n';
  out << prefix << "skipped_queries=" << r.skipped_queries << '\n';
  if (r.linked_sense_rate) out << prefix << "linked_sense_rate=" << *r.linked_sense_rate << '\n';
  out.flags(old_flags);
  out.precision(old_precision);
}

ordered_json report_object(const EvalReport& r) {
  ordered_json metrics = ordered_json::object();
  for (const auto& [name, value] : columns(r)) {
    if (name == "Median Rank") metrics[name] = r.median_rank;
    else metrics[name] = value;
  }
  ordered_json doc;
  doc["metrics"] = metrics;
  doc["query_count"] = r.query_count;
  doc["skipped_queries"] = r.skipped_queries;
  if (r.linked_sense_rate) doc["linked_sense_rate"] = *r.linked_sense_rate;
  ordered_json per_query = ordered_json::array();
  for (const auto& q : r.per_query) {
    per_query.push_back({{"query_id", q.query_id},
                         {"ap", q.average_precision},
                         {"rr", q.reciprocal_rank},
                         {"first_relevant_rank", q.first_relevant_rank}});
  }
  doc["per_query"] = std::move(per_query);
  return doc;
}

ordered_json header_object(const ReportHeader& header) {
  ordered_json obj = ordered_json::object();
  for (const auto& [key, value] : header) obj[key] = value;
  return obj;
}

ordered_json column_names() {
  ordered_json names = ordered_json::array();
  for (const char* c : kReportColumns) names.push_back(c);
  return names;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::kIoFailure, "short write to " + path.string());
}

std::filesystem::path json_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

}  // namespace

void write_report_text(std::ostream& out, const ReportHeader& header, const EvalReport& report) {
  for (const auto& [key, value] : header) out << key << '=' << value << '\n';
  write_metrics(out, "", report);
}

std::string report_json(const ReportHeader& header, const EvalReport& report) {
  ordered_json doc;
  doc["config"] = header_object(header);
  doc["columns"] = column_names();
  const auto body = report_object(report);
  for (const auto& [key, value] : body.items()) doc[key] = value;
  return doc.dump(2) + "\n";
}

void write_report_files(const std::filesystem::path& path, const ReportHeader& header,
                        const EvalReport& report) {
  std::ostringstream text;
  write_report_text(text, header, report);
  write_file(path, text.str());
  write_file(json_path(path), report_json(header, report));
}

void write_report_files(const std::filesystem::path& path, const ReportHeader& header,
                        const std::map<LanguageCode, EvalReport>& reports) {
  std::ostringstream text;
  for (const auto& [key, value] : header) text << key << '=' << value << '\n';
  ordered_json doc;
  doc["config"] = header_object(header);
  doc["columns"] = column_names();
  doc["languages"] = ordered_json::object();
  for (const auto& [language, report] : reports) {
    write_metrics(text, language + ".", report);
    doc["languages"][language] = report_object(report);
  }
  write_file(path, text.str());
  write_file(json_path(path), doc.dump(2) + "\n");
}

}  // namespace sonahunt
