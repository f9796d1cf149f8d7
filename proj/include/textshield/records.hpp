// Copyright 2026 The TextShield Authors
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

#ifndef TEXTSHIELD_RECORDS_HPP_
#define TEXTSHIELD_RECORDS_HPP_

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "textshield/types.hpp"

namespace textshield {

using ojson = nlohmann::ordered_json;

inline constexpr int kRecordFormatVersion = 1;

class IncompatibleVersion : public Error {
 public:
  using Error::Error;
};

inline ojson to_json(const ConstraintReport& r) {
  ojson arr = ojson::array();
  for (const auto& e : r.entries) {
    ojson j;
    j["name"] = e.name;
    j["value"] = e.value ? ojson(*e.value) : ojson(nullptr);
    j["threshold"] = e.threshold;
    j["passed"] = e.passed;
    j["skipped"] = e.skipped;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline ConstraintReport constraint_report_from_json(const ojson& arr) {
  ConstraintReport r;
  for (const auto& j : arr) {
    MetricEntry e;
    e.name = j.at("name").get<std::string>();
    if (!j.at("value").is_null()) e.value = j.at("value").get<double>();
    e.threshold = j.at("threshold").get<double>();
    e.passed = j.at("passed").get<bool>();
    e.skipped = j.at("skipped").get<bool>();
    r.entries.push_back(std::move(e));
  }
  return r;
}

inline ojson to_json(const AttackOutcome& o) {
  ojson j;
  j["id"] = o.example_id;
  j["status"] = to_string(o.status);
  j["premise"] = o.premise ? ojson(*o.premise) : ojson(nullptr);
  j["gold"] = o.gold_label;
  j["original"] = o.original_text;
  j["final"] = o.final_text;
  j["queries"] = o.queries;
  j["detector_queries"] = o.detector_queries;
  j["verdict_queries"] = o.verdict_queries;
  j["constraints"] = to_json(o.constraints);
  ojson trace = ojson::array();
  for (const auto& e : o.trace)
    trace.push_back(ojson{{"op", to_string(e.op)}, {"token", e.token}, {"pos", e.position}, {"rep", e.replacement}});
  j["trace"] = std::move(trace);
  return j;
}

inline AttackOutcome outcome_from_json(const ojson& j) {
  AttackOutcome o;
  o.example_id = j.at("id").get<std::string>();
  o.status = attack_status_from_string(j.at("status").get<std::string>());
  if (!j.at("premise").is_null()) o.premise = j.at("premise").get<std::string>();
  o.gold_label = j.at("gold").get<std::string>();
  o.original_text = j.at("original").get<std::string>();
  o.final_text = j.at("final").get<std::string>();
  o.queries = j.at("queries").get<std::uint64_t>();
  o.detector_queries = j.at("detector_queries").get<std::uint64_t>();
  o.verdict_queries = j.at("verdict_queries").get<std::uint64_t>();
  o.constraints = constraint_report_from_json(j.at("constraints"));
  for (const auto& t : j.at("trace"))
    o.trace.push_back(CandidateEdit{edit_op_from_string(t.at("op").get<std::string>()), t.at("token").get<std::size_t>(),
                                    t.at("pos").get<std::size_t>(), t.at("rep").get<std::string>()});
  return o;
}

inline ojson to_json(const MetricsSummary& m) {
  return ojson{{"original_accuracy", m.original_accuracy},
               {"after_attack_accuracy", m.after_attack_accuracy},
               {"attack_success_rate", m.attack_success_rate},
               {"avg_queries", m.avg_queries},
               {"total", m.total},
               {"attempted", m.attempted},
               {"successes", m.successes}};
}

inline MetricsSummary metrics_from_json(const ojson& j) {
  MetricsSummary m;
  m.original_accuracy = j.at("original_accuracy").get<double>();
  m.after_attack_accuracy = j.at("after_attack_accuracy").get<double>();
  m.attack_success_rate = j.at("attack_success_rate").get<double>();
  m.avg_queries = j.at("avg_queries").get<double>();
  m.total = j.at("total").get<std::uint64_t>();
  m.attempted = j.at("attempted").get<std::uint64_t>();
  m.successes = j.at("successes").get<std::uint64_t>();
  return m;
}

inline ojson to_json(const ExperimentRecord& r) {
  ojson j;
  j["version"] = kRecordFormatVersion;
  j["name"] = r.name;
  j["config_digest"] = r.config_digest;
  j["seed"] = r.seed;
  j["metrics"] = to_json(r.metrics);
  ojson per = ojson::array();
  for (const auto& o : r.per_example) per.push_back(to_json(o));
  j["per_example"] = std::move(per);
  return j;
}

inline void check_version(const ojson& j, const std::string& where) {
  if (!j.contains("version") || !j.at("version").is_number_integer())
    throw IncompatibleVersion(where + ": missing version field");
  const int v = j.at("version").get<int>();
  if (v != kRecordFormatVersion)
    throw IncompatibleVersion(where + ": record format version " + std::to_string(v) + " is incompatible with " +
                              std::to_string(kRecordFormatVersion));
}

inline ExperimentRecord record_from_json(const ojson& j) {
  check_version(j, "record");
  ExperimentRecord r;
  r.name = j.at("name").get<std::string>();
  r.config_digest = j.at("config_digest").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.metrics = metrics_from_json(j.at("metrics"));
  for (const auto& o : j.at("per_example")) r.per_example.push_back(outcome_from_json(o));
  return r;
}

// Record files are line-delimited JSON: a header object followed by one
// object per record, each carrying a leading "version" field.
inline std::string serialize_records(const std::vector<ExperimentRecord>& records) {
  std::string out = ojson{{"version", kRecordFormatVersion}, {"kind", "textshield-records"}, {"count", records.size()}}.dump();
  out.push_back('\n');
  for (const auto& r : records) {
    out += to_json(r).dump();
    out.push_back('\n');
  }
  return out;
}

inline void write_records(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write records to " + path.string());
  out << serialize_records(records);
}

inline std::vector<ExperimentRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open records file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + ": empty records file (missing header)");
  ojson header;
  try {
    header = ojson::parse(line);
  } catch (const ojson::exception& e) {
    throw Error(path.string() + ": malformed header: " + e.what());
  }
  check_version(header, path.string() + ":1");
  std::vector<ExperimentRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const ojson::exception& e) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    check_version(j, path.string() + ":" + std::to_string(lineno));
    records.push_back(record_from_json(j));
  }
  return records;
}

}  // namespace textshield

#endif  // TEXTSHIELD_RECORDS_HPP_
