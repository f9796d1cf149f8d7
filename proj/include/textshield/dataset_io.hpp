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

#ifndef TEXTSHIELD_DATASET_IO_HPP_
#define TEXTSHIELD_DATASET_IO_HPP_

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "textshield/types.hpp"

namespace textshield {

enum class DatasetFormat { tsv, jsonl };

// Dataset files:
//   TSV   `text<TAB>label` or `premise<TAB>hypothesis<TAB>label`, one example
//         per line. An optional first line `#labels<TAB>a,b,c` declares the
//         label set; otherwise labels are collected in order of appearance.
//   JSONL {"id": ..., "premise": ..., "text": ..., "label": ...} per line.
// The split is taken from the file stem ("...test..." means test).
inline Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format = DatasetFormat::tsv,
                            std::optional<Split> split_hint = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file " + path.string());
  Dataset ds;
  ds.name = path.stem().string();
  ds.split = split_hint.value_or(ds.name.find("test") != std::string::npos ? Split::test : Split::train);
  bool declared = false;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw Error(path.string() + ":" + std::to_string(lineno) + ": " + what);
  };
  auto add_label = [&](const std::string& label) {
    if (label.empty()) fail("empty label");
    if (std::find(ds.label_set.begin(), ds.label_set.end(), label) != ds.label_set.end()) return;
    if (declared) fail("unknown label '" + label + "'");
    ds.label_set.push_back(label);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (lineno == 1 && line.rfind("#labels", 0) == 0) {
      auto parts = textshield::split(line, '\t');
      if (parts.size() != 2) fail("malformed label header");
      for (auto& l : textshield::split(parts[1], ',')) {
        auto t = trim(l);
        if (!t.empty()) ds.label_set.push_back(t);
      }
      declared = true;
      continue;
    }
    TextExample ex;
    if (format == DatasetFormat::tsv) {
      auto cols = textshield::split(line, '\t');
      if (cols.size() == 2) {
        ex.text = cols[0];
        ex.gold_label = trim(cols[1]);
      } else if (cols.size() == 3) {
        ex.premise = cols[0];
        ex.text = cols[1];
        ex.gold_label = trim(cols[2]);
      } else {
        fail("expected 2 or 3 tab-separated columns, got " + std::to_string(cols.size()));
      }
      ex.id = ds.name + "-" + std::to_string(ds.examples.size());
    } else {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        fail(std::string("malformed JSON: ") + e.what());
      }
      if (!j.contains("text") || !j.contains("label")) fail("missing text or label field");
      ex.text = j.at("text").get<std::string>();
      ex.gold_label = j.at("label").get<std::string>();
      if (j.contains("premise") && !j.at("premise").is_null()) ex.premise = j.at("premise").get<std::string>();
      ex.id = j.contains("id") ? j.at("id").get<std::string>() : ds.name + "-" + std::to_string(ds.examples.size());
    }
    if (trim(ex.text).empty()) fail("empty text");
    add_label(ex.gold_label);
    ds.examples.push_back(std::move(ex));
  }
  ds.validate();
  return ds;
}

inline void write_dataset_tsv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write dataset file " + path.string());
  out << "#labels\t";
  for (std::size_t i = 0; i < ds.label_set.size(); ++i) out << (i ? "," : "") << ds.label_set[i];
  out << '\n';
  for (const auto& ex : ds.examples) {
    if (ex.premise) out << *ex.premise << '\t';
    out << ex.text << '\t' << ex.gold_label << '\n';
  }
}

}  // namespace textshield

#endif  // TEXTSHIELD_DATASET_IO_HPP_
