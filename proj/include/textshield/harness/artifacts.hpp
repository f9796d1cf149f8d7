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

#ifndef TEXTSHIELD_HARNESS_ARTIFACTS_HPP_
#define TEXTSHIELD_HARNESS_ARTIFACTS_HPP_

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "textshield/harness/analysis.hpp"
#include "textshield/records.hpp"

namespace textshield::harness {

// Per-example detector scores on one labeled evaluation set.
struct DetectionScores {
  struct Entry {
    std::string id;
    int label = 0;  // 1 = adversarial
    double degree = 0.0;
    bool operator==(const Entry&) const = default;
  };
  std::string name;       // e.g. "specific/char_edit"
  std::string detector;   // detector description
  double threshold = 0.5;
  std::vector<Entry> entries;

  bool operator==(const DetectionScores&) const = default;
};

inline DetectionScores score_texts(const DetectorModel& model, const std::string& name, const std::string& detector,
                                   const LabeledTexts& eval, const std::vector<std::string>& ids) {
  DetectionScores s;
  s.name = name;
  s.detector = detector;
  s.threshold = model.threshold();
  for (std::size_t i = 0; i < eval.size(); ++i)
    s.entries.push_back({ids.at(i), eval.labels[i], model.degree(eval.texts[i])});
  return s;
}

// Same confusion-matrix definitions as evaluate_detector.
inline DetectorMetrics detection_metrics(const DetectionScores& s) {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (const auto& e : s.entries) {
    const bool flag = e.degree >= s.threshold;
    if (e.label) (flag ? tp : fn)++;
    else (flag ? fp : tn)++;
  }
  if (tp + fn == 0 || tn + fp == 0) throw Error("detection set '" + s.name + "' needs both classes");
  DetectorMetrics m;
  m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(s.entries.size());
  m.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

struct ProjectionPoints {
  std::string name;
  std::vector<ScatterPoint> points;
};

namespace detail {

inline void write_lines(const std::filesystem::path& path, const std::vector<ojson>& lines) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& l : lines) out << l.dump() << '\n';
}

inline std::vector<ojson> read_lines(const std::filesystem::path& path, const std::string& kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<ojson> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(ojson::parse(line));
    } catch (const ojson::exception& e) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (out.empty()) throw Error(path.string() + ": empty file");
  check_version(out.front(), path.string());
  if (out.front().value("kind", "") != kind) throw Error(path.string() + ": expected kind " + kind);
  return out;
}

}  // namespace detail

// One file holds many score sets: a header line, then one line per set.
inline void write_detection_scores(const std::vector<DetectionScores>& sets, const std::filesystem::path& path) {
  std::vector<ojson> lines;
  ojson header;
  header["version"] = kRecordFormatVersion;
  header["kind"] = "textshield-detection";
  header["count"] = sets.size();
  lines.push_back(header);
  for (const auto& s : sets) {
    ojson j;
    j["version"] = kRecordFormatVersion;
    j["name"] = s.name;
    j["detector"] = s.detector;
    j["threshold"] = s.threshold;
    ojson entries = ojson::array();
    for (const auto& e : s.entries) entries.push_back(ojson::array({e.id, e.label, e.degree}));
    j["entries"] = entries;
    lines.push_back(std::move(j));
  }
  detail::write_lines(path, lines);
}

inline std::vector<DetectionScores> read_detection_scores(const std::filesystem::path& path) {
  const auto lines = detail::read_lines(path, "textshield-detection");
  std::vector<DetectionScores> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& j = lines[i];
    check_version(j, path.string());
    DetectionScores s;
    s.name = j.at("name");
    s.detector = j.at("detector");
    s.threshold = j.at("threshold");
    for (const auto& e : j.at("entries")) s.entries.push_back({e.at(0), e.at(1), e.at(2)});
    out.push_back(std::move(s));
  }
  return out;
}

inline void write_projection(const std::vector<ProjectionPoints>& sets, const std::filesystem::path& path) {
  std::vector<ojson> lines;
  ojson header;
  header["version"] = kRecordFormatVersion;
  header["kind"] = "textshield-projection";
  header["count"] = sets.size();
  lines.push_back(header);
  for (const auto& s : sets) {
    ojson j;
    j["version"] = kRecordFormatVersion;
    j["name"] = s.name;
    ojson pts = ojson::array();
    for (const auto& p : s.points) pts.push_back(ojson::array({p.x, p.y, p.label}));
    j["points"] = pts;
    lines.push_back(std::move(j));
  }
  detail::write_lines(path, lines);
}

inline std::vector<ProjectionPoints> read_projection(const std::filesystem::path& path) {
  const auto lines = detail::read_lines(path, "textshield-projection");
  std::vector<ProjectionPoints> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    ProjectionPoints p;
    p.name = lines[i].at("name");
    for (const auto& e : lines[i].at("points")) p.points.push_back({e.at(0), e.at(1), e.at(2)});
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace textshield::harness

#endif  // TEXTSHIELD_HARNESS_ARTIFACTS_HPP_
