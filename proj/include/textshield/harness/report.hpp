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

#ifndef TEXTSHIELD_HARNESS_REPORT_HPP_
#define TEXTSHIELD_HARNESS_REPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "textshield/attacks.hpp"
#include "textshield/defense.hpp"
#include "textshield/harness/artifacts.hpp"
#include "textshield/records.hpp"
#include "textshield/transforms.hpp"

namespace textshield::harness {

// Missing or empty report inputs; the CLI maps this to a usage error.
class InputError : public Error {
 public:
  using Error::Error;
};

// Everything a report is folded from.
struct ReportInputs {
  std::map<std::string, ExperimentRecord> records;  // by record name
  std::vector<DetectionScores> detection;
  std::vector<ProjectionPoints> projection;

  const ExperimentRecord* find(const std::string& name) const {
    auto it = records.find(name);
    return it == records.end() ? nullptr : &it->second;
  }
  const ExperimentRecord& at(const std::string& name) const {
    if (auto* r = find(name)) return *r;
    throw Error("report: missing record '" + name + "'");
  }
  const DetectionScores* detection_set(const std::string& name) const {
    for (const auto& d : detection)
      if (d.name == name) return &d;
    return nullptr;
  }
};

// Reads records/*.jsonl, detection/*.jsonl and analysis/*.jsonl under `dir`.
// Record files are validated (version, metrics recomputation).
inline ReportInputs load_report_inputs(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir.string());
  auto jsonl_in = [&](const char* sub) {
    std::vector<fs::path> files;
    if (fs::is_directory(dir / sub))
      for (const auto& e : fs::directory_iterator(dir / sub))
        if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    return files;
  };
  ReportInputs in;
  for (const auto& f : jsonl_in("records"))
    for (auto& r : read_records(f)) {
      if (!r.consistent()) throw Error(f.string() + ": metrics of '" + r.name + "' do not match its outcomes");
      const std::string name = r.name;
      if (!in.records.emplace(name, std::move(r)).second) throw Error("duplicate record name '" + name + "'");
    }
  for (const auto& f : jsonl_in("detection"))
    for (auto& d : read_detection_scores(f)) in.detection.push_back(std::move(d));
  for (const auto& f : jsonl_in("analysis"))
    for (auto& p : read_projection(f)) in.projection.push_back(std::move(p));
  if (in.records.empty() && in.detection.empty()) throw InputError("no record files under " + dir.string());
  return in;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
        if (!quote) {
          out << cells[i];
          continue;
        }
        out << '"';
        for (char c : cells[i]) out << (c == '"' ? "\"\"" : std::string(1, c));
        out << '"';
      }
      out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out.str();
  }
};

// Percentages with one decimal; raw values
// stay available in the record files.
inline std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct MeanSpread {
  double mean = 0.0, sd = 0.0;
  std::size_t n = 0;
};

// Population standard deviation as the spread.
inline MeanSpread mean_spread(const std::vector<double>& v) {
  MeanSpread m;
  m.n = v.size();
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.sd += (x - m.mean) * (x - m.mean);
  m.sd = std::sqrt(m.sd / static_cast<double>(v.size()));
  return m;
}

// Values of records named prefix + "/r<i>" for i = 0, 1, ... until one is
// missing.
template <typename F>
std::vector<double> over_repeats(const ReportInputs& in, const std::string& prefix, F metric) {
  std::vector<double> out;
  for (std::size_t r = 0;; ++r) {
    const auto* rec = in.find(prefix + "/r" + std::to_string(r));
    if (!rec) break;
    out.push_back(metric(*rec));
  }
  return out;
}

inline std::vector<AttackFamily> families_with(const ReportInputs& in, const std::string& stage) {
  std::vector<AttackFamily> out;
  for (auto f : kAllAttackFamilies)
    if (in.find(stage + "/" + to_string(f)) || in.find(stage + "/" + to_string(f) + "/r0")) out.push_back(f);
  return out;
}

inline double after_acc(const ExperimentRecord& r) { return r.metrics.after_attack_accuracy; }
inline double orig_acc(const ExperimentRecord& r) { return r.metrics.original_accuracy; }

// Detection accuracy/precision/recall/F1 per attack family and detector.
inline Table detection_table(const ReportInputs& in) {
  Table t{{"attack", "detector", "accuracy", "precision", "recall", "f1", "n"}, {}};
  for (const auto& d : in.detection) {
    if (d.name.rfind("specific/", 0) != 0 && d.name.rfind("general/", 0) != 0) continue;
    const auto m = detection_metrics(d);
    const std::string attack = d.name.substr(d.name.find('/') + 1);
    t.rows.push_back({attack, d.detector, pct(m.accuracy), pct(m.precision), pct(m.recall), pct(m.f1),
                      std::to_string(d.entries.size())});
  }
  return t;
}

// True when every success in `sub` is also a success in `super`, matched by
// position.
inline bool successes_subset(const ExperimentRecord& sub, const ExperimentRecord& super) {
  if (sub.per_example.size() != super.per_example.size()) return false;
  for (std::size_t i = 0; i < sub.per_example.size(); ++i)
    if (sub.per_example[i].status == AttackStatus::success && super.per_example[i].status != AttackStatus::success)
      return false;
  return true;
}

// Success rates without and with the anomaly constraint.
inline Table constraint_table(const ReportInputs& in) {
  Table t{{"attack", "success_without_constraint", "success_with_constraint", "ratio", "subset"}, {}};
  for (auto f : families_with(in, "constrained")) {
    const auto& u = in.at(std::string("undefended/") + to_string(f));
    const auto& c = in.at(std::string("constrained/") + to_string(f));
    const bool subset = successes_subset(c, u);
    const double ru = u.metrics.attack_success_rate, rc = c.metrics.attack_success_rate;
    t.rows.push_back({to_string(f), pct(ru), pct(rc), ru > 0 ? num(rc / ru) : "nan", subset ? "true" : "false"});
  }
  return t;
}

// Accuracy grid for randomization after or during attack: rows are the
// no-attack setting, each family, and the family average; columns are no
// randomization and each transform without and with augmentation (mean and
// spread over repeats).
inline Table randomization_table(const ReportInputs& in, const std::string& stage) {
  Table t{{"attack", "no_rand"}, {}};
  for (auto k : kAllTransformKinds)
    for (const char* a : {"noaug", "aug"}) {
      t.header.push_back(std::string(to_string(k)) + "_" + a);
      t.header.push_back(std::string(to_string(k)) + "_" + a + "_sd");
    }
  const auto fams = families_with(in, "undefended");
  if (fams.empty()) return t;

  auto cells = [&](const std::string& row_prefix, bool clean, std::vector<double>* sums) {
    std::vector<std::string> row;
    std::size_t col = 0;
    for (auto k : kAllTransformKinds)
      for (const char* a : {"noaug", "aug"}) {
        const std::string p = row_prefix + "/" + to_string(k) + "/" + a;
        const auto ms = mean_spread(over_repeats(in, p, clean ? orig_acc : after_acc));
        if (sums) (*sums)[col] += ms.mean;
        ++col;
        row.push_back(ms.n ? pct(ms.mean) : "");
        row.push_back(ms.n ? pct(ms.sd) : "");
      }
    return row;
  };

  const double clean_acc = in.at(std::string("undefended/") + to_string(fams.front())).metrics.original_accuracy;
  std::vector<std::string> none{"no_attack", pct(clean_acc)};
  for (auto& c : cells("after/none", true, nullptr)) none.push_back(c);
  t.rows.push_back(none);

  std::vector<double> sums(2 * std::size(kAllTransformKinds), 0.0);
  double base_sum = 0;
  for (auto f : fams) {
    const double base = in.at(std::string("undefended/") + to_string(f)).metrics.after_attack_accuracy;
    base_sum += base;
    std::vector<std::string> row{to_string(f), pct(base)};
    for (auto& c : cells(stage + "/" + to_string(f), false, &sums)) row.push_back(c);
    t.rows.push_back(row);
  }
  const double n = static_cast<double>(fams.size());
  std::vector<std::string> avg{"average", pct(base_sum / n)};
  for (double s : sums) {
    avg.push_back(pct(s / n));
    avg.push_back("");
  }
  t.rows.push_back(avg);
  return t;
}

// Clean and after-attack accuracy without and with the gated framework.
inline Table framework_table(const ReportInputs& in) {
  Table t{{"attack", "orig_without_defense", "adv_without_defense", "orig_with_defense", "orig_with_defense_sd",
           "adv_with_defense", "adv_with_defense_sd"},
          {}};
  const auto clean = mean_spread(over_repeats(in, "framework/clean", orig_acc));
  for (auto f : families_with(in, "framework")) {
    const auto& u = in.at(std::string("undefended/") + to_string(f));
    const auto d = mean_spread(over_repeats(in, std::string("framework/") + to_string(f), after_acc));
    t.rows.push_back({to_string(f), pct(u.metrics.original_accuracy), pct(u.metrics.after_attack_accuracy),
                      pct(clean.mean), pct(clean.sd), pct(d.mean), pct(d.sd)});
  }
  return t;
}

// Defended after-attack accuracy for the original and the EOT attack.
inline Table adaptive_table(const ReportInputs& in) {
  Table t{{"attack", "original_attack", "original_attack_sd", "adaptive_attack", "adaptive_attack_sd"}, {}};
  for (auto f : families_with(in, "adaptive")) {
    const auto o = mean_spread(over_repeats(in, std::string("framework/") + to_string(f), after_acc));
    const auto a = mean_spread(over_repeats(in, std::string("adaptive/") + to_string(f), after_acc));
    t.rows.push_back({to_string(f), pct(o.mean), pct(o.sd), pct(a.mean), pct(a.sd)});
  }
  return t;
}

inline Table learning_curve_table(const ReportInputs& in) {
  Table t{{"attack", "n", "accuracy"}, {}};
  for (const auto& d : in.detection) {
    if (d.name.rfind("curve/", 0) != 0) continue;
    const auto slash = d.name.rfind('/');
    t.rows.push_back({d.name.substr(6, slash - 6), d.name.substr(slash + 1), num(detection_metrics(d).accuracy)});
  }
  return t;
}

inline std::vector<double> degrees(const DetectionScores& d) {
  std::vector<double> v;
  for (const auto& e : d.entries) v.push_back(e.degree);
  return v;
}

inline Table histogram_table(const ReportInputs& in, const std::string& set = "general/mixed") {
  Table t{{"bin_low", "bin_high", "count"}, {}};
  const auto* d = in.detection_set(set);
  if (!d) return t;
  const auto counts = histogram(degrees(*d), 10);
  for (std::size_t b = 0; b < counts.size(); ++b)
    t.rows.push_back({num(b / 10.0), num((b + 1) / 10.0), std::to_string(counts[b])});
  return t;
}

inline Table projection_table(const ReportInputs& in) {
  Table t{{"set", "x", "y", "label"}, {}};
  for (const auto& p : in.projection)
    for (const auto& pt : p.points) t.rows.push_back({p.name, num(pt.x), num(pt.y), pt.label ? "adversarial" : "clean"});
  return t;
}

// Writes every table as CSV into `out_dir`; returns the file names written.
inline std::vector<std::string> write_report(const ReportInputs& in, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::vector<std::pair<std::string, Table>> tables = {
      {"detection.csv", detection_table(in)},
      {"anomaly_constraint.csv", constraint_table(in)},
      {"randomization_after_attack.csv", randomization_table(in, "after")},
      {"randomization_during_attack.csv", randomization_table(in, "during")},
      {"framework.csv", framework_table(in)},
      {"adaptive.csv", adaptive_table(in)},
      {"learning_curve.csv", learning_curve_table(in)},
      {"degree_histogram.csv", histogram_table(in)},
      {"projection.csv", projection_table(in)},
  };
  std::vector<std::string> names;
  for (const auto& [name, table] : tables) {
    std::ofstream out(out_dir / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (out_dir / name).string());
    out << table.csv();
    names.push_back(name);
  }
  return names;
}

// The trend quantities the acceptance checks read, folded from the same
// inputs as the tables. Absent inputs leave fields unset.
struct TrendSummary {
  std::optional<double> specific_char_accuracy, specific_word_accuracy, general_held_out_accuracy;
  std::map<AttackFamily, std::pair<double, double>> constraint_rates;  // (without, with)
  std::map<AttackFamily, bool> constraint_subset;
  std::map<AttackFamily, double> synonym_restored_fraction;  // mean over repeats, clean victim
  std::optional<double> undefended_after_mean, during_after_mean;
  std::optional<double> undefended_clean, framework_clean;
  std::map<AttackFamily, std::pair<double, double>> framework_after;  // (undefended, defended mean)
  std::map<AttackFamily, std::pair<double, double>> adaptive_after;   // (original, adaptive mean)
  std::optional<double> polarized_fraction;
  std::map<std::string, double> curve;  // "char_edit/100" -> accuracy
};

inline TrendSummary summarize_trends(const ReportInputs& in, AttackFamily word_family = AttackFamily::word_synonym,
                                     AttackFamily held_out = AttackFamily::sentence_paraphrase,
                                     TransformKind during_kind = TransformKind::synonym_substitution,
                                     bool during_augmented = false) {
  TrendSummary s;
  auto acc = [&](const std::string& name) -> std::optional<double> {
    if (const auto* d = in.detection_set(name)) return detection_metrics(*d).accuracy;
    return std::nullopt;
  };
  s.specific_char_accuracy = acc("specific/char_edit");
  s.specific_word_accuracy = acc(std::string("specific/") + to_string(word_family));
  s.general_held_out_accuracy = acc(std::string("general/") + to_string(held_out));

  for (auto f : families_with(in, "constrained")) {
    const auto& u = in.at(std::string("undefended/") + to_string(f));
    const auto& c = in.at(std::string("constrained/") + to_string(f));
    s.constraint_rates[f] = {u.metrics.attack_success_rate, c.metrics.attack_success_rate};
    const bool subset = successes_subset(c, u);
    s.constraint_subset[f] = subset;
  }

  const auto undefended = families_with(in, "undefended");
  double base = 0, during = 0;
  std::size_t during_n = 0;
  for (auto f : undefended) {
    const auto& u = in.at(std::string("undefended/") + to_string(f));
    base += u.metrics.after_attack_accuracy;
    const std::string key = std::string(to_string(f)) + "/" + to_string(TransformKind::synonym_substitution) + "/noaug";
    const auto restored = over_repeats(in, "after/" + key, [&](const ExperimentRecord& r) {
      return after_attack_stats(u, r).restored_fraction;
    });
    if (!restored.empty()) s.synonym_restored_fraction[f] = mean_spread(restored).mean;
    const auto d = over_repeats(in,
                                std::string("during/") + to_string(f) + "/" + to_string(during_kind) + "/" +
                                    (during_augmented ? "aug" : "noaug"),
                                after_acc);
    if (!d.empty()) {
      during += mean_spread(d).mean;
      ++during_n;
    }
    const auto fw = over_repeats(in, std::string("framework/") + to_string(f), after_acc);
    if (!fw.empty()) s.framework_after[f] = {u.metrics.after_attack_accuracy, mean_spread(fw).mean};
    const auto ad = over_repeats(in, std::string("adaptive/") + to_string(f), after_acc);
    if (!ad.empty() && !fw.empty()) s.adaptive_after[f] = {mean_spread(fw).mean, mean_spread(ad).mean};
  }
  if (!undefended.empty()) {
    s.undefended_after_mean = base / static_cast<double>(undefended.size());
    s.undefended_clean = in.at(std::string("undefended/") + to_string(undefended.front())).metrics.original_accuracy;
  }
  if (during_n == undefended.size() && during_n) s.during_after_mean = during / static_cast<double>(during_n);
  if (const auto fc = over_repeats(in, "framework/clean", orig_acc); !fc.empty()) s.framework_clean = mean_spread(fc).mean;

  if (const auto* d = in.detection_set("general/mixed")) {
    std::size_t extreme = 0;
    for (const auto& e : d->entries)
      if (e.degree <= 0.1 || e.degree >= 0.9) ++extreme;
    if (!d->entries.empty()) s.polarized_fraction = static_cast<double>(extreme) / static_cast<double>(d->entries.size());
  }
  for (const auto& d : in.detection)
    if (d.name.rfind("curve/", 0) == 0) s.curve[d.name.substr(6)] = detection_metrics(d).accuracy;
  return s;
}

}  // namespace textshield::harness

#endif  // TEXTSHIELD_HARNESS_REPORT_HPP_
