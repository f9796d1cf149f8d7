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

#ifndef TEXTSHIELD_TYPES_HPP_
#define TEXTSHIELD_TYPES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "textshield/text.hpp"

namespace textshield {

struct TextExample {
  std::string id;
  std::optional<std::string> premise;  // NLI only; never edited by attacks
  std::string text;                    // the attackable field
  std::string gold_label;

  bool operator==(const TextExample&) const = default;
};

enum class Split { train, test };

inline const char* to_string(Split s) { return s == Split::train ? "train" : "test"; }

struct Dataset {
  std::string name;
  Split split = Split::train;
  std::vector<std::string> label_set;
  std::vector<TextExample> examples;

  std::size_t label_index(const std::string& label) const {
    auto it = std::find(label_set.begin(), label_set.end(), label);
    if (it == label_set.end()) throw Error("label '" + label + "' not in label set of " + name);
    return static_cast<std::size_t>(it - label_set.begin());
  }
  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }

  // Throws when the dataset invariants do not hold.
  void validate() const {
    std::unordered_set<std::string> ids;
    for (const auto& ex : examples) {
      if (!ids.insert(ex.id).second) throw Error("duplicate example id '" + ex.id + "'");
      if (trim(ex.text).empty()) throw Error("example '" + ex.id + "' has empty text");
      label_index(ex.gold_label);
    }
  }
};

// Per-label probabilities in label_set order.
using ScoreVector = std::vector<double>;

inline std::size_t argmax(const ScoreVector& s) {
  return static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
}

// One classifier input. For NLI the premise is carried verbatim.
struct Query {
  std::optional<std::string> premise;
  std::string text;
};

inline Query query_of(const TextExample& ex) { return Query{ex.premise, ex.text}; }
inline Query query_of(const TextExample& ex, std::string text) { return Query{ex.premise, std::move(text)}; }

// ---------------------------------------------------------------------------
// Constraint reports

struct MetricEntry {
  std::string name;
  std::optional<double> value;  // empty when the hook was unavailable
  double threshold = 0.0;
  bool passed = true;
  bool skipped = false;

  bool operator==(const MetricEntry&) const = default;
};

struct ConstraintReport {
  std::vector<MetricEntry> entries;

  bool passed() const {
    return std::all_of(entries.begin(), entries.end(), [](const MetricEntry& e) { return e.skipped || e.passed; });
  }
  const MetricEntry* find(const std::string& name) const {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }
  bool operator==(const ConstraintReport&) const = default;
};

// ---------------------------------------------------------------------------
// Attack traces

enum class EditOp { substitute_char, insert_char, delete_char, swap_adjacent, substitute_word, replace_text };

inline const char* to_string(EditOp op) {
  switch (op) {
    case EditOp::substitute_char: return "substitute_char";
    case EditOp::insert_char: return "insert_char";
    case EditOp::delete_char: return "delete_char";
    case EditOp::swap_adjacent: return "swap_adjacent";
    case EditOp::substitute_word: return "substitute_word";
    case EditOp::replace_text: return "replace_text";
  }
  return "?";
}

inline EditOp edit_op_from_string(const std::string& s) {
  for (auto op : {EditOp::substitute_char, EditOp::insert_char, EditOp::delete_char, EditOp::swap_adjacent,
                  EditOp::substitute_word, EditOp::replace_text})
    if (s == to_string(op)) return op;
  throw Error("unknown edit op '" + s + "'");
}

struct CandidateEdit {
  EditOp op = EditOp::substitute_word;
  std::size_t token = 0;     // token index the edit applies to
  std::size_t position = 0;  // character offset inside the token (char ops)
  std::string replacement;   // new char, word, or whole text

  bool operator==(const CandidateEdit&) const = default;
};

// Applies one edit to a token sequence in place.
inline void apply_edit(Tokens& tokens, const CandidateEdit& e) {
  if (e.op == EditOp::replace_text) {
    tokens = tokenize(e.replacement);
    return;
  }
  if (e.token >= tokens.size()) throw Error("edit token index out of range");
  std::string& w = tokens[e.token];
  switch (e.op) {
    case EditOp::substitute_word: w = e.replacement; break;
    case EditOp::substitute_char:
      if (e.position >= w.size()) throw Error("substitute position out of range");
      w.replace(e.position, 1, e.replacement);
      break;
    case EditOp::insert_char:
      if (e.position > w.size()) throw Error("insert position out of range");
      w.insert(e.position, e.replacement);
      break;
    case EditOp::delete_char:
      if (e.position >= w.size()) throw Error("delete position out of range");
      w.erase(e.position, 1);
      break;
    case EditOp::swap_adjacent:
      if (e.position + 1 >= w.size()) throw Error("swap position out of range");
      std::swap(w[e.position], w[e.position + 1]);
      break;
    case EditOp::replace_text: break;
  }
}

inline std::string replay_trace(const std::string& original, const std::vector<CandidateEdit>& trace) {
  Tokens tokens = tokenize(original);
  for (const auto& e : trace) apply_edit(tokens, e);
  return detokenize(tokens);
}

enum class AttackStatus { success, failed, skipped_wrong_prediction, skipped_unavailable };

inline const char* to_string(AttackStatus s) {
  switch (s) {
    case AttackStatus::success: return "success";
    case AttackStatus::failed: return "failed";
    case AttackStatus::skipped_wrong_prediction: return "skipped_wrong_prediction";
    case AttackStatus::skipped_unavailable: return "skipped_unavailable";
  }
  return "?";
}

inline AttackStatus attack_status_from_string(const std::string& s) {
  for (auto st : {AttackStatus::success, AttackStatus::failed, AttackStatus::skipped_wrong_prediction,
                  AttackStatus::skipped_unavailable})
    if (s == to_string(st)) return st;
  throw Error("unknown attack status '" + s + "'");
}

struct AttackOutcome {
  std::string example_id;
  AttackStatus status = AttackStatus::failed;
  std::optional<std::string> premise;
  std::string gold_label;
  std::string original_text;
  std::string final_text;
  std::uint64_t queries = 0;           // victim queries, including the initial prediction
  std::uint64_t detector_queries = 0;  // anomaly-constraint checks, reported separately
  std::uint64_t verdict_queries = 0;   // fresh-draw verdicts on randomized endpoints
  ConstraintReport constraints;
  std::vector<CandidateEdit> trace;

  bool attempted() const {
    return status == AttackStatus::success || status == AttackStatus::failed;
  }
  bool operator==(const AttackOutcome&) const = default;
};

// ---------------------------------------------------------------------------
// Experiment records

struct MetricsSummary {
  double original_accuracy = 0.0;
  double after_attack_accuracy = 0.0;
  double attack_success_rate = 0.0;
  double avg_queries = 0.0;
  std::uint64_t total = 0;
  std::uint64_t attempted = 0;
  std::uint64_t successes = 0;

  bool operator==(const MetricsSummary&) const = default;
};

// Folds per-example outcomes into the summary. Examples the victim already
// got wrong count as errors in both accuracies and are excluded from the
// success-rate denominator. Queries of every outcome are summed and divided
// by the number of attempted examples.
inline MetricsSummary compute_metrics(const std::vector<AttackOutcome>& outcomes) {
  MetricsSummary m;
  m.total = outcomes.size();
  std::uint64_t initially_correct = 0, queries = 0;
  for (const auto& o : outcomes) {
    queries += o.queries;
    if (o.status != AttackStatus::skipped_wrong_prediction) ++initially_correct;
    if (o.attempted()) ++m.attempted;
    if (o.status == AttackStatus::success) ++m.successes;
  }
  if (m.total) {
    const double n = static_cast<double>(m.total);
    m.original_accuracy = static_cast<double>(initially_correct) / n;
    m.after_attack_accuracy = static_cast<double>(initially_correct - m.successes) / n;
  }
  if (m.attempted) {
    m.attack_success_rate = static_cast<double>(m.successes) / static_cast<double>(m.attempted);
    m.avg_queries = static_cast<double>(queries) / static_cast<double>(m.attempted);
  }
  return m;
}

struct ExperimentRecord {
  std::string name;  // e.g. "undefended/char_edit"
  std::string config_digest;
  std::uint64_t seed = 0;
  std::vector<AttackOutcome> per_example;
  MetricsSummary metrics;

  bool consistent() const { return compute_metrics(per_example) == metrics; }
  bool operator==(const ExperimentRecord&) const = default;
};

}  // namespace textshield

#endif  // TEXTSHIELD_TYPES_HPP_
