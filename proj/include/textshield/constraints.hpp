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

#ifndef TEXTSHIELD_CONSTRAINTS_HPP_
#define TEXTSHIELD_CONSTRAINTS_HPP_

#include <cmath>
#include <memory>
#include <optional>
#include <string>

#include "textshield/distance.hpp"
#include "textshield/language_model.hpp"
#include "textshield/semantic.hpp"
#include "textshield/types.hpp"

namespace textshield {

// Degree-of-anomaly provider, implemented by the detector module (and by
// scripted scorers in tests).
class AnomalyScorer {
 public:
  virtual ~AnomalyScorer() = default;
  virtual double degree(const Query& q) const = 0;
};

namespace metric {
inline constexpr const char* kSemanticSimilarity = "semantic_similarity";
inline constexpr const char* kPerturbationRate = "perturbation_rate";
inline constexpr const char* kGrammarIncrease = "grammar_error_increase";
inline constexpr const char* kLevenshtein = "levenshtein";
inline constexpr const char* kDegreeOfAnomaly = "degree_of_anomaly";
}  // namespace metric

// Perceptual-difference thresholds. An unset threshold disables its metric.
// Comparison directions: similarity must exceed its floor, perturbation rate
// and anomaly degree must stay strictly below their ceilings, grammar
// increase and Levenshtein distance may reach theirs.
struct ConstraintSet {
  std::optional<double> min_semantic_similarity;
  std::optional<double> max_perturbation_rate;
  std::optional<int> max_grammar_error_increase;
  std::optional<std::size_t> max_levenshtein;
  std::optional<double> max_degree_of_anomaly;

  std::shared_ptr<const SemanticEncoder> encoder;
  std::shared_ptr<const GrammarChecker> grammar;
  std::shared_ptr<const AnomalyScorer> detector;

  static constexpr double kDefaultSemanticSimilarity = 0.40;
  static constexpr double kDefaultPerturbationRate = 0.20;
  static constexpr int kDefaultGrammarIncrease = 0;
  static constexpr std::size_t kDefaultLevenshtein = 30;
  static constexpr double kDefaultAnomalyThreshold = 0.5;

  static ConstraintSet char_profile(std::size_t max_edits = kDefaultLevenshtein) {
    ConstraintSet s;
    s.max_levenshtein = max_edits;
    return s;
  }
  static ConstraintSet word_profile(std::shared_ptr<const SemanticEncoder> enc,
                                    std::shared_ptr<const GrammarChecker> grammar) {
    ConstraintSet s;
    s.min_semantic_similarity = kDefaultSemanticSimilarity;
    s.max_perturbation_rate = kDefaultPerturbationRate;
    s.max_grammar_error_increase = kDefaultGrammarIncrease;
    s.encoder = std::move(enc);
    s.grammar = std::move(grammar);
    return s;
  }
  static ConstraintSet sentence_profile(std::shared_ptr<const SemanticEncoder> enc) {
    ConstraintSet s;
    s.min_semantic_similarity = kDefaultSemanticSimilarity;
    s.encoder = std::move(enc);
    return s;
  }

  ConstraintSet with_anomaly(std::shared_ptr<const AnomalyScorer> det,
                             double threshold = kDefaultAnomalyThreshold) const {
    ConstraintSet s = *this;
    s.detector = std::move(det);
    s.max_degree_of_anomaly = threshold;
    s.validate();
    return s;
  }

  bool anomaly_enabled() const { return max_degree_of_anomaly.has_value(); }

  void validate() const {
    auto finite = [](std::optional<double> v) { return !v || std::isfinite(*v); };
    if (!finite(min_semantic_similarity) || !finite(max_perturbation_rate) || !finite(max_degree_of_anomaly))
      throw Error("constraint thresholds must be finite");
    if (max_degree_of_anomaly && !detector) throw Error("anomaly constraint enabled without a detector");
  }
};

enum class CheckScope { all, without_anomaly };

// Measures every enabled metric between the original example and the
// candidate text. Hooks that are missing or fail produce skipped entries.
// `detector_calls` (when given) is incremented per anomaly-degree lookup.
inline ConstraintReport check(const ConstraintSet& set, const TextExample& original, const std::string& candidate,
                              CheckScope scope = CheckScope::all, std::uint64_t* detector_calls = nullptr) {
  ConstraintReport r;
  if (set.min_semantic_similarity) {
    MetricEntry e{metric::kSemanticSimilarity, std::nullopt, *set.min_semantic_similarity, true, false};
    if (set.encoder) {
      e.value = semantic_similarity(*set.encoder, original.text, candidate);
      e.passed = *e.value > e.threshold;
    } else {
      e.skipped = true;
    }
    r.entries.push_back(std::move(e));
  }
  if (set.max_perturbation_rate) {
    MetricEntry e{metric::kPerturbationRate, std::nullopt, *set.max_perturbation_rate, true, false};
    try {
      e.value = perturbation_rate(original.text, candidate);
      e.passed = *e.value < e.threshold;
    } catch (const Error&) {
      e.passed = false;  // not a substitution edit
    }
    r.entries.push_back(std::move(e));
  }
  if (set.max_grammar_error_increase) {
    MetricEntry e{metric::kGrammarIncrease, std::nullopt, static_cast<double>(*set.max_grammar_error_increase), true,
                  false};
    if (auto inc = grammar_error_increase(set.grammar.get(), original.text, candidate)) {
      e.value = *inc;
      e.passed = *inc <= *set.max_grammar_error_increase;
    } else {
      e.skipped = true;
    }
    r.entries.push_back(std::move(e));
  }
  if (set.max_levenshtein) {
    MetricEntry e{metric::kLevenshtein, std::nullopt, static_cast<double>(*set.max_levenshtein), true, false};
    const auto d = levenshtein(original.text, candidate);
    e.value = static_cast<double>(d);
    e.passed = d <= *set.max_levenshtein;
    r.entries.push_back(std::move(e));
  }
  if (set.max_degree_of_anomaly && scope == CheckScope::all) {
    MetricEntry e{metric::kDegreeOfAnomaly, std::nullopt, *set.max_degree_of_anomaly, true, false};
    if (!set.detector) throw Error("anomaly constraint enabled without a detector");
    if (detector_calls) ++*detector_calls;
    e.value = set.detector->degree(Query{original.premise, candidate});
    e.passed = *e.value < e.threshold;
    r.entries.push_back(std::move(e));
  }
  return r;
}

}  // namespace textshield

#endif  // TEXTSHIELD_CONSTRAINTS_HPP_
