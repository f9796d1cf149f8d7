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

#ifndef TEXTSHIELD_DEFENSE_HPP_
#define TEXTSHIELD_DEFENSE_HPP_

#include <atomic>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "textshield/attacks.hpp"
#include "textshield/constraints.hpp"
#include "textshield/endpoint.hpp"
#include "textshield/transforms.hpp"

namespace textshield {

enum class DefenseEvalMode { after_attack, during_attack };

struct DefenseConfig {
  double threshold = 0.5;
  bool gate = true;        // false: randomize every query
  bool fresh_draw = true;  // false: one draw per distinct text
  OutputMode output_mode = OutputMode::score;
  std::uint64_t seed = 0;
  bool warn_on_mismatch = true;  // warn when the classifier's augmentation differs from the transform
};

// Detector-gated randomization in front of a classifier endpoint. Inputs the
// detector scores below the threshold reach the classifier unmodified.
class DefendedEndpoint : public Endpoint {
 public:
  DefendedEndpoint(std::shared_ptr<Endpoint> classifier, std::shared_ptr<const AnomalyScorer> detector,
                   TextTransform transform, std::string transform_id, DefenseConfig config)
      : classifier_(std::move(classifier)),
        detector_(std::move(detector)),
        transform_(std::move(transform)),
        transform_id_(std::move(transform_id)),
        config_(config) {
    if (!classifier_) throw Error("defended endpoint needs a classifier");
    if (config_.gate && !detector_) throw Error("gated defense needs a detector");
    if (!(config_.threshold > 0.0 && config_.threshold < 1.0)) throw Error("defense threshold must be in (0, 1)");
    if (auto* ce = dynamic_cast<ClassifierEndpoint*>(classifier_.get()); ce && config_.warn_on_mismatch) {
      const auto& aug = ce->model().config().augment_transform;
      if (aug != transform_id_)
        log_warning("classifier was trained with augmentation '" + (aug.empty() ? std::string("none") : aug) +
                    "' but the defense randomizes with '" + transform_id_ + "'");
    }
  }

  ScoreVector query(const Query& q) override {
    count_.fetch_add(1, std::memory_order_relaxed);
    bool flagged = true;
    if (config_.gate) {
      detector_calls_.fetch_add(1, std::memory_order_relaxed);
      flagged = detector_->degree(q) >= config_.threshold;
    }
    ScoreVector s;
    if (!flagged) {
      s = classifier_->query(q);
    } else {
      RngStream rng = draw_stream(q.text);
      std::string t = transform_(q.text, rng);
      if (trim(t).empty()) t = q.text;
      flagged_.fetch_add(1, std::memory_order_relaxed);
      s = classifier_->query(Query{q.premise, std::move(t)});
    }
    return config_.output_mode == OutputMode::score ? s : one_hot(s.size(), argmax(s));
  }

  std::uint64_t query_count() const override { return count_.load(std::memory_order_relaxed); }
  const std::vector<std::string>& label_set() const override { return classifier_->label_set(); }
  bool deterministic() const override { return !config_.fresh_draw; }
  void begin_example(std::uint64_t index) override {
    std::lock_guard lock(mu_);
    example_ = index;
    draw_ = 0;
  }

  std::uint64_t detector_calls() const { return detector_calls_.load(std::memory_order_relaxed); }
  std::uint64_t randomized_calls() const { return flagged_.load(std::memory_order_relaxed); }
  const DefenseConfig& config() const { return config_; }
  const std::string& transform_id() const { return transform_id_; }

 private:
  // Fresh mode derives each draw from (example, draw counter) so concurrent
  // callers never share one; memoized mode keys the draw by the text.
  RngStream draw_stream(const std::string& text) {
    const RngStream root(config_.seed, {fnv1a64("defense")});
    if (!config_.fresh_draw) return root.child(fnv1a64(text));
    std::lock_guard lock(mu_);
    return root.child({example_, draw_++});
  }

  std::shared_ptr<Endpoint> classifier_;
  std::shared_ptr<const AnomalyScorer> detector_;
  TextTransform transform_;
  std::string transform_id_;
  DefenseConfig config_;
  std::mutex mu_;
  std::uint64_t example_ = 0, draw_ = 0;
  std::atomic<std::uint64_t> count_{0}, detector_calls_{0}, flagged_{0};
};

inline std::shared_ptr<DefendedEndpoint> wrap(std::shared_ptr<Endpoint> classifier,
                                              std::shared_ptr<const AnomalyScorer> detector,
                                              const TransformConfig& transform, DefenseConfig config = {}) {
  const Transformer t(transform);
  return std::make_shared<DefendedEndpoint>(std::move(classifier), std::move(detector), t.as_function(),
                                            to_string(transform.kind), config);
}

struct AfterAttackStats {
  std::uint64_t total = 0;
  std::uint64_t successful = 0;
  std::uint64_t restored = 0;
  double restored_fraction = 0.0;        // restored / successful
  double baseline_accuracy = 0.0;        // after-attack accuracy without randomization
  double after_attack_accuracy = 0.0;    // with one randomization draw per adversarial text
  std::vector<std::string> restored_ids;
};

// One transform draw per successful adversarial text, re-queried on
// `classifier`. The returned record keeps every outcome; a success whose
// randomized text is classified correctly becomes failed, and the draw is
// appended to its trace.
inline ExperimentRecord randomize_after_attack(const ExperimentRecord& undefended, const TextTransform& transform,
                                               Endpoint& classifier, std::uint64_t seed, std::string name = {}) {
  ExperimentRecord rec;
  rec.name = name.empty() ? "after/" + undefended.name : std::move(name);
  rec.config_digest = undefended.config_digest;
  rec.seed = seed;
  const RngStream root(seed, {fnv1a64("after-attack")});
  const auto& labels = classifier.label_set();
  for (std::size_t i = 0; i < undefended.per_example.size(); ++i) {
    AttackOutcome o = undefended.per_example[i];
    if (o.status == AttackStatus::success) {
      RngStream rng = root.child(i);
      std::string t = transform(o.final_text, rng);
      if (trim(t).empty()) t = o.final_text;
      t = detokenize(tokenize(t));
      if (t != o.final_text) o.trace.push_back(CandidateEdit{EditOp::replace_text, 0, 0, t});
      o.final_text = t;
      const auto label = classifier.query_label(Query{o.premise, t});
      if (label < labels.size() && labels[label] == o.gold_label) o.status = AttackStatus::failed;
    }
    rec.per_example.push_back(std::move(o));
  }
  rec.metrics = compute_metrics(rec.per_example);
  return rec;
}

inline AfterAttackStats after_attack_stats(const ExperimentRecord& undefended, const ExperimentRecord& randomized) {
  AfterAttackStats st;
  st.total = undefended.per_example.size();
  st.baseline_accuracy = compute_metrics(undefended.per_example).after_attack_accuracy;
  for (std::size_t i = 0; i < st.total; ++i) {
    if (undefended.per_example[i].status != AttackStatus::success) continue;
    ++st.successful;
    if (randomized.per_example.at(i).status != AttackStatus::success) {
      ++st.restored;
      st.restored_ids.push_back(undefended.per_example[i].example_id);
    }
  }
  if (st.successful) st.restored_fraction = static_cast<double>(st.restored) / static_cast<double>(st.successful);
  st.after_attack_accuracy = compute_metrics(randomized.per_example).after_attack_accuracy;
  return st;
}

inline AfterAttackStats evaluate_after_attack(const std::vector<AttackOutcome>& outcomes, const TextTransform& transform,
                                              Endpoint& classifier, std::uint64_t seed) {
  ExperimentRecord base;
  base.per_example = outcomes;
  base.metrics = compute_metrics(outcomes);
  return after_attack_stats(base, randomize_after_attack(base, transform, classifier, seed));
}

// The attack protocol run against a defended endpoint; success verdicts use
// fresh draws of the defended endpoint (RunOptions::verdict_m).
inline ExperimentRecord evaluate_during_attack(const Attack& attack, DefendedEndpoint& defended, const Dataset& dataset,
                                               std::uint64_t seed, RunOptions options = {}) {
  if (options.name.empty()) options.name = "during/" + attack.id() + "/" + defended.transform_id();
  return run_attack(attack, defended, dataset, seed, options);
}

}  // namespace textshield

#endif  // TEXTSHIELD_DEFENSE_HPP_
