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

#ifndef TEXTSHIELD_HARNESS_PIPELINE_HPP_
#define TEXTSHIELD_HARNESS_PIPELINE_HPP_

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "textshield/attacks.hpp"
#include "textshield/augment.hpp"
#include "textshield/classifier.hpp"
#include "textshield/defense.hpp"
#include "textshield/detector.hpp"
#include "textshield/harness/analysis.hpp"
#include "textshield/harness/artifacts.hpp"
#include "textshield/harness/config.hpp"
#include "textshield/harness/world.hpp"
#include "textshield/records.hpp"

namespace textshield::harness {

namespace fs = std::filesystem;

// Content-addressed store for expensive stage outputs. Without a directory
// every lookup misses and nothing is written.
class StageCache {
 public:
  explicit StageCache(std::optional<fs::path> dir = std::nullopt) : dir_(std::move(dir)) {}

  template <typename T, typename Compute, typename Save, typename Load>
  T get(const std::string& key, Compute&& compute, Save&& save, Load&& load) {
    if (dir_) {
      const fs::path p = *dir_ / key;
      if (fs::exists(p)) {
        try {
          ++hits_;
          return load(p);
        } catch (const std::exception& e) {
          --hits_;
          log_warning("ignoring unreadable cache entry " + p.string() + ": " + e.what());
        }
      }
    }
    T value = compute();
    if (dir_) {
      fs::create_directories(*dir_);
      const fs::path tmp = *dir_ / (key + ".tmp");
      save(value, tmp);
      fs::rename(tmp, *dir_ / key);
    }
    return value;
  }

  std::size_t hits() const { return hits_; }
  const std::optional<fs::path>& dir() const { return dir_; }

 private:
  std::optional<fs::path> dir_;
  std::size_t hits_ = 0;
};

inline std::string world_digest(const World& w) {
  std::uint64_t h = fnv1a64("world");
  auto mix = [&](const std::string& s) { h = fnv1a64(s, h ^ 0x9E3779B97F4A7C15ULL); };
  for (const auto* ds : {&w.train, &w.test})
    for (const auto& ex : ds->examples) {
      mix(ex.id);
      mix(ex.premise.value_or(""));
      mix(ex.text);
      mix(ex.gold_label);
    }
  for (const auto& [word, syns] : w.synonyms->table()) {
    mix(word);
    for (const auto& s : syns) mix(s);
  }
  for (const auto& a : *w.adverbs) mix(a);
  return hex64(h);
}

// Runs every stage of the experiment plan over one world: victims, the
// adversarial pools, detectors, and the attack runs (undefended, under the
// anomaly constraint, randomized after and during attack, the gated
// framework and the adaptive attack). Stage results are memoized.
class Pipeline {
 public:
  Pipeline(World world, PipelineConfig config, std::optional<fs::path> cache_dir = cache_dir_from_env())
      : world_(std::move(world)), config_(std::move(config)), cache_(std::move(cache_dir)) {
    config_.validate();
    digest_ = hex64(fnv1a64(config_.digest() + world_digest(world_)));
  }

  const World& world() const { return world_; }
  const PipelineConfig& config() const { return config_; }
  const std::string& digest() const { return digest_; }
  const StageCache& cache() const { return cache_; }

  std::uint64_t repeat_seed(std::size_t rep) const {
    return RngStream(config_.seed, {fnv1a64("repeat"), rep}).next_u64();
  }

  // ---- victims -------------------------------------------------------------

  std::shared_ptr<const ClassifierModel> victim() {
    if (!victim_) victim_ = train_victim(std::nullopt);
    return victim_;
  }

  std::shared_ptr<const ClassifierModel> augmented_victim(TransformKind kind) {
    auto& slot = augmented_[kind];
    if (!slot) slot = train_victim(kind);
    return slot;
  }

  // ---- adversarial pools ---------------------------------------------------

  // Training and test examples in one dataset; attacks on its first
  // `detector_train_examples` rows train the detectors, the rest supply the
  // evaluation pools.
  const Dataset& pool_source() {
    if (pool_source_.empty()) {
      pool_source_.name = "pool";
      pool_source_.label_set = world_.train.label_set;
      pool_source_.examples = world_.train.examples;
      pool_source_.examples.insert(pool_source_.examples.end(), world_.test.examples.begin(), world_.test.examples.end());
    }
    return pool_source_;
  }

  const ExperimentRecord& pool(AttackFamily f) {
    auto it = pools_.find(f);
    if (it != pools_.end()) return it->second;
    const std::string key = stage_key("pool-" + std::string(to_string(f))) + ".jsonl";
    auto rec = cache_.get<ExperimentRecord>(
        key,
        [&] {
          ClassifierEndpoint ep(victim());
          return run_attack(Attack(attack_spec(f)), ep, pool_source(), config_.seed,
                            {std::string("pool/") + to_string(f), config_.digest(), 1});
        },
        [](const ExperimentRecord& r, const fs::path& p) { write_records({r}, p); },
        [](const fs::path& p) { return read_records(p).at(0); });
    return pools_.emplace(f, std::move(rec)).first->second;
  }

  std::vector<std::string> normal_train_texts() {
    const auto& src = pool_source();
    const std::size_t n = std::min(config_.detector_train_examples, world_.train.size());
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(detokenize(tokenize(src.examples[i].text)));
    return out;
  }

  std::vector<std::string> adversarial_train_texts(AttackFamily f) {
    const auto& rec = pool(f);
    std::vector<std::string> out;
    const std::size_t n = std::min(config_.detector_train_examples, rec.per_example.size());
    for (std::size_t i = 0; i < n; ++i)
      if (rec.per_example[i].status == AttackStatus::success) out.push_back(rec.per_example[i].final_text);
    return out;
  }

  // Successful adversarial texts outside the detector-training prefix, with
  // their example ids, capped at eval_per_class.
  std::vector<std::pair<std::string, std::string>> adversarial_eval(AttackFamily f) {
    const auto& rec = pool(f);
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = config_.detector_train_examples; i < rec.per_example.size(); ++i) {
      const auto& o = rec.per_example[i];
      if (o.status != AttackStatus::success) continue;
      out.emplace_back(o.example_id + "#adv", o.final_text);
      if (out.size() == config_.eval_per_class) break;
    }
    return out;
  }

  std::vector<std::pair<std::string, std::string>> normal_eval() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& ex : world_.test.examples) {
      out.emplace_back(ex.id, detokenize(tokenize(ex.text)));
      if (out.size() == config_.eval_per_class) break;
    }
    return out;
  }

  // Normal test texts plus adversarial texts of `families`, interleaved so
  // each family contributes equally.
  std::pair<LabeledTexts, std::vector<std::string>> eval_set(const std::vector<AttackFamily>& families) {
    LabeledTexts eval;
    std::vector<std::string> ids;
    for (auto& [id, t] : normal_eval()) {
      ids.push_back(id);
      eval.add(t, 0);
    }
    std::vector<std::vector<std::pair<std::string, std::string>>> per;
    for (auto f : families) per.push_back(adversarial_eval(f));
    std::size_t added = 0;
    for (std::size_t k = 0; added < config_.eval_per_class; ++k) {
      bool any = false;
      for (std::size_t fi = 0; fi < per.size() && added < config_.eval_per_class; ++fi) {
        if (k >= per[fi].size()) continue;
        any = true;
        ids.push_back(per[fi][k].first + "/" + to_string(families[fi]));
        eval.add(per[fi][k].second, 1);
        ++added;
      }
      if (!any) break;
    }
    return {eval, ids};
  }

  // ---- detectors -----------------------------------------------------------

  std::shared_ptr<const DetectorEncoder> detector_encoder() {
    if (!encoder_) {
      std::vector<std::string> ref;
      for (const auto& ex : world_.train.examples) ref.push_back(ex.text);
      encoder_ = std::make_shared<DetectorEncoder>(ref, world_.known_word_list(), config_.detector.buckets);
    }
    return encoder_;
  }

  std::shared_ptr<const DetectorModel> specific_detector(AttackFamily f) {
    auto& slot = specific_[f];
    if (!slot) slot = train_detector_on({f}, DetectorMode::specific);
    return slot;
  }

  // Trained on every family except the held-out one.
  std::shared_ptr<const DetectorModel> general_detector() {
    if (!general_) {
      std::vector<AttackFamily> fams;
      for (auto f : kAllAttackFamilies)
        if (f != config_.held_out_family) fams.push_back(f);
      general_ = train_detector_on(fams, DetectorMode::general);
    }
    return general_;
  }

  // Learning-curve points for family `f`: one specific detector per size n
  // trained on n shuffled normal and n adversarial training texts, scored on
  // the family's eval set. The accuracies match learning_curve().
  std::vector<DetectionScores> curve(AttackFamily f) {
    auto normal = normal_train_texts();
    auto adv = adversarial_train_texts(f);
    RngStream rng(config_.seed, {fnv1a64("curve"), fnv1a64(to_string(f))});
    rng.shuffle(normal);
    rng.shuffle(adv);
    const auto [eval, ids] = eval_set({f});
    std::vector<DetectionScores> out;
    for (auto n : config_.curve_sizes) {
      if (n > normal.size() || n > adv.size())
        throw Error("learning curve: pool for " + std::string(to_string(f)) + " smaller than " + std::to_string(n));
      const std::vector<std::string> nn(normal.begin(), normal.begin() + static_cast<std::ptrdiff_t>(n));
      const std::vector<std::string> aa(adv.begin(), adv.begin() + static_cast<std::ptrdiff_t>(n));
      const auto model = train_detector(nn, aa, detector_encoder(), config_.detector);
      out.push_back(score_texts(model, "curve/" + std::string(to_string(f)) + "/" + std::to_string(n), "specific",
                                eval, ids));
    }
    return out;
  }

  // ---- attack runs -----------------------------------------------------------

  AttackSpec attack_spec(AttackFamily f) const {
    AttackSpec s = world_.attack_spec(f);
    s.query_budget = config_.attack_budget;
    return s;
  }

  const Dataset& attack_set() {
    if (attack_set_.empty()) {
      attack_set_ = world_.test;
      if (attack_set_.examples.size() > config_.attack_examples) attack_set_.examples.resize(config_.attack_examples);
    }
    return attack_set_;
  }

  ExperimentRecord undefended(AttackFamily f) {
    ClassifierEndpoint ep(victim());
    return run_attack(Attack(attack_spec(f)), ep, attack_set(), config_.seed,
                      {std::string("undefended/") + to_string(f), config_.digest(), 1});
  }

  ExperimentRecord constrained(AttackFamily f) {
    ClassifierEndpoint ep(victim());
    const Attack a = with_anomaly_constraint(Attack(attack_spec(f)), general_detector(), config_.defense_threshold);
    return run_attack(a, ep, attack_set(), config_.seed,
                      {std::string("constrained/") + to_string(f), config_.digest(), 1});
  }

  // Randomization of the undefended adversarial texts, re-queried on the
  // clean or the augmented victim.
  ExperimentRecord after_attack(const ExperimentRecord& undefended_run, AttackFamily f, TransformKind kind,
                                bool augmented, std::size_t rep) {
    auto ep = ClassifierEndpoint(augmented ? augmented_victim(kind) : victim());
    const Transformer t(world_.transform_config(kind));
    return randomize_after_attack(undefended_run, t.as_function(), ep, repeat_seed(rep),
                                  std::string("after/") + to_string(f) + "/" + to_string(kind) + "/" +
                                      (augmented ? "aug" : "noaug") + "/r" + std::to_string(rep));
  }

  std::shared_ptr<DefendedEndpoint> defended(TransformKind kind, bool gate, std::size_t rep, bool augmented = true) {
    DefenseConfig dc;
    dc.threshold = config_.defense_threshold;
    dc.gate = gate;
    dc.fresh_draw = config_.fresh_draw;
    dc.seed = repeat_seed(rep);
    dc.warn_on_mismatch = augmented;  // the no-augmentation runs are deliberate
    auto inner = std::make_shared<ClassifierEndpoint>(augmented ? augmented_victim(kind) : victim());
    return wrap(inner, gate ? general_detector() : nullptr, world_.transform_config(kind), dc);
  }

  ExperimentRecord during_attack(AttackFamily f, TransformKind kind, bool augmented, std::size_t rep) {
    auto ep = defended(kind, config_.gate_during_attack, rep, augmented);
    return evaluate_during_attack(Attack(attack_spec(f)), *ep, attack_set(), repeat_seed(rep),
                                  {std::string("during/") + to_string(f) + "/" + to_string(kind) + "/" +
                                       (augmented ? "aug" : "noaug") + "/r" + std::to_string(rep),
                                   config_.digest(), config_.verdict_m});
  }

  // One transform draw per clean attack-set text, classified by the clean or
  // augmented victim; misclassified examples are skipped_wrong_prediction.
  ExperimentRecord randomized_clean(TransformKind kind, bool augmented, std::size_t rep) {
    ClassifierEndpoint ep(augmented ? augmented_victim(kind) : victim());
    const Transformer t(world_.transform_config(kind));
    const RngStream root(repeat_seed(rep), {fnv1a64("randomized-clean")});
    ExperimentRecord rec;
    rec.name = std::string("after/none/") + to_string(kind) + "/" + (augmented ? "aug" : "noaug") + "/r" +
               std::to_string(rep);
    rec.config_digest = config_.digest();
    rec.seed = repeat_seed(rep);
    const auto& ds = attack_set();
    for (std::size_t i = 0; i < ds.examples.size(); ++i) {
      const auto& ex = ds.examples[i];
      RngStream rng = root.child(i);
      std::string text = t.apply(ex.text, rng);
      if (trim(text).empty()) text = ex.text;
      AttackOutcome o;
      o.example_id = ex.id;
      o.premise = ex.premise;
      o.gold_label = ex.gold_label;
      o.original_text = ex.text;
      o.final_text = detokenize(tokenize(text));
      o.queries = 1;
      o.status = ep.label_set().at(ep.query_label(Query{ex.premise, o.final_text})) == ex.gold_label
                     ? AttackStatus::failed
                     : AttackStatus::skipped_wrong_prediction;
      rec.per_example.push_back(std::move(o));
    }
    rec.metrics = compute_metrics(rec.per_example);
    return rec;
  }

  // Clean accuracy of the gated framework: no attack, one defended query per
  // example; misclassified examples are skipped_wrong_prediction.
  ExperimentRecord framework_clean(std::size_t rep) {
    auto ep = defended(config_.defense_transform, true, rep);
    ExperimentRecord rec;
    rec.name = "framework/clean/r" + std::to_string(rep);
    rec.config_digest = config_.digest();
    rec.seed = repeat_seed(rep);
    const auto& ds = attack_set();
    for (std::size_t i = 0; i < ds.examples.size(); ++i) {
      const auto& ex = ds.examples[i];
      ep->begin_example(i);
      AttackOutcome o;
      o.example_id = ex.id;
      o.premise = ex.premise;
      o.gold_label = ex.gold_label;
      o.original_text = ex.text;
      o.final_text = detokenize(tokenize(ex.text));
      o.queries = 1;
      o.status = ep->label_set().at(ep->query_label(query_of(ex))) == ex.gold_label
                     ? AttackStatus::failed
                     : AttackStatus::skipped_wrong_prediction;
      rec.per_example.push_back(std::move(o));
    }
    rec.metrics = compute_metrics(rec.per_example);
    return rec;
  }

  ExperimentRecord framework(AttackFamily f, std::size_t rep) {
    auto ep = defended(config_.defense_transform, true, rep);
    return run_attack(Attack(attack_spec(f)), *ep, attack_set(), repeat_seed(rep),
                      {std::string("framework/") + to_string(f) + "/r" + std::to_string(rep), config_.digest(),
                       config_.verdict_m});
  }

  ExperimentRecord adaptive(AttackFamily f, std::size_t rep) {
    auto ep = defended(config_.defense_transform, true, rep);
    const Transformer t(world_.transform_config(config_.defense_transform));
    AdaptiveWrapConfig wrap_cfg{config_.adaptive_k,
                                std::make_shared<TransformDistribution>(std::vector<TextTransform>{t.as_function()})};
    const Attack a = eot_adaptive(Attack(attack_spec(f)), wrap_cfg);
    return run_attack(a, *ep, attack_set(), repeat_seed(rep),
                      {std::string("adaptive/") + to_string(f) + "/r" + std::to_string(rep), config_.digest(),
                       config_.verdict_m});
  }

  // ---- analyses ------------------------------------------------------------

  // Specific and general detector scores per family (the held-out family
  // is unseen by the general detector), the mixed set behind the degree
  // histogram, and the learning-curve detectors.
  std::vector<DetectionScores> detection_sets() {
    std::vector<DetectionScores> sets;
    for (auto f : kAllAttackFamilies) {
      const auto [eval, ids] = eval_set({f});
      sets.push_back(score_texts(*specific_detector(f), std::string("specific/") + to_string(f), "specific", eval, ids));
      sets.push_back(score_texts(*general_detector(), std::string("general/") + to_string(f),
                                 f == config_.held_out_family ? "general-unseen" : "general", eval, ids));
    }
    const std::vector<AttackFamily> all(std::begin(kAllAttackFamilies), std::end(kAllAttackFamilies));
    const auto [eval, ids] = eval_set(all);
    sets.push_back(score_texts(*general_detector(), "general/mixed", "general", eval, ids));
    for (auto f : {AttackFamily::char_edit, config_.word_family})
      for (auto& c : curve(f)) sets.push_back(std::move(c));
    return sets;
  }

  ProjectionPoints projection() {
    const auto [eval, ids] = eval_set({AttackFamily::char_edit});
    std::vector<std::string> clean, adv;
    for (std::size_t i = 0; i < eval.size(); ++i) (eval.labels[i] ? adv : clean).push_back(eval.texts[i]);
    return {"specific/char_edit", projection_scatter(*specific_detector(AttackFamily::char_edit), clean, adv)};
  }

  // Every stage; record files land under `out_dir`.
  void run_all(const fs::path& out_dir, const std::function<void(const std::string&)>& progress = {}) {
    auto note = [&](const std::string& s) {
      if (progress) progress(s);
    };
    const std::vector<AttackFamily> fams(std::begin(kAllAttackFamilies), std::end(kAllAttackFamilies));
    const std::vector<TransformKind> kinds(std::begin(kAllTransformKinds), std::end(kAllTransformKinds));

    std::vector<ExperimentRecord> pools, undef, constr, after, during, frame, adapt;
    note("adversarial pools");
    for (auto f : fams) pools.push_back(pool(f));
    note("detectors");
    write_detection_scores(detection_sets(), out_dir / "detection" / "scores.jsonl");
    write_projection({projection()}, out_dir / "analysis" / "projection.jsonl");
    for (auto f : fams) {
      note(std::string("attacks: ") + to_string(f));
      undef.push_back(undefended(f));
      constr.push_back(constrained(f));
      for (std::size_t r = 0; r < config_.repeats; ++r) {
        for (auto k : kinds)
          for (bool aug : {false, true}) {
            after.push_back(after_attack(undef.back(), f, k, aug, r));
            during.push_back(during_attack(f, k, aug, r));
          }
        frame.push_back(framework(f, r));
        adapt.push_back(adaptive(f, r));
      }
    }
    for (std::size_t r = 0; r < config_.repeats; ++r) {
      frame.push_back(framework_clean(r));
      for (auto k : kinds)
        for (bool aug : {false, true}) after.push_back(randomized_clean(k, aug, r));
    }
    note("writing records");
    const fs::path rd = out_dir / "records";
    write_records(pools, rd / "pools.jsonl");
    write_records(undef, rd / "undefended.jsonl");
    write_records(constr, rd / "constrained.jsonl");
    write_records(after, rd / "after.jsonl");
    write_records(during, rd / "during.jsonl");
    write_records(frame, rd / "framework.jsonl");
    write_records(adapt, rd / "adaptive.jsonl");
  }

 private:
  std::string stage_key(const std::string& stage) const { return stage + "-" + digest_; }

  std::shared_ptr<const ClassifierModel> train_victim(std::optional<TransformKind> kind) {
    TrainConfig tc = config_.victim;
    tc.augment_transform = kind ? to_string(*kind) : "";
    const std::string key = stage_key(std::string("victim-") + (kind ? to_string(*kind) : "clean")) + ".json";
    auto m = cache_.get<ClassifierModel>(
        key,
        [&] {
          if (!kind) return train_classifier(world_.train, tc);
          const Transformer t(world_.transform_config(*kind));
          const Dataset aug = augment_with_transform(world_.train, t.as_function(),
                                                     RngStream(config_.seed, {fnv1a64("augment-seed")}).next_u64());
          return train_classifier(aug, tc);
        },
        [](const ClassifierModel& model, const fs::path& p) { model.save(p); },
        [](const fs::path& p) { return ClassifierModel::load(p); });
    return std::make_shared<const ClassifierModel>(std::move(m));
  }

  std::shared_ptr<const DetectorModel> train_detector_on(const std::vector<AttackFamily>& fams, DetectorMode mode) {
    std::string name = mode == DetectorMode::general ? "general" : "specific";
    for (auto f : fams) name += std::string("-") + to_string(f);
    auto normal = normal_train_texts();
    const std::string key = stage_key("detector-" + name) + ".json";
    auto m = cache_.get<DetectorModel>(
        key,
        [&] {
          std::vector<std::string> adv;
          std::vector<DetectorSource> prov;
          for (auto f : fams) {
            auto a = adversarial_train_texts(f);
            prov.push_back({world_.train.name, to_string(f), a.size()});
            adv.insert(adv.end(), a.begin(), a.end());
          }
          auto model = train_detector(normal, adv, detector_encoder(), config_.detector);
          model.mode = mode;
          model.provenance = prov;
          return model;
        },
        [](const DetectorModel& model, const fs::path& p) { model.save(p); },
        [](const fs::path& p) { return DetectorModel::load(p); });
    return std::make_shared<const DetectorModel>(std::move(m));
  }

  World world_;
  PipelineConfig config_;
  StageCache cache_;
  std::string digest_;

  std::shared_ptr<const ClassifierModel> victim_;
  std::map<TransformKind, std::shared_ptr<const ClassifierModel>> augmented_;
  Dataset pool_source_;
  Dataset attack_set_;
  std::map<AttackFamily, ExperimentRecord> pools_;
  std::shared_ptr<const DetectorEncoder> encoder_;
  std::map<AttackFamily, std::shared_ptr<const DetectorModel>> specific_;
  std::shared_ptr<const DetectorModel> general_;
};

}  // namespace textshield::harness

#endif  // TEXTSHIELD_HARNESS_PIPELINE_HPP_
