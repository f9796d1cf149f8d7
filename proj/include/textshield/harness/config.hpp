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

#ifndef TEXTSHIELD_HARNESS_CONFIG_HPP_
#define TEXTSHIELD_HARNESS_CONFIG_HPP_

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "textshield/attacks.hpp"
#include "textshield/classifier.hpp"
#include "textshield/detector.hpp"
#include "textshield/harness/world.hpp"
#include "textshield/transforms.hpp"

namespace textshield::harness {

inline constexpr const char* kCacheEnv = "TEXTSHIELD_CACHE";

struct PipelineConfig {
  std::uint64_t seed = 7;
  WorldOptions world;
  TrainConfig victim;
  DetectorConfig detector;

  // attack.*
  AttackFamily family = AttackFamily::word_synonym;  // single-family subcommands
  std::optional<std::uint64_t> attack_budget;
  bool anomaly_constraint = false;
  std::size_t adaptive_k = 5;

  // defense.*
  TransformKind defense_transform = TransformKind::synonym_substitution;
  double defense_threshold = 0.5;
  bool fresh_draw = true;
  std::size_t verdict_m = 1;
  bool gate_during_attack = false;  // randomization-during-attack runs

  // harness.*
  std::size_t repeats = 3;
  std::size_t detector_train_examples = 1200;  // training-split prefix whose attacks train the detectors
  std::size_t eval_per_class = 500;
  std::size_t attack_examples = 500;  // test examples per attack run
  AttackFamily held_out_family = AttackFamily::sentence_paraphrase;
  AttackFamily word_family = AttackFamily::word_synonym;
  std::vector<std::size_t> curve_sizes{10, 100};

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["victim"] = victim.to_json();
    j["detector"] = {{"hidden", detector.hidden},   {"dropout", detector.dropout},
                     {"epochs", detector.epochs},   {"lr", detector.lr},
                     {"batch_size", detector.batch_size}, {"seed", detector.seed},
                     {"threshold", detector.threshold},   {"buckets", detector.buckets}};
    j["transforms"] = {{"substitution_fraction", world.substitution_fraction},
                       {"mlm_top_k", world.mlm_transform_top_k},
                       {"back_translation_choices", world.back_translation_choices}};
    j["attack"] = {{"family", to_string(family)},
                   {"budget", attack_budget ? nlohmann::ordered_json(*attack_budget) : nlohmann::ordered_json()},
                   {"anomaly_constraint", anomaly_constraint},
                   {"adaptive", {{"k", adaptive_k}}},
                   {"mlm_top_k", world.mlm_top_k},
                   {"mlm_min_word_similarity", world.mlm_min_word_similarity},
                   {"mlm_affinity_weight", world.mlm_affinity_weight},
                   {"paraphrase_count", world.paraphrase_count}};
    j["defense"] = {{"transform", to_string(defense_transform)},
                    {"threshold", defense_threshold},
                    {"fresh_draw", fresh_draw},
                    {"verdict_m", verdict_m},
                    {"gate_during_attack", gate_during_attack}};
    j["harness"] = {{"repeats", repeats},
                    {"detector_train_examples", detector_train_examples},
                    {"eval_per_class", eval_per_class},
                    {"attack_examples", attack_examples},
                    {"held_out_family", to_string(held_out_family)},
                    {"word_family", to_string(word_family)},
                    {"curve_sizes", curve_sizes}};
    return j;
  }

  // Applies the keys present in `j`; absent keys keep their current values.
  void merge(const nlohmann::json& j) {
    auto get = [](const nlohmann::json& obj, const char* key, auto& field) {
      if (obj.contains(key) && !obj.at(key).is_null()) field = obj.at(key).get<std::decay_t<decltype(field)>>();
    };
    get(j, "seed", seed);
    if (j.contains("victim")) {
      nlohmann::json merged = victim.to_json();
      merged.update(j.at("victim"));
      victim = TrainConfig::from_json(merged);
    }
    if (j.contains("detector")) {
      const auto& d = j.at("detector");
      get(d, "hidden", detector.hidden);
      get(d, "dropout", detector.dropout);
      get(d, "epochs", detector.epochs);
      get(d, "lr", detector.lr);
      get(d, "batch_size", detector.batch_size);
      get(d, "seed", detector.seed);
      get(d, "threshold", detector.threshold);
      get(d, "buckets", detector.buckets);
    }
    if (j.contains("transforms")) {
      const auto& t = j.at("transforms");
      get(t, "substitution_fraction", world.substitution_fraction);
      get(t, "mlm_top_k", world.mlm_transform_top_k);
      get(t, "back_translation_choices", world.back_translation_choices);
    }
    if (j.contains("attack")) {
      const auto& a = j.at("attack");
      if (a.contains("family")) family = attack_family_from_string(a.at("family").get<std::string>());
      if (a.contains("budget")) {
        if (a.at("budget").is_null()) attack_budget.reset();
        else attack_budget = a.at("budget").get<std::uint64_t>();
      }
      get(a, "anomaly_constraint", anomaly_constraint);
      if (a.contains("adaptive")) get(a.at("adaptive"), "k", adaptive_k);
      get(a, "mlm_top_k", world.mlm_top_k);
      get(a, "mlm_min_word_similarity", world.mlm_min_word_similarity);
      get(a, "mlm_affinity_weight", world.mlm_affinity_weight);
      get(a, "paraphrase_count", world.paraphrase_count);
    }
    if (j.contains("defense")) {
      const auto& d = j.at("defense");
      if (d.contains("transform")) defense_transform = transform_kind_from_string(d.at("transform").get<std::string>());
      get(d, "threshold", defense_threshold);
      get(d, "fresh_draw", fresh_draw);
      get(d, "verdict_m", verdict_m);
      get(d, "gate_during_attack", gate_during_attack);
    }
    if (j.contains("harness")) {
      const auto& h = j.at("harness");
      get(h, "repeats", repeats);
      get(h, "detector_train_examples", detector_train_examples);
      get(h, "eval_per_class", eval_per_class);
      get(h, "attack_examples", attack_examples);
      if (h.contains("held_out_family"))
        held_out_family = attack_family_from_string(h.at("held_out_family").get<std::string>());
      if (h.contains("word_family")) word_family = attack_family_from_string(h.at("word_family").get<std::string>());
      get(h, "curve_sizes", curve_sizes);
    }
    validate();
  }

  void validate() const {
    if (adaptive_k < 1) throw Error("attack.adaptive.k must be at least 1");
    if (attack_budget && *attack_budget == 0) throw Error("attack.budget must be positive");
    if (!(defense_threshold > 0.0 && defense_threshold < 1.0)) throw Error("defense.threshold must be in (0, 1)");
    if (verdict_m == 0) throw Error("defense.verdict_m must be positive");
    if (repeats == 0) throw Error("harness.repeats must be positive");
    if (detector.hidden == 0 || detector.batch_size < 2 || detector.batch_size % 2)
      throw Error("detector.hidden must be positive and detector.batch_size even");
    if (!(world.substitution_fraction > 0.0 && world.substitution_fraction <= 1.0))
      throw Error("transforms.substitution_fraction must be in (0, 1]");
    for (auto n : curve_sizes)
      if (n == 0) throw Error("harness.curve_sizes entries must be positive");
  }

  std::string digest() const { return hex64(fnv1a64(to_json().dump())); }

  static PipelineConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    PipelineConfig c;
    try {
      c.merge(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw Error(path.string() + ": " + e.what());
    }
    return c;
  }
};

inline std::optional<std::filesystem::path> cache_dir_from_env() {
  if (const char* v = std::getenv(kCacheEnv); v && *v) return std::filesystem::path(v);
  return std::nullopt;
}

}  // namespace textshield::harness

#endif  // TEXTSHIELD_HARNESS_CONFIG_HPP_
