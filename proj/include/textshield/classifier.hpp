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

#ifndef TEXTSHIELD_CLASSIFIER_HPP_
#define TEXTSHIELD_CLASSIFIER_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "textshield/rng.hpp"
#include "textshield/types.hpp"

namespace textshield {

using SparseFeatures = std::vector<std::pair<std::uint32_t, double>>;

// Pluggable text encoder behind the victim classifier.
class TextFeaturizer {
 public:
  virtual ~TextFeaturizer() = default;
  virtual std::string id() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual SparseFeatures features(const Query& q) const = 0;
  virtual nlohmann::json save() const = 0;
};

// Binary bag-of-words over a vocabulary fitted on the training split.
// "bow" uses unigrams; "bow-bigram" adds adjacent word pairs. Premise tokens
// (NLI) live in a separate namespace so premise and hypothesis features do
// not collide.
class BagOfWordsFeaturizer : public TextFeaturizer {
 public:
  BagOfWordsFeaturizer(bool bigrams, std::vector<std::string> vocab) : bigrams_(bigrams), vocab_(std::move(vocab)) {
    for (std::size_t i = 0; i < vocab_.size(); ++i) index_.emplace(vocab_[i], static_cast<std::uint32_t>(i));
  }

  static std::shared_ptr<BagOfWordsFeaturizer> fit(const Dataset& train, bool bigrams) {
    std::map<std::string, int> seen;
    for (const auto& ex : train.examples) {
      for (auto& k : keys(Query{ex.premise, ex.text}, bigrams)) seen.emplace(std::move(k), 0);
    }
    std::vector<std::string> vocab;
    vocab.reserve(seen.size());
    for (auto& [k, v] : seen) vocab.push_back(k);
    return std::make_shared<BagOfWordsFeaturizer>(bigrams, std::move(vocab));
  }

  std::string id() const override { return bigrams_ ? "bow-bigram" : "bow"; }
  std::size_t dimension() const override { return vocab_.size(); }

  SparseFeatures features(const Query& q) const override {
    std::map<std::uint32_t, double> f;
    for (const auto& k : keys(q, bigrams_)) {
      auto it = index_.find(k);
      if (it != index_.end()) f[it->second] = 1.0;
    }
    return SparseFeatures(f.begin(), f.end());
  }

  nlohmann::json save() const override { return {{"id", id()}, {"vocab", vocab_}}; }

 private:
  static std::vector<std::string> keys(const Query& q, bool bigrams) {
    std::vector<std::string> out;
    auto add = [&](const std::string& text, const char* ns) {
      Tokens toks = tokenize(text);
      for (std::size_t i = 0; i < toks.size(); ++i) {
        out.push_back(ns + toks[i]);
        if (bigrams && i + 1 < toks.size()) out.push_back(std::string(ns) + toks[i] + ' ' + toks[i + 1]);
      }
    };
    if (q.premise) add(*q.premise, "p:");
    add(q.text, "");
    return out;
  }

  bool bigrams_;
  std::vector<std::string> vocab_;
  std::map<std::string, std::uint32_t> index_;
};

inline std::shared_ptr<TextFeaturizer> make_featurizer(const std::string& encoder_id, const Dataset& train) {
  if (encoder_id == "bow") return BagOfWordsFeaturizer::fit(train, false);
  if (encoder_id == "bow-bigram") return BagOfWordsFeaturizer::fit(train, true);
  throw Error("unknown encoder_id '" + encoder_id + "'");
}

inline std::shared_ptr<TextFeaturizer> load_featurizer(const nlohmann::json& j) {
  const auto id = j.at("id").get<std::string>();
  if (id != "bow" && id != "bow-bigram") throw Error("unknown encoder_id '" + id + "'");
  return std::make_shared<BagOfWordsFeaturizer>(id == "bow-bigram", j.at("vocab").get<std::vector<std::string>>());
}

struct TrainConfig {
  std::string encoder_id = "bow";
  int epochs = 12;
  double lr = 0.5;
  std::size_t batch_size = 16;
  double l2 = 1e-4;
  std::uint64_t seed = 1;
  std::string augment_transform;  // empty when trained on clean data only

  nlohmann::json to_json() const {
    return {{"encoder_id", encoder_id}, {"epochs", epochs},       {"lr", lr},
            {"batch_size", batch_size}, {"l2", l2},               {"seed", seed},
            {"augment_transform", augment_transform}};
  }
  static TrainConfig from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.encoder_id = j.value("encoder_id", c.encoder_id);
    c.epochs = j.value("epochs", c.epochs);
    c.lr = j.value("lr", c.lr);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.l2 = j.value("l2", c.l2);
    c.seed = j.value("seed", c.seed);
    c.augment_transform = j.value("augment_transform", c.augment_transform);
    return c;
  }
};

// Softmax regression over a pluggable featurizer. Immutable after training.
class ClassifierModel {
 public:
  ClassifierModel(std::vector<std::string> label_set, std::shared_ptr<const TextFeaturizer> featurizer,
                  TrainConfig config)
      : label_set_(std::move(label_set)),
        featurizer_(std::move(featurizer)),
        config_(std::move(config)),
        weights_(label_set_.size() * featurizer_->dimension(), 0.0),
        bias_(label_set_.size(), 0.0) {}

  const std::vector<std::string>& label_set() const { return label_set_; }
  const TrainConfig& config() const { return config_; }
  bool augmented() const { return !config_.augment_transform.empty(); }
  const std::string& encoder_id() const { return config_.encoder_id; }
  const TextFeaturizer& featurizer() const { return *featurizer_; }
  const std::vector<double>& loss_history() const { return loss_history_; }

  ScoreVector predict(const Query& q) const {
    if (trim(q.text).empty()) throw Error("predict: empty text");
    return softmax(logits(featurizer_->features(q)));
  }

  double weight(std::size_t label, std::uint32_t feature) const { return weights_[label * dim() + feature]; }

  friend ClassifierModel train_classifier(const Dataset&, const TrainConfig&);

  void save(const std::filesystem::path& path) const {
    nlohmann::json j{{"kind", "textshield-classifier"},
                     {"label_set", label_set_},
                     {"config", config_.to_json()},
                     {"featurizer", featurizer_->save()},
                     {"weights", weights_},
                     {"bias", bias_},
                     {"loss_history", loss_history_}};
    std::ofstream out(path);
    if (!out) throw Error("cannot write checkpoint " + path.string());
    out << j.dump();
  }

  static ClassifierModel load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open checkpoint " + path.string());
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.value("kind", "") != "textshield-classifier") throw Error(path.string() + " is not a classifier checkpoint");
    ClassifierModel m(j.at("label_set").get<std::vector<std::string>>(), load_featurizer(j.at("featurizer")),
                      TrainConfig::from_json(j.at("config")));
    m.weights_ = j.at("weights").get<std::vector<double>>();
    m.bias_ = j.at("bias").get<std::vector<double>>();
    m.loss_history_ = j.at("loss_history").get<std::vector<double>>();
    if (m.weights_.size() != m.label_set_.size() * m.dim()) throw Error(path.string() + ": weight shape mismatch");
    return m;
  }

 private:
  std::size_t dim() const { return featurizer_->dimension(); }

  std::vector<double> logits(const SparseFeatures& f) const {
    std::vector<double> z(bias_);
    for (std::size_t c = 0; c < z.size(); ++c)
      for (const auto& [i, v] : f) z[c] += weights_[c * dim() + i] * v;
    return z;
  }

  static ScoreVector softmax(std::vector<double> z) {
    const double m = *std::max_element(z.begin(), z.end());
    double s = 0;
    for (double& v : z) s += (v = std::exp(v - m));
    for (double& v : z) v /= s;
    return z;
  }

  std::vector<std::string> label_set_;
  std::shared_ptr<const TextFeaturizer> featurizer_;
  TrainConfig config_;
  std::vector<double> weights_;
  std::vector<double> bias_;
  std::vector<double> loss_history_;
};

// Mini-batch SGD on cross-entropy with L2 decay. Batches are shuffled by a
// keyed stream so training is a pure function of (data, config).
inline ClassifierModel train_classifier(const Dataset& train, const TrainConfig& config) {
  if (train.empty()) throw Error("train_classifier: empty dataset");
  std::vector<bool> present(train.label_set.size(), false);
  for (const auto& ex : train.examples) present[train.label_index(ex.gold_label)] = true;
  if (std::count(present.begin(), present.end(), true) < 2)
    throw Error("train_classifier: need at least two labels present in the training data");
  if (config.batch_size == 0 || config.epochs <= 0) throw Error("train_classifier: invalid batch size or epochs");

  ClassifierModel model(train.label_set, make_featurizer(config.encoder_id, train), config);
  const std::size_t dim = model.dim(), L = train.label_set.size();
  std::vector<SparseFeatures> feats;
  std::vector<std::size_t> labels;
  for (const auto& ex : train.examples) {
    feats.push_back(model.featurizer_->features(query_of(ex)));
    labels.push_back(train.label_index(ex.gold_label));
  }
  std::vector<std::size_t> order(feats.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const RngStream root(config.seed, {fnv1a64("victim-train")});
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    RngStream rng = root.child(static_cast<std::uint64_t>(epoch));
    rng.shuffle(order);
    double loss = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::map<std::size_t, double> grad_w;
      std::vector<double> grad_b(L, 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const auto i = order[k];
        const ScoreVector p = ClassifierModel::softmax(model.logits(feats[i]));
        loss -= std::log(std::max(p[labels[i]], 1e-300));
        for (std::size_t c = 0; c < L; ++c) {
          const double g = p[c] - (c == labels[i] ? 1.0 : 0.0);
          grad_b[c] += g;
          for (const auto& [f, v] : feats[i]) grad_w[c * dim + f] += g * v;
        }
      }
      const double scale = config.lr / static_cast<double>(end - start);
      for (const auto& [idx, g] : grad_w) model.weights_[idx] -= scale * g;
      for (std::size_t c = 0; c < L; ++c) model.bias_[c] -= scale * grad_b[c];
      if (config.l2 > 0)
        for (double& w : model.weights_) w *= 1.0 - config.lr * config.l2;
    }
    model.loss_history_.push_back(loss / static_cast<double>(order.size()));
  }
  return model;
}

inline double accuracy(const ClassifierModel& model, const Dataset& ds) {
  if (ds.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& ex : ds.examples)
    correct += model.label_set().at(argmax(model.predict(query_of(ex)))) == ex.gold_label;
  return static_cast<double>(correct) / static_cast<double>(ds.size());
}

}  // namespace textshield

#endif  // TEXTSHIELD_CLASSIFIER_HPP_
