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

#ifndef TEXTSHIELD_DETECTOR_HPP_
#define TEXTSHIELD_DETECTOR_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "textshield/classifier.hpp"
#include "textshield/constraints.hpp"
#include "textshield/language_model.hpp"
#include "textshield/lexicon.hpp"
#include "textshield/rng.hpp"

namespace textshield {

// Binary cross-entropy for one example; p is the class-1 probability.
inline double detector_loss(int y, double p) {
  constexpr double kEps = 1e-12;
  p = std::clamp(p, kEps, 1.0 - kEps);
  return -(y * std::log(p) + (1 - y) * std::log(1.0 - p));
}

// Reference statistics of normal text: the detector's encoder measures how
// far an input departs from them (unknown words, rare words, unseen word
// pairs, fluency) and adds hashed word and character-trigram indicators.
class DetectorEncoder {
 public:
  static constexpr std::size_t kDense = 8;

  DetectorEncoder(std::vector<std::string> reference_texts, std::vector<std::string> known_words,
                  std::size_t buckets = 2048)
      : reference_(std::move(reference_texts)), known_list_(std::move(known_words)), buckets_(buckets) {
    for (const auto& t : reference_) {
      freq_.add_text(t);
      lm_.observe(t);
    }
    for (const auto& w : known_list_) known_.add(w, 0);
    for (const auto& [w, c] : freq_.counts()) {
      known_.add(w, c);
      max_freq_ = std::max(max_freq_, c);
    }
  }

  std::size_t input_dimension() const { return kDense + buckets_; }
  const std::vector<std::string>& reference_texts() const { return reference_; }
  const std::vector<std::string>& known_words() const { return known_list_; }
  std::size_t buckets() const { return buckets_; }

  SparseFeatures features(const std::string& text) const {
    const Tokens toks = tokenize(text);
    const auto words = word_positions(toks);
    std::vector<double> dense(kDense, 0.0);
    if (!words.empty()) {
      const double n = static_cast<double>(words.size());
      const double lmax = std::log1p(static_cast<double>(std::max<std::uint64_t>(max_freq_, 1)));
      double oov = 0, rare = 0, min_lf = 1.0, sum_lf = 0;
      for (auto i : words) {
        const auto& w = toks[i];
        if (!known_.contains(w)) ++oov;
        const auto f = freq_.count(w);
        if (f <= kRareCutoff) ++rare;
        const double lf = std::log1p(static_cast<double>(f)) / lmax;
        min_lf = std::min(min_lf, lf);
        sum_lf += lf;
      }
      std::size_t unseen = 0;
      std::string prev = NgramLanguageModel::kStart;
      for (const auto& t : toks) {
        unseen += lm_.bigram_count(prev, t) == 0;
        prev = t;
      }
      dense[0] = oov / n;
      dense[1] = std::min(oov, 3.0) / 3.0;
      dense[2] = rare / n;
      dense[3] = min_lf;
      dense[4] = sum_lf / n;
      dense[5] = static_cast<double>(unseen) / static_cast<double>(toks.size());
      dense[6] = std::log(lm_.perplexity(text)) / 10.0;
      dense[7] = n / 30.0;
    }
    std::map<std::uint32_t, double> sparse;
    for (auto i : words) {
      const auto& w = toks[i];
      sparse[bucket("w:" + w)] = 1.0;
      const std::string padded = "#" + w + "#";
      for (std::size_t k = 0; k + 3 <= padded.size(); ++k) sparse[bucket("c:" + padded.substr(k, 3))] = 1.0;
    }
    SparseFeatures out;
    out.reserve(kDense + sparse.size());
    for (std::size_t k = 0; k < kDense; ++k) out.emplace_back(static_cast<std::uint32_t>(k), dense[k]);
    const double scale = sparse.empty() ? 0.0 : 1.0 / std::sqrt(static_cast<double>(sparse.size()));
    for (const auto& [k, v] : sparse) out.emplace_back(k, v * scale);
    return out;
  }

 private:
  static constexpr std::uint64_t kRareCutoff = 2;

  std::uint32_t bucket(const std::string& key) const {
    return static_cast<std::uint32_t>(kDense + fnv1a64(key) % buckets_);
  }

  std::vector<std::string> reference_;
  std::vector<std::string> known_list_;
  std::size_t buckets_;
  FrequencyTable freq_;
  NgramLanguageModel lm_{2};
  KnownWords known_;
  std::uint64_t max_freq_ = 1;
};

enum class DetectorMode { specific, general };

struct DetectorSource {
  std::string dataset;
  std::string attack_id;
  std::size_t count = 0;
};

struct DetectorConfig {
  std::size_t hidden = 32;
  double dropout = 0.1;
  int epochs = 12;
  double lr = 0.2;
  std::size_t batch_size = 16;  // even; half normal, half adversarial
  std::uint64_t seed = 3;
  double threshold = 0.5;
  std::size_t buckets = 2048;
};

struct DetectionResult {
  double degree = 0.0;
  bool flag = false;
  double threshold = 0.5;
};

struct DetectorMetrics {
  double accuracy = 0, precision = 0, recall = 0, f1 = 0;
};

// Anomaly detector: h0 = tanh(W_h x + b_h) over the encoder features, then a
// two-way softmax head W_d dropout(h0) + b_d. Class 1 means adversarial.
class DetectorModel : public AnomalyScorer {
 public:
  DetectorModel(std::shared_ptr<const DetectorEncoder> encoder, DetectorConfig config)
      : encoder_(std::move(encoder)), config_(config) {
    const std::size_t d = encoder_->input_dimension(), H = config_.hidden;
    w_hidden_.assign(H * d, 0.0);
    b_hidden_.assign(H, 0.0);
    w_head_.assign(2 * H, 0.0);
    b_head_.assign(2, 0.0);
    RngStream rng(config_.seed, {fnv1a64("detector-init")});
    for (auto& w : w_hidden_) w = 0.1 * rng.normal();
    for (auto& w : w_head_) w = 0.1 * rng.normal();
  }

  DetectorMode mode = DetectorMode::general;
  std::vector<DetectorSource> provenance;

  const DetectorConfig& config() const { return config_; }
  double threshold() const { return config_.threshold; }
  std::size_t hidden_size() const { return config_.hidden; }
  const std::vector<double>& loss_history() const { return loss_history_; }
  const DetectorEncoder& encoder() const { return *encoder_; }

  // Sentence representation h0.
  std::vector<double> representation(const std::string& text) const {
    return hidden(encoder_->features(text));
  }

  // Class probabilities (normal, adversarial); dropout is off at inference.
  std::array<double, 2> probabilities(const std::string& text) const {
    if (trim(text).empty()) throw Error("degree_of_anomaly: empty text");
    return head(representation(text));
  }

  double degree(const Query& q) const override { return probabilities(q.text)[1]; }
  double degree(const std::string& text) const { return probabilities(text)[1]; }

  friend DetectorModel train_detector(const std::vector<std::string>&, const std::vector<std::string>&,
                                      std::shared_ptr<const DetectorEncoder>, const DetectorConfig&);

  nlohmann::json to_json() const {
    nlohmann::json prov = nlohmann::json::array();
    for (const auto& s : provenance) prov.push_back({{"dataset", s.dataset}, {"attack_id", s.attack_id}, {"count", s.count}});
    return {{"kind", "textshield-detector"},
            {"mode", mode == DetectorMode::general ? "general" : "specific"},
            {"provenance", prov},
            {"config",
             {{"hidden", config_.hidden},
              {"dropout", config_.dropout},
              {"epochs", config_.epochs},
              {"lr", config_.lr},
              {"batch_size", config_.batch_size},
              {"seed", config_.seed},
              {"threshold", config_.threshold},
              {"buckets", config_.buckets}}},
            {"reference_texts", encoder_->reference_texts()},
            {"known_words", encoder_->known_words()},
            {"w_hidden", w_hidden_},
            {"b_hidden", b_hidden_},
            {"w_head", w_head_},
            {"b_head", b_head_},
            {"loss_history", loss_history_}};
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write detector checkpoint " + path.string());
    out << to_json().dump();
  }

  static DetectorModel load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open detector checkpoint " + path.string());
    const auto j = nlohmann::json::parse(in);
    if (j.value("kind", "") != "textshield-detector") throw Error(path.string() + " is not a detector checkpoint");
    DetectorConfig c;
    const auto& jc = j.at("config");
    c.hidden = jc.at("hidden");
    c.dropout = jc.at("dropout");
    c.epochs = jc.at("epochs");
    c.lr = jc.at("lr");
    c.batch_size = jc.at("batch_size");
    c.seed = jc.at("seed");
    c.threshold = jc.at("threshold");
    c.buckets = jc.at("buckets");
    auto enc = std::make_shared<DetectorEncoder>(j.at("reference_texts").get<std::vector<std::string>>(),
                                                 j.at("known_words").get<std::vector<std::string>>(), c.buckets);
    DetectorModel m(enc, c);
    m.mode = j.at("mode") == "general" ? DetectorMode::general : DetectorMode::specific;
    for (const auto& s : j.at("provenance")) m.provenance.push_back({s.at("dataset"), s.at("attack_id"), s.at("count")});
    m.w_hidden_ = j.at("w_hidden").get<std::vector<double>>();
    m.b_hidden_ = j.at("b_hidden").get<std::vector<double>>();
    m.w_head_ = j.at("w_head").get<std::vector<double>>();
    m.b_head_ = j.at("b_head").get<std::vector<double>>();
    m.loss_history_ = j.at("loss_history").get<std::vector<double>>();
    return m;
  }

 private:
  std::vector<double> hidden(const SparseFeatures& x) const {
    const std::size_t d = encoder_->input_dimension(), H = config_.hidden;
    std::vector<double> h(b_hidden_);
    for (std::size_t k = 0; k < H; ++k) {
      const double* row = &w_hidden_[k * d];
      for (const auto& [i, v] : x) h[k] += row[i] * v;
      h[k] = std::tanh(h[k]);
    }
    return h;
  }

  std::array<double, 2> head(const std::vector<double>& h) const {
    const std::size_t H = config_.hidden;
    std::array<double, 2> z{b_head_[0], b_head_[1]};
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t k = 0; k < H; ++k) z[c] += w_head_[c * H + k] * h[k];
    const double m = std::max(z[0], z[1]);
    const double e0 = std::exp(z[0] - m), e1 = std::exp(z[1] - m);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
  }

  std::shared_ptr<const DetectorEncoder> encoder_;
  DetectorConfig config_;
  std::vector<double> w_hidden_, b_hidden_, w_head_, b_head_;
  std::vector<double> loss_history_;
};

// Mini-batch SGD on the cross-entropy loss. Every batch holds equal numbers
// of normal and adversarial examples; the smaller class is cycled so both
// classes contribute the same count per epoch.
inline DetectorModel train_detector(const std::vector<std::string>& normal, const std::vector<std::string>& adversarial,
                                    std::shared_ptr<const DetectorEncoder> encoder, const DetectorConfig& config) {
  if (normal.empty() || adversarial.empty()) throw Error("train_detector: both classes need examples");
  if (config.batch_size < 2 || config.batch_size % 2) throw Error("train_detector: batch size must be even");
  DetectorModel model(std::move(encoder), config);
  const std::size_t d = model.encoder_->input_dimension(), H = config.hidden;
  std::vector<SparseFeatures> x0, x1;
  for (const auto& t : normal) x0.push_back(model.encoder_->features(t));
  for (const auto& t : adversarial) x1.push_back(model.encoder_->features(t));
  const std::size_t per_class = std::max(x0.size(), x1.size());
  const RngStream root(config.seed, {fnv1a64("detector-train")});
  const double keep = 1.0 - config.dropout;

  std::vector<double> gw_head(2 * H), gb_head(2), gb_hidden(H);
  std::map<std::size_t, double> gw_hidden;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    RngStream rng = root.child(static_cast<std::uint64_t>(epoch));
    auto draw_order = [&](std::size_t n) {
      std::vector<std::size_t> order;
      while (order.size() < per_class) {
        std::vector<std::size_t> block(n);
        for (std::size_t i = 0; i < n; ++i) block[i] = i;
        rng.shuffle(block);
        order.insert(order.end(), block.begin(), block.end());
      }
      order.resize(per_class);
      return order;
    };
    const auto o0 = draw_order(x0.size()), o1 = draw_order(x1.size());
    const std::size_t half = config.batch_size / 2;
    double epoch_loss = 0;
    for (std::size_t start = 0; start < per_class; start += half) {
      const std::size_t end = std::min(per_class, start + half);
      std::fill(gw_head.begin(), gw_head.end(), 0.0);
      std::fill(gb_head.begin(), gb_head.end(), 0.0);
      std::fill(gb_hidden.begin(), gb_hidden.end(), 0.0);
      gw_hidden.clear();
      std::size_t batch = 0;
      for (std::size_t k = start; k < end; ++k) {
        for (int y = 0; y < 2; ++y) {
          const SparseFeatures& x = y ? x1[o1[k]] : x0[o0[k]];
          const auto h = model.hidden(x);
          std::vector<double> hd(H);
          std::vector<char> mask(H, 1);
          for (std::size_t j = 0; j < H; ++j) {
            if (config.dropout > 0 && rng.uniform01() < config.dropout) mask[j] = 0;
            hd[j] = mask[j] ? h[j] / keep : 0.0;
          }
          const auto p = model.head(hd);
          epoch_loss += detector_loss(y, p[1]);
          ++batch;
          const double g[2] = {p[0] - (y == 0), p[1] - (y == 1)};
          for (std::size_t c = 0; c < 2; ++c) {
            gb_head[c] += g[c];
            for (std::size_t j = 0; j < H; ++j) gw_head[c * H + j] += g[c] * hd[j];
          }
          for (std::size_t j = 0; j < H; ++j) {
            if (!mask[j]) continue;
            const double dh = (g[0] * model.w_head_[j] + g[1] * model.w_head_[H + j]) / keep;
            const double dpre = dh * (1.0 - h[j] * h[j]);
            gb_hidden[j] += dpre;
            for (const auto& [i, v] : x) gw_hidden[j * d + i] += dpre * v;
          }
        }
      }
      const double scale = config.lr / static_cast<double>(batch);
      for (std::size_t i = 0; i < gw_head.size(); ++i) model.w_head_[i] -= scale * gw_head[i];
      for (std::size_t c = 0; c < 2; ++c) model.b_head_[c] -= scale * gb_head[c];
      for (std::size_t j = 0; j < H; ++j) model.b_hidden_[j] -= scale * gb_hidden[j];
      for (const auto& [idx, gv] : gw_hidden) model.w_hidden_[idx] -= scale * gv;
    }
    model.loss_history_.push_back(epoch_loss / static_cast<double>(2 * per_class));
  }
  return model;
}

inline DetectionResult detect(const DetectorModel& model, const std::string& text, double threshold = 0.5) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error("detect: threshold must be in (0, 1)");
  const double d = model.degree(text);
  return DetectionResult{d, d >= threshold, threshold};
}

// Confusion-matrix metrics with adversarial as the positive class. Precision
// with no predicted positives is reported as 0.
inline DetectorMetrics evaluate_detector(const DetectorModel& model, const std::vector<std::string>& texts,
                                         const std::vector<int>& labels) {
  if (texts.size() != labels.size()) throw Error("evaluate_detector: texts and labels differ in length");
  const auto pos = std::count(labels.begin(), labels.end(), 1);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(labels.size()))
    throw Error("evaluate_detector: labeled set needs both classes");
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const bool flag = detect(model, texts[i], model.threshold()).flag;
    if (labels[i]) (flag ? tp : fn)++;
    else (flag ? fp : tn)++;
  }
  DetectorMetrics m;
  m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(texts.size());
  m.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

// Rows are h0 for each text.
inline Eigen::MatrixXd export_representations(const DetectorModel& model, const std::vector<std::string>& texts) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(model.hidden_size()));
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto h = model.representation(texts[i]);
    for (std::size_t j = 0; j < h.size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = h[j];
  }
  return out;
}

// Variance-maximizing linear map onto the top principal directions. Each
// direction's sign is fixed so its largest-magnitude entry is positive,
// which makes the projection a deterministic function of the data.
struct LinearProjection {
  Eigen::RowVectorXd mean;
  Eigen::MatrixXd components;  // H x k

  static LinearProjection fit(const Eigen::MatrixXd& data, int k = 2) {
    if (data.rows() < 2) throw Error("projection needs at least two rows");
    LinearProjection p;
    p.mean = data.colwise().mean();
    const Eigen::MatrixXd centered = data.rowwise() - p.mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(data.rows() - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    const auto& vecs = solver.eigenvectors();  // ascending eigenvalues
    k = std::min<int>(k, static_cast<int>(data.cols()));
    p.components.resize(data.cols(), k);
    for (int c = 0; c < k; ++c) {
      Eigen::VectorXd v = vecs.col(data.cols() - 1 - c);
      Eigen::Index arg;
      v.cwiseAbs().maxCoeff(&arg);
      if (v(arg) < 0) v = -v;
      p.components.col(c) = v;
    }
    return p;
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& data) const {
    return (data.rowwise() - mean) * components;
  }
};

}  // namespace textshield

#endif  // TEXTSHIELD_DETECTOR_HPP_
