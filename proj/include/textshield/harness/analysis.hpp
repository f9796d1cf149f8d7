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

#ifndef TEXTSHIELD_HARNESS_ANALYSIS_HPP_
#define TEXTSHIELD_HARNESS_ANALYSIS_HPP_

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "textshield/detector.hpp"

namespace textshield::harness {

// Texts with binary labels (1 = adversarial).
struct LabeledTexts {
  std::vector<std::string> texts;
  std::vector<int> labels;

  void add(std::string text, int label) {
    texts.push_back(std::move(text));
    labels.push_back(label);
  }
  std::size_t size() const { return texts.size(); }
};

// Counts of values in [0, 1] over `bins` equal half-open bins; 1.0 falls in
// the last bin.
inline std::vector<std::size_t> histogram(const std::vector<double>& values, std::size_t bins = 10) {
  if (bins == 0) throw Error("histogram needs at least one bin");
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error("histogram value outside [0, 1]");
    const auto b = std::min(bins - 1, static_cast<std::size_t>(v * static_cast<double>(bins)));
    ++counts[b];
  }
  return counts;
}

inline std::vector<std::size_t> degree_histogram(const DetectorModel& detector, const std::vector<std::string>& texts,
                                                 std::size_t bins = 10) {
  std::vector<double> d;
  d.reserve(texts.size());
  for (const auto& t : texts) d.push_back(detector.degree(t));
  return histogram(d, bins);
}

// Share of the mass in the first and last bin.
inline double extreme_mass(const std::vector<std::size_t>& counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0 || counts.empty()) return 0.0;
  return static_cast<double>(counts.front() + (counts.size() > 1 ? counts.back() : 0)) / static_cast<double>(total);
}

struct ScatterPoint {
  double x = 0, y = 0;
  int label = 0;  // 1 = adversarial
};

inline std::vector<ScatterPoint> projection_scatter(const DetectorModel& detector, const std::vector<std::string>& clean,
                                                    const std::vector<std::string>& adversarial) {
  std::vector<std::string> all = clean;
  all.insert(all.end(), adversarial.begin(), adversarial.end());
  const Eigen::MatrixXd reps = export_representations(detector, all);
  const Eigen::MatrixXd proj = LinearProjection::fit(reps, 2).apply(reps);
  std::vector<ScatterPoint> out;
  out.reserve(all.size());
  for (Eigen::Index i = 0; i < proj.rows(); ++i)
    out.push_back({proj(i, 0), proj.cols() > 1 ? proj(i, 1) : 0.0, static_cast<std::size_t>(i) < clean.size() ? 0 : 1});
  return out;
}

// Distance between the class centroids divided by the pooled standard
// deviation (root mean squared distance to the own-class centroid).
inline double centroid_separation(const std::vector<ScatterPoint>& pts) {
  double cx[2] = {0, 0}, cy[2] = {0, 0};
  std::size_t n[2] = {0, 0};
  for (const auto& p : pts) {
    cx[p.label] += p.x;
    cy[p.label] += p.y;
    ++n[p.label];
  }
  if (!n[0] || !n[1]) throw Error("centroid_separation needs both classes");
  for (int c = 0; c < 2; ++c) {
    cx[c] /= static_cast<double>(n[c]);
    cy[c] /= static_cast<double>(n[c]);
  }
  double ss = 0;
  for (const auto& p : pts) ss += std::pow(p.x - cx[p.label], 2) + std::pow(p.y - cy[p.label], 2);
  const double pooled = std::sqrt(ss / static_cast<double>(pts.size()));
  const double dist = std::hypot(cx[0] - cx[1], cy[0] - cy[1]);
  return pooled > 0 ? dist / pooled : INFINITY;
}

// Trains one specific detector per size n on the first n normal and first n
// adversarial texts, and reports its accuracy on `eval`.
inline std::vector<std::pair<std::size_t, double>> learning_curve(
    const std::vector<std::string>& normal_pool, const std::vector<std::string>& adversarial_pool,
    const std::vector<std::size_t>& sizes, const LabeledTexts& eval, std::shared_ptr<const DetectorEncoder> encoder,
    const DetectorConfig& config) {
  std::vector<std::pair<std::size_t, double>> out;
  for (auto n : sizes) {
    if (n == 0) throw Error("learning_curve: size 0 cannot train a detector");
    if (n > normal_pool.size() || n > adversarial_pool.size())
      throw Error("learning_curve: pool smaller than " + std::to_string(n));
    const std::vector<std::string> normal(normal_pool.begin(), normal_pool.begin() + static_cast<std::ptrdiff_t>(n));
    const std::vector<std::string> adv(adversarial_pool.begin(),
                                       adversarial_pool.begin() + static_cast<std::ptrdiff_t>(n));
    const auto model = train_detector(normal, adv, encoder, config);
    out.emplace_back(n, evaluate_detector(model, eval.texts, eval.labels).accuracy);
  }
  return out;
}

}  // namespace textshield::harness

#endif  // TEXTSHIELD_HARNESS_ANALYSIS_HPP_
