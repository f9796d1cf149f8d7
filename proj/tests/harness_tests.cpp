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

// The anomaly detector, analysis helpers, configuration, the stage cache and
// a miniature end-to-end pipeline.

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "test_support.hpp"
#include "textshield/detector.hpp"
#include "textshield/harness/analysis.hpp"
#include "textshield/harness/config.hpp"
#include "textshield/harness/desk_corpus.hpp"
#include "textshield/harness/pipeline.hpp"
#include "textshield/harness/report.hpp"

using namespace textshield;
using namespace textshield::harness;
using textshield::testing::TempDir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const std::vector<std::string>& clean_texts() {
  static const std::vector<std::string> t = [] {
    DeskCorpusConfig c;
    c.train_size = 120;
    c.test_size = 40;
    const auto corpus = generate_desk_corpus(c);
    std::vector<std::string> out;
    for (const auto& ex : corpus.train.examples) out.push_back(ex.text);
    for (const auto& ex : corpus.test.examples) out.push_back(ex.text);
    return out;
  }();
  return t;
}

// Character-garbled copies: every word longer than three letters gets its
// middle letters reversed and an extra 'q'.
std::string garble(const std::string& text) {
  auto toks = tokenize(text);
  for (auto& w : toks)
    if (w.size() > 3) {
      std::reverse(w.begin() + 1, w.end() - 1);
      w.insert(1, "q");
    }
  return detokenize(toks);
}

std::shared_ptr<const DetectorEncoder> encoder_for(std::size_t n_reference) {
  const auto& t = clean_texts();
  return std::make_shared<DetectorEncoder>(std::vector<std::string>(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(n_reference)),
                                           std::vector<std::string>{}, 256);
}

struct TrainedDetector {
  std::vector<std::string> normal_train, adv_train, normal_eval, adv_eval;
  std::shared_ptr<DetectorModel> model;
};

const TrainedDetector& trained() {
  static const TrainedDetector d = [] {
    TrainedDetector r;
    const auto& t = clean_texts();
    for (std::size_t i = 0; i < t.size(); ++i) {
      (i < 120 ? r.normal_train : r.normal_eval).push_back(t[i]);
      (i < 120 ? r.adv_train : r.adv_eval).push_back(garble(t[i]));
    }
    DetectorConfig cfg;
    cfg.buckets = 256;
    r.model = std::make_shared<DetectorModel>(train_detector(r.normal_train, r.adv_train, encoder_for(120), cfg));
    return r;
  }();
  return d;
}

// A detector whose head ignores the input: every degree equals p.
DetectorModel constant_detector(double p) {
  DetectorConfig cfg;
  cfg.buckets = 16;
  cfg.hidden = 4;
  DetectorModel m(encoder_for(10), cfg);
  auto j = m.to_json();
  j["w_head"] = std::vector<double>(2 * cfg.hidden, 0.0);
  j["b_head"] = std::vector<double>{std::log(1.0 - p), std::log(p)};
  TempDir dir("det");
  std::ofstream(dir.path / "d.json") << j.dump();
  return DetectorModel::load(dir.path / "d.json");
}

}  // namespace

// ---------------------------------------------------------------------------
// detector

TEST(DetectorLoss, BinaryCrossEntropyValues) {
  EXPECT_NEAR(detector_loss(1, 0.5), std::log(2.0), 1e-12);
  EXPECT_NEAR(detector_loss(0, 0.5), std::log(2.0), 1e-12);
  EXPECT_NEAR(detector_loss(1, 0.9), -std::log(0.9), 1e-12);
  EXPECT_NEAR(detector_loss(0, 0.9), -std::log(0.1), 1e-12);
  EXPECT_TRUE(std::isfinite(detector_loss(1, 0.0)));
}

TEST(Detect, FlagFollowsTheThreshold) {
  const auto high = constant_detector(0.92), low = constant_detector(0.08);
  const auto a = detect(high, "any text");
  EXPECT_NEAR(a.degree, 0.92, 1e-12);
  EXPECT_TRUE(a.flag);
  const auto b = detect(low, "any text");
  EXPECT_NEAR(b.degree, 0.08, 1e-12);
  EXPECT_FALSE(b.flag);
  EXPECT_FALSE(detect(high, "any text", 0.95).flag);
  EXPECT_THROW(detect(high, "x", 1.0), Error);
  EXPECT_THROW(high.degree(""), Error);
}

TEST(Detect, FlagIsMonotoneInThreshold) {
  const auto& d = trained();
  for (const auto& t : d.adv_eval) {
    bool prev = true;
    for (double th = 0.05; th < 1.0; th += 0.05) {
      const bool f = detect(*d.model, t, th).flag;
      EXPECT_FALSE(f && !prev) << t;
      prev = f;
    }
  }
}

TEST(DetectorMetricsTest, ConstantDetectors) {
  const std::vector<std::string> texts{"a", "b", "c", "d"};
  const std::vector<int> labels{0, 0, 1, 1};
  const auto none = evaluate_detector(constant_detector(0.01), texts, labels);
  EXPECT_DOUBLE_EQ(none.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(none.precision, 0.0);
  EXPECT_DOUBLE_EQ(none.recall, 0.0);
  EXPECT_DOUBLE_EQ(none.f1, 0.0);
  const auto all = evaluate_detector(constant_detector(0.99), texts, labels);
  EXPECT_DOUBLE_EQ(all.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(all.precision, 0.5);
  EXPECT_DOUBLE_EQ(all.recall, 1.0);
  EXPECT_NEAR(all.f1, 2.0 / 3.0, 1e-12);
  EXPECT_THROW(evaluate_detector(constant_detector(0.5), texts, {0, 0, 0, 0}), Error);
}

TEST(DetectorMetricsTest, MatchesAConfusionCountOracle) {
  const auto& d = trained();
  std::vector<std::string> texts = d.normal_eval;
  std::vector<int> labels(texts.size(), 0);
  texts.insert(texts.end(), d.adv_eval.begin(), d.adv_eval.end());
  labels.resize(texts.size(), 1);
  int tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const bool f = d.model->probabilities(texts[i])[1] >= 0.5;
    tp += f && labels[i];
    fp += f && !labels[i];
    tn += !f && !labels[i];
    fn += !f && labels[i];
  }
  const auto m = evaluate_detector(*d.model, texts, labels);
  EXPECT_DOUBLE_EQ(m.accuracy, static_cast<double>(tp + tn) / static_cast<double>(texts.size()));
  EXPECT_DOUBLE_EQ(m.recall, static_cast<double>(tp) / (tp + fn));
  EXPECT_GT(m.accuracy, 0.9);
}

TEST(Detector, TrainingLowersTheLoss) {
  const auto& h = trained().model->loss_history();
  ASSERT_EQ(h.size(), 12u);
  EXPECT_LT(h.back(), h.front());
}

TEST(Detector, DegreeIsDeterministicAndSoftmaxSumsToOne) {
  const auto& d = trained();
  for (const auto& t : d.adv_eval) {
    const auto p = d.model->probabilities(t);
    EXPECT_NEAR(p[0] + p[1], 1.0, 1e-12);
    EXPECT_EQ(d.model->degree(t), d.model->degree(t));
    EXPECT_GE(p[1], 0.0);
    EXPECT_LE(p[1], 1.0);
  }
}

TEST(Detector, RepresentationShape) {
  const auto& d = trained();
  EXPECT_EQ(d.model->representation("a film").size(), 32u);
  const auto m = export_representations(*d.model, d.normal_eval);
  EXPECT_EQ(m.rows(), static_cast<Eigen::Index>(d.normal_eval.size()));
  EXPECT_EQ(m.cols(), 32);
}

TEST(Detector, SaveLoadPreservesDegreesAndProvenance) {
  auto model = *trained().model;
  model.mode = DetectorMode::specific;
  model.provenance = {{"desk", "char_edit", 120}};
  TempDir dir("det");
  model.save(dir.path / "d.json");
  const auto back = DetectorModel::load(dir.path / "d.json");
  EXPECT_EQ(back.mode, DetectorMode::specific);
  ASSERT_EQ(back.provenance.size(), 1u);
  EXPECT_EQ(back.provenance[0].attack_id, "char_edit");
  for (const auto& t : trained().adv_eval) EXPECT_EQ(back.degree(t), model.degree(t));
}

TEST(Detector, TrainingRejectsEmptyClassesAndOddBatches) {
  DetectorConfig cfg;
  EXPECT_THROW(train_detector({"a"}, {}, encoder_for(5), cfg), Error);
  cfg.batch_size = 3;
  EXPECT_THROW(train_detector({"a"}, {"b"}, encoder_for(5), cfg), Error);
}

// ---------------------------------------------------------------------------
// analysis

TEST(Histogram, ConservesMassAndBinsEdges) {
  std::mt19937_64 g(31);
  std::vector<double> v(1000);
  for (auto& x : v) x = std::uniform_real_distribution<double>(0, 1)(g);
  v.push_back(1.0);
  v.push_back(0.0);
  const auto h = histogram(v);
  EXPECT_EQ(std::accumulate(h.begin(), h.end(), std::size_t{0}), v.size());
  EXPECT_EQ(histogram({0.05, 0.05})[0], 2u);
  EXPECT_EQ(histogram({1.0})[9], 1u);
  EXPECT_EQ(histogram({0.1})[1], 1u);
  EXPECT_THROW(histogram({1.5}), Error);
  EXPECT_DOUBLE_EQ(extreme_mass({3, 0, 0, 0, 0, 0, 0, 0, 0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(extreme_mass({1, 0, 0, 0, 2, 0, 0, 0, 0, 1}), 0.5);
}

TEST(LearningCurve, SizeZeroIsAnError) {
  const auto& d = trained();
  LabeledTexts eval;
  eval.add("a", 0);
  eval.add("b", 1);
  EXPECT_THROW(learning_curve(d.normal_train, d.adv_train, {0}, eval, encoder_for(10), DetectorConfig{}), Error);
  EXPECT_THROW(learning_curve(d.normal_train, d.adv_train, {10000}, eval, encoder_for(10), DetectorConfig{}), Error);
}

TEST(LearningCurve, OnePointPerSize) {
  const auto& d = trained();
  LabeledTexts eval;
  for (const auto& t : d.normal_eval) eval.add(t, 0);
  for (const auto& t : d.adv_eval) eval.add(t, 1);
  DetectorConfig cfg;
  cfg.buckets = 256;
  const auto pts = learning_curve(d.normal_train, d.adv_train, {4, 40}, eval, encoder_for(120), cfg);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].first, 4u);
  EXPECT_EQ(pts[1].first, 40u);
  for (const auto& [n, acc] : pts) {
    EXPECT_GE(acc, 0.0);
    EXPECT_LE(acc, 1.0);
  }
}

TEST(Projection, CardinalityDeterminismAndSeparation) {
  const auto& d = trained();
  const auto a = projection_scatter(*d.model, d.normal_eval, d.adv_eval);
  const auto b = projection_scatter(*d.model, d.normal_eval, d.adv_eval);
  ASSERT_EQ(a.size(), d.normal_eval.size() + d.adv_eval.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].x, b[i].x);
    EXPECT_EQ(a[i].y, b[i].y);
    EXPECT_EQ(a[i].label, i < d.normal_eval.size() ? 0 : 1);
  }
  EXPECT_GT(centroid_separation(a), 1.0);
}

TEST(Projection, FirstComponentFollowsTheWidestAxis) {
  Eigen::MatrixXd data(6, 3);
  data << -3, 0.1, 0, -2, -0.1, 0, -1, 0.2, 0, 1, 0.2, 0, 2, -0.1, 0, 3, 0.1, 0;  // x and y uncorrelated
  const auto p = LinearProjection::fit(data, 2);
  EXPECT_NEAR(std::abs(p.components(0, 0)), 1.0, 1e-6);
  EXPECT_GT(p.components(0, 0), 0.0);
  EXPECT_NEAR(p.components.col(0).dot(p.components.col(1)), 0.0, 1e-9);
  const auto out = p.apply(data);
  EXPECT_NEAR(out.col(0).mean(), 0.0, 1e-12);
}

// ---------------------------------------------------------------------------
// configuration and cache

TEST(Config, MergeKeepsUnsetKeys) {
  PipelineConfig c;
  c.merge(nlohmann::json::parse(R"({"seed": 11, "defense": {"threshold": 0.7}, "attack": {"adaptive": {"k": 3}}})"));
  EXPECT_EQ(c.seed, 11u);
  EXPECT_DOUBLE_EQ(c.defense_threshold, 0.7);
  EXPECT_EQ(c.adaptive_k, 3u);
  EXPECT_EQ(c.repeats, 3u);
  EXPECT_EQ(c.detector.hidden, 32u);
  EXPECT_EQ(c.defense_transform, TransformKind::synonym_substitution);
}

TEST(Config, RoundTripKeepsTheDigest) {
  PipelineConfig a;
  a.seed = 99;
  a.attack_budget = 40;
  PipelineConfig b;
  b.merge(nlohmann::json::parse(a.to_json().dump()));
  EXPECT_EQ(a.digest(), b.digest());
  b.seed = 98;
  EXPECT_NE(a.digest(), b.digest());
}

TEST(Config, InvalidValuesAreRejected) {
  PipelineConfig c;
  EXPECT_THROW(c.merge(nlohmann::json::parse(R"({"attack": {"adaptive": {"k": 0}}})")), Error);
  PipelineConfig d;
  EXPECT_THROW(d.merge(nlohmann::json::parse(R"({"defense": {"threshold": 1.5}})")), Error);
  PipelineConfig e;
  EXPECT_THROW(e.merge(nlohmann::json::parse(R"({"attack": {"family": "telepathy"}})")), Error);
}

TEST(Cache, ComputesOncePerKey) {
  TempDir dir("cache");
  int computed = 0;
  auto compute = [&] { return ++computed * 10; };
  auto save = [](const int& v, const std::filesystem::path& p) { std::ofstream(p) << v; };
  auto load = [](const std::filesystem::path& p) {
    int v = 0;
    std::ifstream in(p);
    if (!(in >> v)) throw Error("bad entry");
    return v;
  };
  StageCache a(dir.path);
  EXPECT_EQ(a.get<int>("k", compute, save, load), 10);
  StageCache b(dir.path);
  EXPECT_EQ(b.get<int>("k", compute, save, load), 10);
  EXPECT_EQ(b.hits(), 1u);
  EXPECT_EQ(computed, 1);

  std::ofstream(dir.path / "k") << "garbage";
  StageCache c(dir.path);
  EXPECT_EQ(c.get<int>("k", compute, save, load), 20);
  EXPECT_EQ(c.hits(), 0u);

  StageCache none;
  EXPECT_EQ(none.get<int>("k", compute, save, load), 30);
  EXPECT_EQ(none.get<int>("k", compute, save, load), 40);
}

// ---------------------------------------------------------------------------
// report

TEST(Report, EmptyOrMissingDirectoryIsAnInputError) {
  TempDir dir("rep");
  EXPECT_THROW(load_report_inputs(dir.path), InputError);
  EXPECT_THROW(load_report_inputs(dir.path / "absent"), InputError);
}

TEST(Report, MeanSpreadUsesPopulationSd) {
  const auto m = mean_spread({1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(m.mean, 2.0);
  EXPECT_NEAR(m.sd, std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_EQ(mean_spread({}).n, 0u);
}

TEST(Report, CsvQuotesAndShapes) {
  Table t{{"a", "b"}, {{"1", "x,y"}, {"2", "say \"hi\""}}};
  EXPECT_EQ(t.csv(), "a,b\n1,\"x,y\"\n2,\"say \"\"hi\"\"\"\n");
  EXPECT_EQ(pct(0.9746), "97.5");
}

TEST(Report, SuccessSubset) {
  ExperimentRecord a, b;
  a.per_example.resize(2);
  b.per_example.resize(2);
  a.per_example[0].status = AttackStatus::success;
  b.per_example[0].status = AttackStatus::success;
  b.per_example[1].status = AttackStatus::success;
  EXPECT_TRUE(successes_subset(a, b));
  EXPECT_FALSE(successes_subset(b, a));
}

// ---------------------------------------------------------------------------
// miniature pipeline

namespace {

PipelineConfig mini_config() {
  PipelineConfig c;
  c.repeats = 1;
  c.detector_train_examples = 240;
  c.eval_per_class = 30;
  c.attack_examples = 16;
  c.curve_sizes = {5, 10};
  return c;
}

World mini_world() {
  DeskCorpusConfig dc;
  dc.train_size = 240;
  dc.test_size = 80;
  return build_world(generate_desk_corpus(dc));
}

}  // namespace

TEST(MiniPipeline, RunsEndToEndAndIsReproducible) {
  TempDir a("mini-a"), b("mini-b"), cache("mini-cache");
  Pipeline(mini_world(), mini_config(), std::nullopt).run_all(a.path);
  Pipeline second(mini_world(), mini_config(), cache.path);
  second.run_all(b.path);

  for (const char* f : {"records/pools.jsonl", "records/undefended.jsonl", "records/constrained.jsonl",
                        "records/after.jsonl", "records/during.jsonl", "records/framework.jsonl",
                        "records/adaptive.jsonl", "detection/scores.jsonl", "analysis/projection.jsonl"}) {
    ASSERT_TRUE(std::filesystem::exists(a.path / f)) << f;
    EXPECT_EQ(slurp(a.path / f), slurp(b.path / f)) << f;
  }

  // A warm cache reproduces the records.
  TempDir c("mini-c");
  Pipeline third(mini_world(), mini_config(), cache.path);
  third.run_all(c.path);
  EXPECT_GT(third.cache().hits(), 0u);
  EXPECT_EQ(slurp(a.path / "records/after.jsonl"), slurp(c.path / "records/after.jsonl"));

  const auto in = load_report_inputs(a.path);
  EXPECT_NE(in.find("undefended/char_edit"), nullptr);
  EXPECT_NE(in.find("framework/clean/r0"), nullptr);
  EXPECT_NE(in.find("after/none/synonym_substitution/noaug/r0"), nullptr);
  EXPECT_NE(in.detection_set("general/mixed"), nullptr);
  EXPECT_NE(in.detection_set("curve/char_edit/10"), nullptr);
  for (const auto& [name, r] : in.records) {
    EXPECT_TRUE(r.consistent()) << name;
    if (name.rfind("pool/", 0) != 0 && name.rfind("undefended/", 0) != 0) continue;
    for (const auto& o : r.per_example) EXPECT_EQ(replay_trace(o.original_text, o.trace), o.final_text) << name;
  }

  const auto files = write_report(in, a.path / "report");
  EXPECT_EQ(files.size(), 9u);
  for (const auto& f : files) {
    std::istringstream csv(slurp(a.path / "report" / f));
    std::string line;
    std::getline(csv, line);
    const auto cols = std::count(line.begin(), line.end(), ',');
    std::size_t rows = 0;
    while (std::getline(csv, line)) {
      ++rows;
      if (line.find('"') != std::string::npos) continue;
      EXPECT_EQ(std::count(line.begin(), line.end(), ','), cols) << f;
    }
    EXPECT_GT(rows, 0u) << f;
  }

  const auto trends = summarize_trends(in);
  EXPECT_TRUE(trends.specific_char_accuracy.has_value());
  EXPECT_TRUE(trends.framework_clean.has_value());
  EXPECT_EQ(trends.constraint_rates.size(), 4u);
  for (const auto& [f, ok] : trends.constraint_subset) EXPECT_TRUE(ok) << to_string(f);
}
