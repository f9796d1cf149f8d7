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

// Core types, records, the victim classifier, metrics and constraints.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "test_support.hpp"
#include "textshield/augment.hpp"
#include "textshield/classifier.hpp"
#include "textshield/constraints.hpp"
#include "textshield/dataset_io.hpp"
#include "textshield/distance.hpp"
#include "textshield/endpoint.hpp"
#include "textshield/language_model.hpp"
#include "textshield/records.hpp"
#include "textshield/rng.hpp"
#include "textshield/transforms.hpp"

using namespace textshield;
using namespace textshield::testing;

namespace {

// Full-matrix edit distance, written independently of the library's
// two-row version.
std::size_t levenshtein_oracle(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
  return d[a.size()][b.size()];
}

double jaccard_oracle(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end()), uni = sa;
  uni.insert(sb.begin(), sb.end());
  std::size_t inter = 0;
  for (const auto& w : uni) inter += sa.count(w) && sb.count(w);
  return static_cast<double>(inter) / static_cast<double>(uni.size());
}

std::string join(const std::vector<std::string>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + w[i];
  return s;
}

ExperimentRecord sample_record(const std::string& name, std::uint64_t seed) {
  ExperimentRecord r;
  r.name = name;
  r.config_digest = "abc123";
  r.seed = seed;
  AttackOutcome o;
  o.example_id = "e0";
  o.status = AttackStatus::success;
  o.premise = "a premise";
  o.gold_label = "positive";
  o.original_text = "a good movie";
  o.final_text = "a good movie";
  o.queries = 7;
  o.detector_queries = 1;
  o.constraints.entries.push_back({metric::kLevenshtein, 1.0, 30.0, true, false});
  o.constraints.entries.push_back({metric::kSemanticSimilarity, std::nullopt, 0.4, true, true});
  o.trace.push_back({EditOp::delete_char, 1, 2, ""});
  r.per_example.push_back(o);
  AttackOutcome skipped;
  skipped.example_id = "e1";
  skipped.status = AttackStatus::skipped_wrong_prediction;
  skipped.gold_label = "negative";
  skipped.original_text = skipped.final_text = "bad";
  skipped.queries = 1;
  r.per_example.push_back(skipped);
  r.metrics = compute_metrics(r.per_example);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// core

TEST(Rng, EqualSeedAndPathGiveEqualFirstHundredDraws) {
  RngStream a(42, {1, 2, 3}), b(42, {1, 2, 3}), c(42, {1, 2, 4});
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs |= x != c.next_u64();
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(RngStream(42).child(7).child(9).next_u64(), RngStream(42, {7, 9}).next_u64());
}

TEST(Rng, UniformIntStaysInRange) {
  RngStream r(5);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = r.uniform_int(7);
    ASSERT_LT(v, 7u);
    ++hist[v];
  }
  for (int h : hist) EXPECT_GT(h, 800);
}

TEST(Records, EmptySequenceIsHeaderOnly) {
  TempDir dir("rec");
  write_records({}, dir.path / "r.jsonl");
  std::ifstream in(dir.path / "r.jsonl");
  std::string content((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(std::count(content.begin(), content.end(), '\n'), 1);
  EXPECT_TRUE(read_records(dir.path / "r.jsonl").empty());
}

TEST(Records, RoundTripPreservesSeedDigestAndOrder) {
  TempDir dir("rec");
  const std::vector<ExperimentRecord> recs{sample_record("zeta", 7), sample_record("alpha", 3)};
  write_records(recs, dir.path / "r.jsonl");
  const auto back = read_records(dir.path / "r.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].seed, 7u);
  EXPECT_EQ(back[0].config_digest, "abc123");
  EXPECT_EQ(back[0].name, "zeta");
  EXPECT_EQ(back[1].name, "alpha");
  EXPECT_EQ(back, recs);
  EXPECT_EQ(serialize_records(back), serialize_records(recs));
}

TEST(Records, RejectsIncompatibleVersion) {
  TempDir dir("rec");
  std::ofstream(dir.path / "r.jsonl") << "{\"version\":99,\"kind\":\"textshield-records\",\"count\":0}\n";
  EXPECT_THROW(read_records(dir.path / "r.jsonl"), IncompatibleVersion);
}

TEST(Records, MetricsRecomputeExactly) {
  const auto r = sample_record("x", 1);
  EXPECT_TRUE(r.consistent());
  auto broken = r;
  broken.metrics.successes += 1;
  EXPECT_FALSE(broken.consistent());
}

TEST(Dataset, TwoLineTsv) {
  TempDir dir("ds");
  std::ofstream(dir.path / "mini.tsv") << "great movie\tpos\nbad movie\tneg\n";
  const auto ds = load_dataset(dir.path / "mini.tsv");
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.label_set, (std::vector<std::string>{"pos", "neg"}));
  EXPECT_EQ(ds.split, Split::train);
}

TEST(Dataset, NineThousandRowTrainFile) {
  TempDir dir("ds");
  {
    std::ofstream out(dir.path / "mr_train.tsv");
    for (int i = 0; i < 9000; ++i) out << "text number " << i << '\t' << (i % 2 ? "pos" : "neg") << '\n';
  }
  const auto ds = load_dataset(dir.path / "mr_train.tsv");
  EXPECT_EQ(ds.split, Split::train);
  EXPECT_EQ(ds.size(), 9000u);
}

TEST(Dataset, MissingLabelColumnReportsLine) {
  TempDir dir("ds");
  std::ofstream(dir.path / "bad.tsv") << "fine\tpos\nno label here\n";
  try {
    load_dataset(dir.path / "bad.tsv");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
}

TEST(Dataset, NliRowsKeepThePremise) {
  TempDir dir("ds");
  std::ofstream(dir.path / "nli_test.tsv") << "a man sleeps\tsomeone rests\tentailment\n";
  const auto ds = load_dataset(dir.path / "nli_test.tsv");
  EXPECT_EQ(ds.split, Split::test);
  ASSERT_TRUE(ds.examples[0].premise);
  EXPECT_EQ(*ds.examples[0].premise, "a man sleeps");
  EXPECT_EQ(ds.examples[0].text, "someone rests");
}

TEST(Trace, ReplayAppliesEveryOp) {
  const std::vector<CandidateEdit> trace{{EditOp::substitute_word, 1, 0, "fine"},
                                         {EditOp::insert_char, 0, 1, "x"},
                                         {EditOp::swap_adjacent, 2, 0, ""},
                                         {EditOp::delete_char, 1, 0, ""},
                                         {EditOp::substitute_char, 1, 0, "j"}};
  EXPECT_EQ(replay_trace("a good movie", trace), "ax jne omvie");
  EXPECT_EQ(replay_trace("a b", {{EditOp::replace_text, 0, 0, "c d e"}}), "c d e");
}

// ---------------------------------------------------------------------------
// victim

TEST(Classifier, SeparableToySetReachesFullTrainAccuracy) {
  std::vector<std::pair<std::string, std::string>> rows;
  const std::vector<std::string> fillers{"the", "a", "this", "that", "one", "its", "our", "my"};
  for (std::size_t i = 0; i < 8; ++i) {
    rows.push_back({fillers[i] + " film is good", "positive"});
    rows.push_back({fillers[i] + " film is bad", "negative"});
  }
  const auto ds = dataset_of(rows);
  const auto model = train_classifier(ds, TrainConfig{});
  EXPECT_EQ(accuracy(model, ds), 1.0);
}

TEST(Classifier, EmptyDatasetIsAnError) {
  Dataset empty;
  empty.label_set = kLabels;
  EXPECT_THROW(train_classifier(empty, TrainConfig{}), Error);
}

TEST(Classifier, SaveLoadPreservesPredictions) {
  const auto ds = dataset_of({{"good fun", "positive"}, {"bad dull", "negative"}, {"good", "positive"}});
  const auto model = train_classifier(ds, TrainConfig{});
  TempDir dir("clf");
  model.save(dir.path / "m.json");
  const auto back = ClassifierModel::load(dir.path / "m.json");
  for (const auto& t : {"good fun", "bad", "unseen words"}) EXPECT_EQ(model.predict({std::nullopt, t}), back.predict({std::nullopt, t}));
}

class EndpointTest : public ::testing::Test {
 protected:
  void SetUp() override {
    model_ = std::make_shared<const ClassifierModel>(train_classifier(
        dataset_of({{"good fun film", "positive"}, {"bad dull film", "negative"}, {"great fun", "positive"},
                    {"awful dull", "negative"}}),
        TrainConfig{}));
  }
  std::shared_ptr<const ClassifierModel> model_;
};

TEST_F(EndpointTest, SameInputTwiceIsIdenticalAndCountsTwo) {
  ClassifierEndpoint ep(model_);
  const Query q{std::nullopt, "good film"};
  EXPECT_EQ(ep.query(q), ep.query(q));
  EXPECT_EQ(ep.query_count(), 2u);
}

TEST_F(EndpointTest, LabelModeIsArgmaxOfScoreMode) {
  ClassifierEndpoint scores(model_), labels(model_, OutputMode::label);
  std::mt19937_64 g(3);
  const std::vector<std::string> vocab{"good", "bad", "fun", "dull", "film", "great", "awful", "zzz"};
  for (int i = 0; i < 200; ++i) {
    std::string t;
    for (int k = 0; k < 1 + static_cast<int>(g() % 5); ++k) t += vocab[g() % vocab.size()] + " ";
    const Query q{std::nullopt, t};
    const auto s = scores.query(q);
    EXPECT_EQ(labels.query(q), one_hot(s.size(), argmax(s)));
  }
  EXPECT_EQ(one_hot(2, argmax({0.7, 0.3})), (ScoreVector{1.0, 0.0}));
}

TEST(Endpoint, NliScoreVariesOnlyWithHypothesis) {
  Dataset ds;
  ds.name = "nli";
  ds.label_set = {"entailment", "contradiction"};
  ds.examples = {{"0", "a man sleeps", "someone rests", "entailment"},
                 {"1", "a man sleeps", "someone runs", "contradiction"},
                 {"2", "a dog barks", "an animal rests", "contradiction"},
                 {"3", "a dog barks", "an animal makes noise", "entailment"}};
  auto model = std::make_shared<const ClassifierModel>(train_classifier(ds, TrainConfig{}));
  ClassifierEndpoint ep(model);
  const std::string premise = "a man sleeps";
  for (const auto& h : {"someone rests", "someone runs", "noise"}) {
    const Query q{premise, h};
    EXPECT_EQ(ep.query(q), model->predict(q));
  }
  EXPECT_NE(ep.query({premise, "someone rests"}), ep.query({premise, "someone runs"}));
}

TEST(Augment, DoublesSizeWithSuffixedIds) {
  std::vector<std::pair<std::string, std::string>> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({"text " + std::to_string(i), i % 2 ? "positive" : "negative"});
  const auto ds = dataset_of(rows);
  const auto aug = augment_with_transform(ds, identity_transform(), 3);
  ASSERT_EQ(aug.size(), 20u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(aug.examples[i], ds.examples[i]);
    EXPECT_EQ(aug.examples[10 + i].id, ds.examples[i].id + "#aug");
    EXPECT_EQ(aug.examples[10 + i].text, ds.examples[i].text);
    EXPECT_EQ(aug.examples[10 + i].gold_label, ds.examples[i].gold_label);
  }
}

TEST(Augment, SynonymCopiesDifferInAtMostAQuarterOfWords) {
  auto lex = std::make_shared<SynonymLexicon>();
  for (const auto& [w, s] : std::vector<std::pair<std::string, std::string>>{
           {"good", "fine"}, {"film", "movie"}, {"plot", "story"}, {"actor", "performer"}, {"long", "lengthy"}})
    lex->add(w, {s});
  TransformConfig tc;
  tc.synonyms = lex;
  const Transformer t(tc);
  const auto ds = dataset_of({{"good film with a long plot", "positive"},
                              {"the actor was good in a long film", "positive"},
                              {"plot", "negative"}});
  const auto aug = augment_with_transform(ds, t.as_function(), 3);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto a = tokenize(ds.examples[i].text), b = tokenize(aug.examples[ds.size() + i].text);
    ASSERT_EQ(a.size(), b.size());
    std::size_t diff = 0;
    for (std::size_t k = 0; k < a.size(); ++k) diff += a[k] != b[k];
    EXPECT_LE(diff, static_cast<std::size_t>(std::ceil(0.25 * static_cast<double>(a.size()))));
  }
}

// ---------------------------------------------------------------------------
// metrics

TEST(Metrics, CountsTenCorrectFourSuccessful) {
  std::vector<AttackOutcome> outs(10);
  for (std::size_t i = 0; i < 10; ++i) {
    outs[i].status = i < 4 ? AttackStatus::success : AttackStatus::failed;
    outs[i].queries = 5;
  }
  const auto m = compute_metrics(outs);
  EXPECT_DOUBLE_EQ(m.attack_success_rate, 0.4);
  EXPECT_DOUBLE_EQ(m.after_attack_accuracy, 0.6);
  EXPECT_DOUBLE_EQ(m.original_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(m.avg_queries, 5.0);
}

TEST(Metrics, SkippedExamplesLeaveTheSuccessDenominator) {
  std::vector<AttackOutcome> outs(4);
  outs[0].status = AttackStatus::success;
  outs[1].status = AttackStatus::failed;
  outs[2].status = AttackStatus::skipped_wrong_prediction;
  outs[3].status = AttackStatus::skipped_unavailable;
  const auto m = compute_metrics(outs);
  EXPECT_EQ(m.attempted, 2u);
  EXPECT_DOUBLE_EQ(m.attack_success_rate, 0.5);
  EXPECT_DOUBLE_EQ(m.original_accuracy, 0.75);
  EXPECT_DOUBLE_EQ(m.after_attack_accuracy, 0.5);
}

TEST(Metrics, UnbreakableVictimKeepsOriginalAccuracy) {
  auto victim = constant_victim({0.0, 1.0});
  auto lex = std::make_shared<SynonymLexicon>();
  lex->add("good", {"fine"});
  AttackSpec spec;
  spec.synonyms = lex;
  const auto ds = dataset_of({{"a good day", "positive"}, {"good", "positive"}});
  const auto rec = run_attack(Attack(spec), *victim, ds, 1);
  EXPECT_DOUBLE_EQ(rec.metrics.attack_success_rate, 0.0);
  EXPECT_DOUBLE_EQ(rec.metrics.after_attack_accuracy, rec.metrics.original_accuracy);
}

// ---------------------------------------------------------------------------
// constraints

TEST(Cosine, Examples) {
  EXPECT_DOUBLE_EQ(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(std::vector<double>{2, 0}, std::vector<double>{1, 0}), 1.0);
  EXPECT_NEAR(cosine_similarity(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6}), 0.9746, 1e-4);
  EXPECT_THROW(cosine_similarity(std::vector<double>{0, 0}, std::vector<double>{1, 0}), Error);
}

TEST(Cosine, MatchesDirectFormulaAndIsScaleInvariant) {
  std::mt19937_64 g(11);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> alpha(0.01, 100);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> x(8), y(8);
    for (auto& v : x) v = n(g);
    for (auto& v : y) v = n(g);
    const double direct = std::inner_product(x.begin(), x.end(), y.begin(), 0.0) /
                          std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0) *
                                    std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
    EXPECT_NEAR(cosine_similarity(x, y), direct, 1e-9);
    auto ax = x;
    const double a = alpha(g);
    for (auto& v : ax) v *= a;
    EXPECT_NEAR(cosine_similarity(ax, y), cosine_similarity(x, y), 1e-9);
  }
}

TEST(Jaccard, Examples) {
  EXPECT_DOUBLE_EQ(jaccard("the cat sat", "the cat sat"), 1.0);
  EXPECT_DOUBLE_EQ(jaccard("red green", "blue yellow"), 0.0);
  EXPECT_DOUBLE_EQ(jaccard("the cat sat", "the cat ran"), 0.5);
}

TEST(Jaccard, MatchesSetEnumerationAndIsSymmetric) {
  std::mt19937_64 g(12);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> a(1 + g() % 6), b(1 + g() % 6);
    for (auto& w : a) w = random_word(g, 1, 2, "abc");
    for (auto& w : b) w = random_word(g, 1, 2, "abc");
    EXPECT_EQ(jaccard(join(a), join(b)), jaccard_oracle(a, b));
    EXPECT_EQ(jaccard(join(a), join(b)), jaccard(join(b), join(a)));
  }
}

TEST(Levenshtein, Examples) {
  EXPECT_EQ(levenshtein("same", "same"), 0u);
  EXPECT_EQ(levenshtein("", "abc"), 3u);
  EXPECT_EQ(levenshtein("kitten", "sitting"), 3u);
}

TEST(Levenshtein, MatchesDpOracleSymmetryAndTriangle) {
  std::mt19937_64 g(13);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_word(g, 0, 12), b = random_word(g, 0, 12), c = random_word(g, 0, 12);
    EXPECT_EQ(levenshtein(a, b), levenshtein_oracle(a, b));
    EXPECT_EQ(levenshtein(a, b), levenshtein(b, a));
    EXPECT_LE(levenshtein(a, c), levenshtein(a, b) + levenshtein(b, c));
  }
}

TEST(PerturbationRate, DirectCounts) {
  EXPECT_DOUBLE_EQ(perturbation_rate("a b c", "a b c"), 0.0);
  std::vector<std::string> w(20, "w");
  auto v = w;
  v[3] = "x";
  EXPECT_DOUBLE_EQ(perturbation_rate(join(w), join(v)), 0.05);
  std::vector<std::string> w21(21, "w");
  auto v21 = w21;
  v21[0] = "x";
  EXPECT_NEAR(perturbation_rate(join(w21), join(v21)), 0.048, 5e-4);
}

TEST(Grammar, OutOfLexiconTokensCountAsErrors) {
  FrequencyTable f;
  f.add_text("the movie was great");
  const LexiconGrammarChecker checker{KnownWords(f)};
  EXPECT_EQ(grammar_error_increase(&checker, "the movie was great", "the movie was great"), 0);
  EXPECT_EQ(grammar_error_increase(&checker, "the movie was great", "the movie was graet"), 1);
  EXPECT_EQ(grammar_error_increase(&checker, "the movie was graet", "the movie was great"), -1);
  EXPECT_EQ(grammar_error_increase(nullptr, "a", "b"), std::nullopt);
}

TEST(Perplexity, UniformUnigramOverVTokensIsV) {
  NgramLanguageModel lm(1);
  for (int i = 0; i < 37; ++i) lm.add_vocabulary("w" + std::to_string(i));
  EXPECT_NEAR(lm.perplexity("w5"), 37.0, 1e-9);
}

TEST(Perplexity, InDomainBeatsShuffledAndEmptyThrows) {
  NgramLanguageModel lm(2);
  for (int i = 0; i < 20; ++i) lm.observe("the film was a quiet and moving story");
  EXPECT_LT(lm.perplexity("the film was a quiet and moving story"), lm.perplexity("story moving and quiet a was film the"));
  EXPECT_THROW(lm.perplexity(""), Error);
  EXPECT_THROW(perplexity(nullptr, "x"), Error);
}

namespace {

// An 11-word sentence and a 2-substitution variant: perturbation rate 2/11.
const std::string kOrig = "the cast is good and the plot of this film works";
const std::string kAdv = "the cast is fine and the plot of this movie works";

ConstraintSet table_row_profile(double sim, double degree) {
  FrequencyTable f;
  f.add_text(kOrig);
  f.add_text(kAdv);
  auto set = ConstraintSet::word_profile(
      std::make_shared<ScriptedEncoder>(std::map<std::string, std::vector<double>>{{kOrig, {1.0, 0.0}},
                                                                                   {kAdv, at_similarity(sim)}}),
      std::make_shared<LexiconGrammarChecker>(KnownWords(f)));
  return set.with_anomaly(std::make_shared<ScriptedScorer>([degree](const std::string&) { return degree; }));
}

}  // namespace

TEST(Check, IdentityCandidatePasses) {
  const auto set = table_row_profile(0.866, 0.1);
  EXPECT_TRUE(check(set, example(kOrig), kOrig).passed());
}

TEST(Check, ClassicConstraintsPassWhileAnomalyFails) {
  const auto set = table_row_profile(0.866, 0.929);
  const auto r = check(set, example(kOrig), kAdv);
  EXPECT_NEAR(*r.find(metric::kSemanticSimilarity)->value, 0.866, 1e-9);
  EXPECT_NEAR(*r.find(metric::kPerturbationRate)->value, 2.0 / 11.0, 1e-12);
  EXPECT_NEAR(*r.find(metric::kPerturbationRate)->value, 0.182, 5e-4);
  EXPECT_EQ(*r.find(metric::kGrammarIncrease)->value, 0.0);
  EXPECT_TRUE(r.find(metric::kSemanticSimilarity)->passed);
  EXPECT_TRUE(r.find(metric::kPerturbationRate)->passed);
  EXPECT_TRUE(r.find(metric::kGrammarIncrease)->passed);
  EXPECT_FALSE(r.find(metric::kDegreeOfAnomaly)->passed);
  EXPECT_FALSE(r.passed());
  EXPECT_TRUE(check(set, example(kOrig), kAdv, CheckScope::without_anomaly).passed());
}

TEST(Check, SentenceCandidateBelowSimilarityFloorFails) {
  const std::string para = "this film works and the cast is fine";
  const auto set = ConstraintSet::sentence_profile(std::make_shared<ScriptedEncoder>(
      std::map<std::string, std::vector<double>>{{kOrig, {1.0, 0.0}}, {para, at_similarity(0.35)}}));
  EXPECT_FALSE(check(set, example(kOrig), para).passed());
}

TEST(Check, OverallPassIsTheConjunctionOfMetricCalls) {
  std::mt19937_64 g(17);
  FrequencyTable f;
  f.add_text("a b c d e");
  const auto grammar = std::make_shared<LexiconGrammarChecker>(KnownWords(f));
  for (int i = 0; i < 300; ++i) {
    std::vector<std::string> o(3 + g() % 4), c;
    for (auto& w : o) w = random_word(g, 1, 1, "abcdef");
    c = o;
    for (auto& w : c)
      if (g() % 3 == 0) w = random_word(g, 1, 1, "abcdef");
    const std::string os = join(o), cs = join(c);
    const double sim = std::uniform_real_distribution<double>(0.2, 1.0)(g);
    const double deg = std::uniform_real_distribution<double>(0.0, 1.0)(g);
    ConstraintSet set;
    set.min_semantic_similarity = 0.4;
    set.max_perturbation_rate = 0.4;
    set.max_grammar_error_increase = 0;
    set.max_levenshtein = 3;
    set.encoder = std::make_shared<ScriptedEncoder>(
        std::map<std::string, std::vector<double>>{{os, {1.0, 0.0}}, {cs, os == cs ? std::vector<double>{1.0, 0.0} : at_similarity(sim)}});
    set.grammar = grammar;
    set = set.with_anomaly(std::make_shared<ScriptedScorer>([deg](const std::string&) { return deg; }));
    const bool expected = semantic_similarity(*set.encoder, os, cs) > 0.4 && perturbation_rate(os, cs) < 0.4 &&
                          *grammar_error_increase(grammar.get(), os, cs) <= 0 && levenshtein(os, cs) <= 3 && deg < 0.5;
    EXPECT_EQ(check(set, example(os), cs).passed(), expected);
  }
}
