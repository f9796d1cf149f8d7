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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any fails. Criteria 3-11 run the full pipeline twice on the
// bundled desk corpus (no stage cache), which takes several minutes.
//
// Usage: acceptance [output_dir]   (default: ./acceptance_out)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <unistd.h>

#include "test_support.hpp"
#include "textshield/attacks.hpp"
#include "textshield/detector.hpp"
#include "textshield/distance.hpp"
#include "textshield/harness/desk_corpus.hpp"
#include "textshield/harness/pipeline.hpp"
#include "textshield/harness/report.hpp"

namespace fs = std::filesystem;
using namespace textshield;
using namespace textshield::harness;
using namespace textshield::testing;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// ---------------------------------------------------------------------------

std::size_t dp_levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
  return d[a.size()][b.size()];
}

void criterion_1() {
  std::mt19937_64 g(101);
  bool lev = true, jac = true, cos = true;
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_word(g, 0, 14), b = random_word(g, 0, 14);
    lev &= levenshtein(a, b) == dp_levenshtein(a, b);
  }
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> x(1 + g() % 6), y(1 + g() % 6);
    for (auto& w : x) w = random_word(g, 1, 2, "abc");
    for (auto& w : y) w = random_word(g, 1, 2, "abc");
    std::set<std::string> sx(x.begin(), x.end()), sy(y.begin(), y.end()), all = sx;
    all.insert(sy.begin(), sy.end());
    std::size_t both = 0;
    for (const auto& w : all) both += sx.count(w) && sy.count(w);
    std::string tx, ty;
    for (const auto& w : x) tx += w + " ";
    for (const auto& w : y) ty += w + " ";
    jac &= jaccard(tx, ty) == static_cast<double>(both) / static_cast<double>(all.size());
  }
  std::normal_distribution<double> n;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(6), y(6);
    for (auto& v : x) v = n(g);
    for (auto& v : y) v = n(g);
    double dot = 0, nx = 0, ny = 0;
    for (std::size_t k = 0; k < 6; ++k) {
      dot += x[k] * y[k];
      nx += x[k] * x[k];
      ny += y[k] * y[k];
    }
    cos &= std::abs(cosine_similarity(x, y) - dot / std::sqrt(nx * ny)) <= 1e-9;
  }
  const bool bce = std::abs(detector_loss(1, 0.5) - std::log(2.0)) <= 1e-12;
  report(1, lev && jac && cos && bce,
         std::string("metric oracles (levenshtein ") + (lev ? "ok" : "mismatch") + ", jaccard " +
             (jac ? "ok" : "mismatch") + ", cosine " + (cos ? "ok" : "mismatch") + ", bce(1,0.5)=ln2 " +
             (bce ? "ok" : "mismatch") + ")");
}

// ---------------------------------------------------------------------------

void criterion_2() {
  std::mt19937_64 g(202);
  const std::vector<std::string> vocab{"alpha", "beta", "gamma", "delta", "omega", "kappa"};
  std::size_t runs = 0, successes = 0, bad_verify = 0, bad_replay = 0, over_budget = 0, oracle_miss = 0;
  for (int trial = 0; trial < 400; ++trial) {
    auto lex = std::make_shared<SynonymLexicon>();
    for (const auto& w : vocab)
      if (g() % 3) lex->add(w, {vocab[g() % vocab.size()], vocab[g() % vocab.size()]});
    std::set<std::string> triggers{vocab[g() % vocab.size()], vocab[g() % vocab.size()]};
    auto victim = keyword_victim(triggers);
    Tokens words;
    for (std::size_t k = 0, n = 1 + g() % 4; k < n; ++k) words.push_back(vocab[g() % vocab.size()]);
    const auto ex = example(detokenize(words), "positive");

    AttackSpec spec;
    spec.family = trial % 2 ? AttackFamily::char_edit : AttackFamily::word_synonym;
    spec.synonyms = lex;
    spec.constraints = trial % 2 ? ConstraintSet::char_profile(4) : ConstraintSet{};
    if (trial % 4 == 1) spec.query_budget = 1 + g() % 10;
    RngStream rng(static_cast<std::uint64_t>(trial));
    const auto o = Attack(spec).run(*victim, ex, rng);
    ++runs;
    over_budget += o.queries > spec.budget_for(ex.text);
    bad_replay += replay_trace(o.original_text, o.trace) != o.final_text;
    if (o.status != AttackStatus::success) continue;
    ++successes;
    const bool flipped = argmax(victim->query(query_of(ex, o.final_text))) == 0;
    bad_verify += !(flipped && check(spec.constraints, ex, o.final_text).passed());
    if (spec.family == AttackFamily::word_synonym) {
      // Brute force over every synonym assignment.
      bool found = false;
      std::function<void(std::size_t, Tokens&)> rec = [&](std::size_t i, Tokens& cur) {
        if (found) return;
        if (i == cur.size()) {
          found = argmax(victim->query(query_of(ex, detokenize(cur)))) == 0;
          return;
        }
        rec(i + 1, cur);
        for (const auto& s : lex->synonyms(words[i])) {
          const auto keep = cur[i];
          cur[i] = s;
          rec(i + 1, cur);
          cur[i] = keep;
        }
      };
      Tokens cur = words;
      rec(0, cur);
      oracle_miss += !found;
    }
  }
  report(2, bad_verify == 0 && bad_replay == 0 && over_budget == 0 && oracle_miss == 0 && successes > 0,
         "keyword-victim soundness (" + std::to_string(runs) + " runs, " + std::to_string(successes) +
             " successes; reverify failures " + std::to_string(bad_verify) + ", replay mismatches " +
             std::to_string(bad_replay) + ", budget overruns " + std::to_string(over_budget) +
             ", successes without a brute-force witness " + std::to_string(oracle_miss) + ")");
}

// ---------------------------------------------------------------------------

bool eot_mean_exact() {
  std::size_t call = 0;
  const std::vector<double> p{0.2, 0.4, 0.6, 0.8, 1.0};
  FunctionEndpoint inner(kLabels, [&](const Query&) {
    const double v = p[call++ % p.size()];
    return ScoreVector{1.0 - v, v};
  });
  AdaptiveWrapConfig cfg;
  cfg.k = 5;
  cfg.transforms = std::make_shared<TransformDistribution>(std::vector<TextTransform>{identity_transform()});
  EotEndpoint eot(inner, cfg, RngStream(0));
  return eot.query({std::nullopt, "x"})[1] == 0.6;
}

std::vector<fs::path> files_under(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), dir));
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void run_pipeline(const fs::path& out) {
  fs::remove_all(out);
  const auto t0 = std::chrono::steady_clock::now();
  Pipeline p(build_world(generate_desk_corpus()), PipelineConfig{}, std::nullopt);
  p.run_all(out, [&](const std::string& stage) {
    std::fprintf(stderr, "[%6.1fs] %s\n", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
                 stage.c_str());
  });
}

void pipeline_criteria(const fs::path& out_a) {
  const fs::path out_b = fs::temp_directory_path() / ("textshield-acceptance-b-" + std::to_string(::getpid()));
  run_pipeline(out_a);
  const auto in = load_report_inputs(out_a);
  write_report(in, out_a / "report");
  const auto s = summarize_trends(in);

  {  // 3
    const double c = s.specific_char_accuracy.value_or(0), w = s.specific_word_accuracy.value_or(0),
                 h = s.general_held_out_accuracy.value_or(0);
    report(3, c >= w && c > 0.8 && w > 0.8 && h > 0.7,
           "detectors (specific char " + fmt(c) + " >= word " + fmt(w) + ", both > 0.8; general on held-out " + fmt(h) +
               " > 0.7)");
  }
  {  // 4
    bool ok = true;
    std::string detail;
    for (auto f : {AttackFamily::char_edit, AttackFamily::word_mlm}) {
      const auto it = s.constraint_rates.find(f);
      if (it == s.constraint_rates.end()) {
        ok = false;
        continue;
      }
      ok &= it->second.second <= 0.6 * it->second.first;
      detail += std::string(to_string(f)) + " " + fmt(it->second.first) + " -> " + fmt(it->second.second) + "; ";
    }
    bool subset = s.constraint_subset.size() == 4;
    for (const auto& [f, v] : s.constraint_subset) subset &= v;
    report(4, ok && subset, "anomaly constraint (" + detail + "constrained successes subset: " + (subset ? "yes" : "no") + ")");
  }
  {  // 5
    bool ok = true;
    std::string detail;
    for (auto f : {AttackFamily::char_edit, AttackFamily::word_synonym, AttackFamily::word_mlm}) {
      const auto it = s.synonym_restored_fraction.find(f);
      const double v = it == s.synonym_restored_fraction.end() ? 0.0 : it->second;
      ok &= v > 0.5;
      detail += std::string(to_string(f)) + " " + fmt(v) + " ";
    }
    report(5, ok, "one synonym pass restores > 0.5 of successes (" + detail + ")");
  }
  {  // 6
    const double d = s.during_after_mean.value_or(0), u = s.undefended_after_mean.value_or(1);
    report(6, d >= u + 0.20, "randomization during attack (after-attack accuracy " + fmt(d) + " vs undefended " + fmt(u) + ")");
  }
  {  // 7
    const double fc = s.framework_clean.value_or(0), uc = s.undefended_clean.value_or(1);
    bool ok = std::abs(fc - uc) <= 0.01 + 1e-12 && s.framework_after.size() == 4;
    std::string detail;
    for (const auto& [f, v] : s.framework_after) {
      ok &= v.second - v.first >= 0.20;
      detail += std::string(to_string(f)) + " " + fmt(v.first) + " -> " + fmt(v.second) + "; ";
    }
    report(7, ok, "framework (clean " + fmt(fc) + " vs " + fmt(uc) + "; after-attack " + detail + ")");
  }
  {  // 8
    bool ok = eot_mean_exact() && s.adaptive_after.size() == 4;
    std::string detail;
    for (const auto& [f, v] : s.adaptive_after) {
      ok &= v.first - v.second <= 0.10;
      detail += std::string(to_string(f)) + " " + fmt(v.first) + " -> " + fmt(v.second) + "; ";
    }
    report(8, ok, "adaptive EOT k=5 drop <= 10 points (" + detail + "EOT mean exact: " + (eot_mean_exact() ? "yes" : "no") + ")");
  }
  {  // 9
    const double p = s.polarized_fraction.value_or(0);
    report(9, p >= 0.8, "degree polarization (" + fmt(p) + " of degrees in [0,0.1] or [0.9,1])");
  }
  {  // 10
    auto at = [&](const std::string& k) { return s.curve.count(k) ? s.curve.at(k) : -1.0; };
    const double c10 = at("char_edit/10"), c100 = at("char_edit/100"), w100 = at("word_synonym/100");
    report(10, c100 > c10 && c100 > w100 && c10 >= 0 && w100 >= 0,
           "learning curve (char n=10 " + fmt(c10) + ", n=100 " + fmt(c100) + "; word n=100 " + fmt(w100) + ")");
  }
  {  // 11
    run_pipeline(out_b);
    const auto fa = files_under(out_a / "records"), fb = files_under(out_b / "records");
    bool same = !fa.empty() && fa == fb;
    std::size_t compared = 0;
    for (const auto& rel : fa)
      if (same) {
        same &= slurp(out_a / "records" / rel) == slurp(out_b / "records" / rel);
        ++compared;
      }
    for (const char* extra : {"detection/scores.jsonl", "analysis/projection.jsonl"}) {
      same &= slurp(out_a / extra) == slurp(out_b / extra);
      ++compared;
    }
    fs::remove_all(out_b);
    report(11, same, "two pipeline runs, " + std::to_string(compared) + " files byte-identical: " + (same ? "yes" : "no"));
  }
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::current_path() / "acceptance_out";
  try {
    criterion_1();
    criterion_2();
    pipeline_criteria(out);
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
