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

#ifndef TEXTSHIELD_ATTACKS_HPP_
#define TEXTSHIELD_ATTACKS_HPP_

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "textshield/constraints.hpp"
#include "textshield/endpoint.hpp"
#include "textshield/lexicon.hpp"
#include "textshield/paraphraser.hpp"
#include "textshield/rng.hpp"
#include "textshield/suggester.hpp"
#include "textshield/transforms.hpp"
#include "textshield/types.hpp"

namespace textshield {

enum class AttackFamily { char_edit, word_synonym, word_mlm, sentence_paraphrase };

inline const char* to_string(AttackFamily f) {
  switch (f) {
    case AttackFamily::char_edit: return "char_edit";
    case AttackFamily::word_synonym: return "word_synonym";
    case AttackFamily::word_mlm: return "word_mlm";
    case AttackFamily::sentence_paraphrase: return "sentence_paraphrase";
  }
  return "?";
}

inline AttackFamily attack_family_from_string(const std::string& s) {
  if (s == "char_edit" || s == "char") return AttackFamily::char_edit;
  if (s == "word_synonym" || s == "synonym") return AttackFamily::word_synonym;
  if (s == "word_mlm" || s == "mlm") return AttackFamily::word_mlm;
  if (s == "sentence_paraphrase" || s == "paraphrase") return AttackFamily::sentence_paraphrase;
  throw Error("unknown attack family '" + s + "'");
}

inline constexpr AttackFamily kAllAttackFamilies[] = {AttackFamily::char_edit, AttackFamily::word_synonym,
                                                      AttackFamily::word_mlm, AttackFamily::sentence_paraphrase};

// Word-level candidate veto: (original word, candidate) -> keep?
using CandidateFilter = std::function<bool(const std::string&, const std::string&)>;

struct AttackSpec {
  AttackFamily family = AttackFamily::word_synonym;
  ConstraintSet constraints;
  std::optional<std::uint64_t> query_budget;  // unset: 2 * words + 500

  std::shared_ptr<const SynonymLexicon> synonyms;
  std::shared_ptr<const FillInSuggester> suggester;
  std::size_t mlm_top_k = 48;
  std::shared_ptr<const Paraphraser> paraphraser;
  std::size_t paraphrase_count = 10;
  std::vector<EditOp> char_ops{EditOp::substitute_char, EditOp::insert_char, EditOp::delete_char,
                               EditOp::swap_adjacent};
  std::string char_alphabet = "abcdefghijklmnopqrstuvwxyz";
  CandidateFilter candidate_filter;

  // Check the anomaly degree on every candidate instead of only on the
  // final flipping one.
  bool strict_anomaly = false;

  std::uint64_t budget_for(const std::string& text) const {
    if (query_budget) return *query_budget;
    return 2 * word_positions(tokenize(text)).size() + 500;
  }

  void validate() const {
    if (query_budget && *query_budget == 0) throw Error("query budget must be positive");
    constraints.validate();
    if (family == AttackFamily::word_synonym && !synonyms) throw Error("word_synonym attack needs a synonym lexicon");
    if (family == AttackFamily::word_mlm && !suggester) throw Error("word_mlm attack needs a fill-in suggester");
    if (family == AttackFamily::word_mlm && mlm_top_k == 0) throw Error("mlm_top_k must be positive");
    if (family == AttackFamily::char_edit && (char_ops.empty() || char_alphabet.empty()))
      throw Error("char attack needs edit ops and an alphabet");
  }
};

struct AdaptiveWrapConfig {
  std::size_t k = 5;
  std::shared_ptr<const TransformDistribution> transforms;

  void validate() const {
    if (k < 1) throw Error("adaptive k must be at least 1");
    if (!transforms) throw Error("adaptive attack needs a transform distribution");
  }
};

// Feedback averaged over k randomized copies of each query. One call costs k
// inner queries.
class EotEndpoint : public Endpoint {
 public:
  EotEndpoint(Endpoint& inner, AdaptiveWrapConfig config, RngStream rng)
      : inner_(inner), config_(std::move(config)), rng_(std::move(rng)) {
    config_.validate();
  }

  ScoreVector query(const Query& q) override {
    ++calls_;
    ScoreVector mean;
    for (std::size_t i = 0; i < config_.k; ++i) {
      const ScoreVector s = inner_.query(Query{q.premise, config_.transforms->sample(q.text, rng_)});
      if (mean.empty()) mean.assign(s.size(), 0.0);
      for (std::size_t j = 0; j < s.size(); ++j) mean[j] += s[j];
    }
    for (auto& v : mean) v /= static_cast<double>(config_.k);
    return mean;
  }
  std::uint64_t query_count() const override { return calls_; }
  const std::vector<std::string>& label_set() const override { return inner_.label_set(); }
  bool deterministic() const override { return false; }
  std::uint64_t queries_per_call() const override { return config_.k * inner_.queries_per_call(); }

 private:
  Endpoint& inner_;
  AdaptiveWrapConfig config_;
  RngStream rng_;
  std::uint64_t calls_ = 0;
};

// ---------------------------------------------------------------------------
// Word importance.

enum class ImportanceMode { deletion, mask };

inline constexpr const char* kMaskToken = "[MASK]";

namespace detail {

inline Tokens occlude(const Tokens& toks, std::size_t pos, ImportanceMode mode) {
  Tokens t = toks;
  if (mode == ImportanceMode::deletion) t.erase(t.begin() + static_cast<std::ptrdiff_t>(pos));
  else t[pos] = kMaskToken;
  return t;
}

// Importance is the gold-score drop when the word is occluded; ranking by the
// occluded gold score ascending gives the same order without a base query.
template <typename QueryFn>
std::vector<std::size_t> rank_positions(const Tokens& toks, std::size_t gold, ImportanceMode mode, QueryFn&& query) {
  const auto words = word_positions(toks);
  if (words.size() <= 1) return words;
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(words.size());
  for (auto pos : words) {
    const auto s = query(detokenize(occlude(toks, pos, mode)));
    if (!s) break;  // budget ran out: unscored words keep their text order
    scored.emplace_back((*s)[gold], pos);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::size_t> out;
  for (const auto& [s, p] : scored) out.push_back(p);
  for (auto pos : words)
    if (std::find(out.begin(), out.end(), pos) == out.end()) out.push_back(pos);
  return out;
}

}  // namespace detail

// Word token positions by descending importance, ties by earlier position.
// Costs one query per word; a one-word text needs none.
inline std::vector<std::size_t> rank_word_importance(Endpoint& endpoint, const TextExample& example,
                                                     ImportanceMode mode = ImportanceMode::deletion) {
  const auto& labels = endpoint.label_set();
  const auto gold = static_cast<std::size_t>(std::find(labels.begin(), labels.end(), example.gold_label) - labels.begin());
  if (gold >= labels.size()) throw Error("gold label '" + example.gold_label + "' unknown to endpoint");
  return detail::rank_positions(tokenize(example.text), gold, mode, [&](const std::string& t) {
    return std::optional<ScoreVector>(endpoint.query(query_of(example, t)));
  });
}

// ---------------------------------------------------------------------------

class Attack {
 public:
  explicit Attack(AttackSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

  const AttackSpec& spec() const { return spec_; }
  const std::optional<AdaptiveWrapConfig>& adaptive() const { return adaptive_; }

  std::string id() const {
    std::string s = to_string(spec_.family);
    if (spec_.constraints.anomaly_enabled()) s += spec_.strict_anomaly ? "+anomaly-strict" : "+anomaly";
    if (adaptive_) s += "+eot" + std::to_string(adaptive_->k);
    return s;
  }

  friend Attack with_anomaly_constraint(const Attack&, std::shared_ptr<const AnomalyScorer>, double, bool);
  friend Attack eot_adaptive(const Attack&, AdaptiveWrapConfig);

  // Attacks one example. The initial prediction uses `endpoint` directly;
  // with the adaptive wrapper the search sees averaged feedback.
  AttackOutcome run(Endpoint& endpoint, const TextExample& example, RngStream& rng) const {
    AttackOutcome out;
    out.example_id = example.id;
    out.premise = example.premise;
    out.gold_label = example.gold_label;
    out.original_text = example.text;
    out.final_text = detokenize(tokenize(example.text));

    const auto& labels = endpoint.label_set();
    const auto git = std::find(labels.begin(), labels.end(), example.gold_label);
    if (git == labels.end()) throw Error("gold label '" + example.gold_label + "' unknown to endpoint");
    const auto gold = static_cast<std::size_t>(git - labels.begin());

    const std::uint64_t budget = spec_.budget_for(example.text);
    BudgetedEndpoint raw(endpoint, budget);
    const ScoreVector s0 = raw.query(query_of(example));
    if (argmax(s0) != gold) {
      out.status = AttackStatus::skipped_wrong_prediction;
      out.queries = raw.used();
      return out;
    }
    if (spec_.family == AttackFamily::sentence_paraphrase && !spec_.paraphraser) {
      out.status = AttackStatus::skipped_unavailable;
      out.queries = raw.used();
      return out;
    }

    std::unique_ptr<EotEndpoint> eot;
    Endpoint* search = &endpoint;
    if (adaptive_) {
      eot = std::make_unique<EotEndpoint>(endpoint, *adaptive_, rng.child("eot"));
      search = eot.get();
    }
    BudgetedEndpoint b(*search, budget - raw.used());
    Search s{*this, example, gold, b, rng, out, s0};
    s.run();
    out.queries = raw.used() + b.used();
    return out;
  }

 private:
  // State of the greedy search over one example.
  struct Search {
    const Attack& attack;
    const TextExample& example;
    std::size_t gold;
    BudgetedEndpoint& endpoint;
    RngStream& rng;
    AttackOutcome& out;
    ScoreVector current;
    TextExample normalized{};
    std::uint64_t detector_queries = 0;

    const AttackSpec& spec() const { return attack.spec_; }

    std::optional<ScoreVector> query(const std::string& text) {
      if (!endpoint.can_query()) return std::nullopt;
      return endpoint.query(query_of(example, text));
    }

    void run() {
      normalized = example;
      normalized.text = detokenize(tokenize(example.text));
      out.status = AttackStatus::failed;
      switch (spec().family) {
        case AttackFamily::char_edit:
        case AttackFamily::word_synonym:
        case AttackFamily::word_mlm: word_loop(); break;
        case AttackFamily::sentence_paraphrase: paraphrase(); break;
      }
      if (out.status == AttackStatus::success) {
        out.constraints = check(spec().constraints, normalized, out.final_text, CheckScope::all, &detector_queries);
      } else {
        out.constraints = check(spec().constraints, normalized, out.final_text, CheckScope::without_anomaly);
      }
      out.detector_queries = detector_queries;
    }

    bool anomaly_ok(const std::string& text) {
      if (!spec().constraints.anomaly_enabled()) return true;
      ++detector_queries;
      return spec().constraints.detector->degree(Query{example.premise, text}) <
             *spec().constraints.max_degree_of_anomaly;
    }

    bool pre_check(const std::string& text) {
      if (!check(spec().constraints, normalized, text, CheckScope::without_anomaly).passed()) return false;
      return !spec().strict_anomaly || anomaly_ok(text);
    }

    enum class Step { success, applied, nothing, stop };

    // Queries the candidates for one position. The first flipping candidate
    // that satisfies every constraint ends the attack; otherwise the largest
    // gold-score drop among the rest is applied when it is positive.
    Step try_candidates(Tokens& toks, const std::vector<CandidateEdit>& cands) {
      std::optional<std::size_t> best;
      ScoreVector best_scores;
      bool any_valid = false;
      for (std::size_t c = 0; c < cands.size(); ++c) {
        Tokens t = toks;
        apply_edit(t, cands[c]);
        const std::string text = detokenize(t);
        if (!pre_check(text)) continue;
        any_valid = true;
        const auto s = query(text);
        if (!s) return best ? commit(toks, cands[*best], best_scores, Step::stop) : Step::stop;
        if (argmax(*s) != gold) {
          if (spec().strict_anomaly || anomaly_ok(text)) {
            toks = std::move(t);
            out.trace.push_back(cands[c]);
            out.final_text = text;
            current = *s;
            out.status = AttackStatus::success;
            return Step::success;
          }
          continue;  // rejected by the anomaly constraint
        }
        if ((*s)[gold] < current[gold] && (!best || (*s)[gold] < best_scores[gold])) {
          best = c;
          best_scores = *s;
        }
      }
      if (best) return commit(toks, cands[*best], best_scores, Step::applied);
      if (!any_valid && spec().family == AttackFamily::char_edit) return Step::stop;  // edit budget breached
      return Step::nothing;
    }

    Step commit(Tokens& toks, const CandidateEdit& e, const ScoreVector& s, Step result) {
      apply_edit(toks, e);
      out.trace.push_back(e);
      out.final_text = detokenize(toks);
      current = s;
      return result;
    }

    void word_loop() {
      Tokens toks = tokenize(normalized.text);
      const Tokens original = toks;
      const auto mode =
          spec().family == AttackFamily::word_mlm ? ImportanceMode::mask : ImportanceMode::deletion;
      const auto order = detail::rank_positions(toks, gold, mode, [&](const std::string& t) { return query(t); });
      for (auto pos : order) {
        if (!endpoint.can_query()) return;
        std::vector<CandidateEdit> cands;
        switch (spec().family) {
          case AttackFamily::char_edit: cands = char_candidates(toks, pos); break;
          case AttackFamily::word_synonym: cands = synonym_candidates(toks, original, pos); break;
          case AttackFamily::word_mlm: cands = mlm_candidates(toks, original, pos); break;
          case AttackFamily::sentence_paraphrase: break;
        }
        if (cands.empty()) continue;
        const Step step = try_candidates(toks, cands);
        if (step == Step::success || step == Step::stop) return;
      }
    }

    char random_char(char avoid) {
      const auto& a = spec().char_alphabet;
      for (int tries = 0; tries < 16; ++tries) {
        const char c = a[rng.uniform_int(a.size())];
        if (c != avoid) return c;
      }
      return a[0];
    }

    // One random instance of each configured op, for the word at `pos`.
    std::vector<CandidateEdit> char_candidates(const Tokens& toks, std::size_t pos) {
      const std::string& w = toks[pos];
      std::vector<CandidateEdit> out_c;
      for (auto op : spec().char_ops) {
        CandidateEdit e{op, pos, 0, ""};
        switch (op) {
          case EditOp::substitute_char:
            e.position = rng.uniform_int(w.size());
            e.replacement = std::string(1, random_char(w[e.position]));
            break;
          case EditOp::insert_char:
            e.position = rng.uniform_int(w.size() + 1);
            e.replacement = std::string(1, random_char('\0'));
            break;
          case EditOp::delete_char:
            if (w.size() < 2) continue;
            e.position = rng.uniform_int(w.size());
            break;
          case EditOp::swap_adjacent: {
            std::vector<std::size_t> ok;
            for (std::size_t i = 0; i + 1 < w.size(); ++i)
              if (w[i] != w[i + 1]) ok.push_back(i);
            if (ok.empty()) continue;
            e.position = ok[rng.uniform_int(ok.size())];
            break;
          }
          default: continue;
        }
        out_c.push_back(std::move(e));
      }
      return out_c;
    }

    bool keep(const std::string& orig, const std::string& cand) const {
      if (cand.empty() || cand == orig || is_punct_token(cand)) return false;
      if (tokenize(cand).size() != 1) return false;
      return !spec().candidate_filter || spec().candidate_filter(orig, cand);
    }

    std::vector<CandidateEdit> synonym_candidates(const Tokens& toks, const Tokens& original, std::size_t pos) {
      std::vector<CandidateEdit> c;
      for (const auto& syn : spec().synonyms->synonyms(original[pos]))
        if (syn != toks[pos] && keep(original[pos], syn)) c.push_back({EditOp::substitute_word, pos, 0, syn});
      return c;
    }

    std::vector<CandidateEdit> mlm_candidates(const Tokens& toks, const Tokens& original, std::size_t pos) {
      const Tokens left(toks.begin(), toks.begin() + static_cast<std::ptrdiff_t>(pos));
      const Tokens right(toks.begin() + static_cast<std::ptrdiff_t>(pos + 1), toks.end());
      std::vector<CandidateEdit> c;
      for (const auto& w : spec().suggester->suggest_for(left, right, original[pos], spec().mlm_top_k)) {
        if (c.size() >= spec().mlm_top_k) break;
        if (w != toks[pos] && keep(original[pos], w)) c.push_back({EditOp::substitute_word, pos, 0, w});
      }
      return c;
    }

    void paraphrase() {
      std::vector<std::string> cands;
      try {
        cands = spec().paraphraser->paraphrase(normalized.text, spec().paraphrase_count);
      } catch (const std::exception& e) {
        log_warning(std::string("paraphraser failed: ") + e.what());
        out.status = AttackStatus::skipped_unavailable;
        return;
      }
      if (cands.size() > spec().paraphrase_count) cands.resize(spec().paraphrase_count);
      std::vector<CandidateEdit> edits;
      for (auto& c : cands) {
        const std::string norm = detokenize(tokenize(c));
        if (norm.empty() || norm == normalized.text) continue;
        edits.push_back({EditOp::replace_text, 0, 0, norm});
      }
      Tokens toks = tokenize(normalized.text);
      for (const auto& e : edits) {
        const std::string& text = e.replacement;
        if (!pre_check(text)) continue;
        const auto s = query(text);
        if (!s) return;
        if (argmax(*s) != gold && (spec().strict_anomaly || anomaly_ok(text))) {
          commit(toks, e, *s, Step::success);
          out.status = AttackStatus::success;
          return;
        }
      }
    }
  };

  AttackSpec spec_;
  std::optional<AdaptiveWrapConfig> adaptive_;
};

// Success additionally requires the final text's anomaly degree to stay
// below `threshold`. Detector lookups are counted apart from victim queries.
inline Attack with_anomaly_constraint(const Attack& attack, std::shared_ptr<const AnomalyScorer> detector,
                                      double threshold = ConstraintSet::kDefaultAnomalyThreshold,
                                      bool strict = false) {
  Attack a = attack;
  a.spec_.constraints = a.spec_.constraints.with_anomaly(std::move(detector), threshold);
  a.spec_.strict_anomaly = strict;
  return a;
}

inline Attack eot_adaptive(const Attack& attack, AdaptiveWrapConfig wrap) {
  wrap.validate();
  Attack a = attack;
  a.adaptive_ = std::move(wrap);
  return a;
}

namespace detail {
inline AttackOutcome run_family(AttackFamily family, Endpoint& endpoint, const TextExample& example,
                                const AttackSpec& spec, RngStream& rng) {
  if (spec.family != family)
    throw Error(std::string("attack spec family is ") + to_string(spec.family) + ", expected " + to_string(family));
  return Attack(spec).run(endpoint, example, rng);
}
}  // namespace detail

inline AttackOutcome char_attack(Endpoint& endpoint, const TextExample& example, const AttackSpec& spec,
                                 RngStream rng = RngStream(0)) {
  return detail::run_family(AttackFamily::char_edit, endpoint, example, spec, rng);
}
inline AttackOutcome word_synonym_attack(Endpoint& endpoint, const TextExample& example, const AttackSpec& spec,
                                         RngStream rng = RngStream(0)) {
  return detail::run_family(AttackFamily::word_synonym, endpoint, example, spec, rng);
}
inline AttackOutcome word_mlm_attack(Endpoint& endpoint, const TextExample& example, const AttackSpec& spec,
                                     RngStream rng = RngStream(0)) {
  return detail::run_family(AttackFamily::word_mlm, endpoint, example, spec, rng);
}
inline AttackOutcome paraphrase_attack(Endpoint& endpoint, const TextExample& example, const AttackSpec& spec,
                                       RngStream rng = RngStream(0)) {
  return detail::run_family(AttackFamily::sentence_paraphrase, endpoint, example, spec, rng);
}

struct RunOptions {
  std::string name;
  std::string config_digest;
  std::size_t verdict_m = 1;  // fresh draws for the success verdict on randomized endpoints
};

// Attacks every example in order. On a randomized endpoint a success is
// confirmed by a majority of `verdict_m` fresh labels of the final text; an
// unconfirmed success (ties included) is recorded as failed.
inline ExperimentRecord run_attack(const Attack& attack, Endpoint& endpoint, const Dataset& dataset, std::uint64_t seed,
                                   const RunOptions& options = {}) {
  if (options.verdict_m == 0) throw Error("verdict_m must be positive");
  ExperimentRecord rec;
  rec.name = options.name.empty() ? attack.id() : options.name;
  rec.config_digest = options.config_digest;
  rec.seed = seed;
  const RngStream root(seed, {fnv1a64("attack"), fnv1a64(attack.id())});
  for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
    const auto& ex = dataset.examples[i];
    endpoint.begin_example(i);
    RngStream rng = root.child(i);
    AttackOutcome o = attack.run(endpoint, ex, rng);
    if (o.status == AttackStatus::success && !endpoint.deterministic()) {
      const auto& labels = endpoint.label_set();
      const auto gold = static_cast<std::size_t>(std::find(labels.begin(), labels.end(), ex.gold_label) - labels.begin());
      std::size_t correct = 0;
      for (std::size_t m = 0; m < options.verdict_m; ++m) correct += endpoint.query_label(query_of(ex, o.final_text)) == gold;
      o.verdict_queries = options.verdict_m;
      if (2 * correct >= options.verdict_m) o.status = AttackStatus::failed;
    }
    rec.per_example.push_back(std::move(o));
  }
  rec.metrics = compute_metrics(rec.per_example);
  return rec;
}

}  // namespace textshield

#endif  // TEXTSHIELD_ATTACKS_HPP_
