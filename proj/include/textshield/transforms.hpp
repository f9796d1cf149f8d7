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

#ifndef TEXTSHIELD_TRANSFORMS_HPP_
#define TEXTSHIELD_TRANSFORMS_HPP_

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "textshield/lexicon.hpp"
#include "textshield/paraphraser.hpp"
#include "textshield/rng.hpp"
#include "textshield/semantic.hpp"
#include "textshield/spelling.hpp"
#include "textshield/suggester.hpp"

namespace textshield {

// A seeded text -> text map.
using TextTransform = std::function<std::string(const std::string&, RngStream&)>;

enum class TransformKind { synonym_substitution, adverb_insertion, mlm_suggestion, back_translation };

inline const char* to_string(TransformKind k) {
  switch (k) {
    case TransformKind::synonym_substitution: return "synonym_substitution";
    case TransformKind::adverb_insertion: return "adverb_insertion";
    case TransformKind::mlm_suggestion: return "mlm_suggestion";
    case TransformKind::back_translation: return "back_translation";
  }
  return "?";
}

// Accepts full names and the short CLI forms (synonym, adverb, mlm, bt).
inline TransformKind transform_kind_from_string(const std::string& s) {
  if (s == "synonym_substitution" || s == "synonym") return TransformKind::synonym_substitution;
  if (s == "adverb_insertion" || s == "adverb") return TransformKind::adverb_insertion;
  if (s == "mlm_suggestion" || s == "mlm") return TransformKind::mlm_suggestion;
  if (s == "back_translation" || s == "bt") return TransformKind::back_translation;
  throw Error("unknown transform '" + s + "'");
}

inline constexpr TransformKind kAllTransformKinds[] = {TransformKind::synonym_substitution,
                                                       TransformKind::adverb_insertion, TransformKind::mlm_suggestion,
                                                       TransformKind::back_translation};

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::vector<std::string> tag(const Tokens& tokens) const = 0;
};

class LexiconTagger : public PosTagger {
 public:
  explicit LexiconTagger(PosLexicon lex) : lex_(std::move(lex)) {}
  std::vector<std::string> tag(const Tokens& tokens) const override {
    std::vector<std::string> tags;
    tags.reserve(tokens.size());
    for (const auto& t : tokens) tags.push_back(is_punct_token(t) ? std::string("PUNCT") : lex_.tag(t));
    return tags;
  }

 private:
  PosLexicon lex_;
};

// ---------------------------------------------------------------------------
// The four randomization processes.

// Replaces min(ceil(fraction * words), eligible) words by a uniform draw from
// their synonym sets. Eligible words have synonyms and are not stopwords; the
// positions are a uniform sample of the eligible ones.
inline std::string random_synonym_substitution(const std::string& text, const SynonymLexicon& lexicon,
                                               double fraction, RngStream& rng) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("substitution fraction must be in (0, 1]");
  Tokens toks = tokenize(text);
  const auto words = word_positions(toks);
  std::vector<std::size_t> eligible;
  for (auto i : words)
    if (!is_stopword(toks[i]) && lexicon.has_synonyms(toks[i])) eligible.push_back(i);
  if (eligible.empty()) return text;
  const auto quota = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(words.size()) - 1e-9));
  for (auto k : rng.sample_without_replacement(eligible.size(), std::min(quota, eligible.size()))) {
    auto& w = toks[eligible[k]];
    const auto& syns = lexicon.synonyms(w);
    w = syns[rng.uniform_int(syns.size())];
  }
  return detokenize(toks);
}

// Inserts one neutral adverb before a uniformly chosen verb, or before a
// uniformly chosen token when the tagger finds no verb.
inline std::string random_adverb_insertion(const std::string& text, const std::vector<std::string>& adverbs,
                                           const PosTagger& tagger, RngStream& rng) {
  if (adverbs.empty()) throw Error("random_adverb_insertion: empty adverb lexicon");
  Tokens toks = tokenize(text);
  const auto tags = tagger.tag(toks);
  std::vector<std::size_t> verbs;
  for (std::size_t i = 0; i < toks.size(); ++i)
    if (tags[i] == "VERB") verbs.push_back(i);
  const std::size_t at = !verbs.empty() ? verbs[rng.uniform_int(verbs.size())]
                                        : static_cast<std::size_t>(rng.uniform_int(std::max<std::size_t>(toks.size(), 1)));
  const auto& adv = adverbs[rng.uniform_int(adverbs.size())];
  toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(std::min(at, toks.size())), adv);
  return detokenize(toks);
}

// Replaces one uniformly chosen word by the suggester's best candidate that
// differs from it.
inline std::string random_mlm_suggestion(const std::string& text, const FillInSuggester& suggester, RngStream& rng,
                                         std::size_t top_k = 8) {
  Tokens toks = tokenize(text);
  const auto words = word_positions(toks);
  if (words.empty()) return text;
  const auto pos = words[rng.uniform_int(words.size())];
  const Tokens left(toks.begin(), toks.begin() + static_cast<std::ptrdiff_t>(pos));
  const Tokens right(toks.begin() + static_cast<std::ptrdiff_t>(pos + 1), toks.end());
  for (const auto& c : suggester.suggest(left, right, top_k)) {
    if (c != toks[pos]) {
      toks[pos] = c;
      return detokenize(toks);
    }
  }
  return text;
}

inline constexpr double kBackTranslationSimilarityFloor = 0.4;

// Round-trip paraphrase guarded by semantic similarity: a paraphrase that
// drifts below the floor, or a failing hook, yields the input unchanged.
inline std::string back_translate(const std::string& text, const Paraphraser& paraphraser,
                                  const SemanticEncoder* encoder = nullptr, std::size_t choice = 0) {
  std::vector<std::string> cands;
  try {
    cands = paraphraser.paraphrase(text, choice + 1);
  } catch (const std::exception& e) {
    log_warning(std::string("paraphraser failed: ") + e.what());
    return text;
  }
  if (cands.empty()) return text;
  const std::string& out = cands[std::min(choice, cands.size() - 1)];
  if (trim(out).empty()) return text;
  if (encoder && semantic_similarity(*encoder, text, out) < kBackTranslationSimilarityFloor) return text;
  return out;
}

// ---------------------------------------------------------------------------

struct TransformConfig {
  TransformKind kind = TransformKind::synonym_substitution;
  double substitution_fraction = 0.25;
  std::size_t mlm_top_k = 8;
  std::size_t back_translation_choices = 3;  // draw among the first n paraphrases
  bool restore_spelling = true;

  std::shared_ptr<const SynonymLexicon> synonyms;
  std::shared_ptr<const std::vector<std::string>> adverbs;
  std::shared_ptr<const PosTagger> tagger;
  std::shared_ptr<const FillInSuggester> suggester;
  std::shared_ptr<const Paraphraser> paraphraser;
  std::shared_ptr<const SpellingRestorer> restorer;
  std::shared_ptr<const SemanticEncoder> encoder;  // back-translation guard

  void validate() const {
    if (!(substitution_fraction > 0.0 && substitution_fraction <= 1.0))
      throw Error("substitution_fraction must be in (0, 1]");
    switch (kind) {
      case TransformKind::synonym_substitution:
        if (!synonyms) throw Error("synonym substitution needs a synonym lexicon");
        break;
      case TransformKind::adverb_insertion:
        if (!adverbs || !tagger) throw Error("adverb insertion needs an adverb list and a tagger");
        break;
      case TransformKind::mlm_suggestion:
        if (!suggester) throw Error("MLM suggestion needs a fill-in suggester");
        break;
      case TransformKind::back_translation:
        if (!paraphraser) throw Error("back translation needs a paraphraser");
        break;
    }
  }
};

inline std::string restore_spelling(const SpellingRestorer* restorer, const std::string& text) {
  return restorer ? restorer->restore(text) : text;
}

// Spelling restoration followed by the kind-specific randomization.
class Transformer {
 public:
  explicit Transformer(TransformConfig config) : config_(std::move(config)) { config_.validate(); }

  TransformKind kind() const { return config_.kind; }
  const TransformConfig& config() const { return config_; }

  std::string apply(const std::string& text, RngStream& rng) const {
    const std::string restored = config_.restore_spelling ? restore_spelling(config_.restorer.get(), text) : text;
    switch (config_.kind) {
      case TransformKind::synonym_substitution:
        return random_synonym_substitution(restored, *config_.synonyms, config_.substitution_fraction, rng);
      case TransformKind::adverb_insertion:
        return random_adverb_insertion(restored, *config_.adverbs, *config_.tagger, rng);
      case TransformKind::mlm_suggestion:
        return random_mlm_suggestion(restored, *config_.suggester, rng, config_.mlm_top_k);
      case TransformKind::back_translation: {
        const auto choice = static_cast<std::size_t>(rng.uniform_int(std::max<std::size_t>(config_.back_translation_choices, 1)));
        return back_translate(restored, *config_.paraphraser, config_.encoder.get(), choice);
      }
    }
    return restored;
  }

  TextTransform as_function() const {
    auto self = std::make_shared<Transformer>(*this);
    return [self](const std::string& text, RngStream& rng) { return self->apply(text, rng); };
  }

 private:
  TransformConfig config_;
};

inline std::string apply(TransformKind kind, const std::string& text, TransformConfig config, RngStream& rng) {
  config.kind = kind;
  return Transformer(std::move(config)).apply(text, rng);
}

// The family T of transform draws: each draw picks a kind uniformly from the
// configured members, then applies it with the same stream.
class TransformDistribution {
 public:
  explicit TransformDistribution(std::vector<TextTransform> members) : members_(std::move(members)) {
    if (members_.empty()) throw Error("empty transform distribution");
  }
  std::string sample(const std::string& text, RngStream& rng) const {
    const auto& t = members_.size() == 1 ? members_[0] : members_[rng.uniform_int(members_.size())];
    return t(text, rng);
  }
  std::size_t size() const { return members_.size(); }

 private:
  std::vector<TextTransform> members_;
};

inline TextTransform identity_transform() {
  return [](const std::string& text, RngStream&) { return text; };
}

}  // namespace textshield

#endif  // TEXTSHIELD_TRANSFORMS_HPP_
