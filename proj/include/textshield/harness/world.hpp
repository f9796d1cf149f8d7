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

#ifndef TEXTSHIELD_HARNESS_WORLD_HPP_
#define TEXTSHIELD_HARNESS_WORLD_HPP_

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "textshield/attacks.hpp"
#include "textshield/dataset_io.hpp"
#include "textshield/harness/desk_corpus.hpp"
#include "textshield/language_model.hpp"
#include "textshield/lexicon.hpp"
#include "textshield/paraphraser.hpp"
#include "textshield/semantic.hpp"
#include "textshield/spelling.hpp"
#include "textshield/suggester.hpp"
#include "textshield/transforms.hpp"

namespace textshield::harness {

struct WorldOptions {
  double substitution_fraction = 0.25;
  std::size_t mlm_top_k = 48;                // attack candidates per position
  std::size_t mlm_transform_top_k = 8;       // randomization draws among the best fills
  double mlm_min_word_similarity = 0.5;      // candidate filter on word vectors
  std::size_t paraphrase_count = 10;
  std::size_t back_translation_choices = 3;
  std::uint64_t paraphraser_seed = 11;
  double paraphrase_redraw = 0.35;
  std::uint64_t lm_seed = 5;
  double mlm_affinity_weight = 4.0;  // pull of the unmasked word on attack fills
};

// Every model-free resource the experiments share: lexicons, the sentence
// encoder, the fluency and fill-in models, the paraphraser and the spelling
// restorer. Built once from the training split.
struct World {
  Dataset train;
  Dataset test;
  WorldOptions options;
  std::shared_ptr<const SynonymLexicon> synonyms;
  std::shared_ptr<const std::vector<std::string>> adverbs;
  std::shared_ptr<const PosTagger> tagger;
  FrequencyTable freq;
  KnownWords known;
  std::shared_ptr<const StaticWordVectorEncoder> encoder;
  std::shared_ptr<const GrammarChecker> grammar;
  std::shared_ptr<const NgramSuggester> suggester;
  std::shared_ptr<const Paraphraser> paraphraser;
  std::shared_ptr<const SpellingRestorer> restorer;

  TransformConfig transform_config(TransformKind kind) const {
    TransformConfig c;
    c.kind = kind;
    c.substitution_fraction = options.substitution_fraction;
    c.mlm_top_k = options.mlm_transform_top_k;
    c.back_translation_choices = options.back_translation_choices;
    c.synonyms = synonyms;
    c.adverbs = adverbs;
    c.tagger = tagger;
    c.suggester = suggester;
    c.paraphraser = paraphraser;
    c.restorer = restorer;
    c.encoder = encoder;
    return c;
  }

  AttackSpec attack_spec(AttackFamily family) const {
    AttackSpec s;
    s.family = family;
    switch (family) {
      case AttackFamily::char_edit: s.constraints = ConstraintSet::char_profile(); break;
      case AttackFamily::word_synonym:
      case AttackFamily::word_mlm: s.constraints = ConstraintSet::word_profile(encoder, grammar); break;
      case AttackFamily::sentence_paraphrase: s.constraints = ConstraintSet::sentence_profile(encoder); break;
    }
    s.synonyms = synonyms;
    s.suggester = suggester;
    s.mlm_top_k = options.mlm_top_k;
    s.paraphraser = paraphraser;
    s.paraphrase_count = options.paraphrase_count;
    if (family == AttackFamily::word_mlm) {
      auto enc = encoder;
      const double floor = options.mlm_min_word_similarity;
      s.candidate_filter = [enc, floor](const std::string& a, const std::string& b) {
        return enc->word_similarity(a, b) >= floor;
      };
    }
    return s;
  }

  std::vector<std::string> known_word_list() const {
    std::vector<std::string> out;
    for (const auto& [w, f] : known.words()) out.push_back(w);
    return out;
  }
};

inline World build_world(Dataset train, Dataset test, SynonymLexicon synonyms, std::vector<std::string> adverbs,
                         PosLexicon pos, WorldOptions options = {}) {
  World w;
  w.train = std::move(train);
  w.test = std::move(test);
  w.options = options;
  w.freq = FrequencyTable::from_dataset(w.train);
  w.known = KnownWords(w.freq, &synonyms, &adverbs);
  auto lex = std::make_shared<SynonymLexicon>(std::move(synonyms));
  w.synonyms = lex;
  w.adverbs = std::make_shared<std::vector<std::string>>(std::move(adverbs));
  w.tagger = std::make_shared<LexiconTagger>(std::move(pos));
  w.encoder = std::make_shared<StaticWordVectorEncoder>(*lex, w.freq);
  w.grammar = std::make_shared<LexiconGrammarChecker>(w.known);
  NgramLanguageModel lm(2);
  for (const auto& word : w.known_word_list()) lm.add_vocabulary(word);
  // The fill-in model also reads one synonym-redrawn copy of every training
  // sentence, so it knows where rare and lexicon-only words fit.
  const RngStream lm_root(options.lm_seed, {fnv1a64("fill-in-corpus")});
  for (std::size_t i = 0; i < w.train.examples.size(); ++i) {
    const auto& text = w.train.examples[i].text;
    lm.observe(text);
    RngStream rng = lm_root.child(i);
    Tokens toks = tokenize(text);
    for (auto& t : toks) {
      const auto& syns = lex->synonyms(t);
      if (!syns.empty() && !is_stopword(t)) t = syns[rng.uniform_int(syns.size())];
    }
    lm.observe(detokenize(toks));
  }
  auto enc = w.encoder;
  w.suggester = std::make_shared<NgramSuggester>(
      std::move(lm), [enc](const std::string& a, const std::string& b) { return enc->word_similarity(a, b); },
      options.mlm_affinity_weight);
  w.paraphraser = std::make_shared<DeskParaphraser>(*lex, w.freq, options.paraphraser_seed, options.paraphrase_redraw);
  w.restorer = std::make_shared<LexiconSpellingRestorer>(w.known);
  return w;
}

inline World build_world(const DeskCorpus& corpus, WorldOptions options = {}) {
  return build_world(corpus.train, corpus.test, corpus.synonyms, corpus.adverbs, corpus.pos, options);
}

// Loads train.tsv, test.tsv, synonyms.tsv, adverbs.txt and pos.tsv from `dir`.
inline World load_world(const std::filesystem::path& dir, WorldOptions options = {}) {
  for (const char* f : {"train.tsv", "test.tsv", "synonyms.tsv", "adverbs.txt", "pos.tsv"})
    if (!std::filesystem::exists(dir / f)) throw Error("missing corpus file " + (dir / f).string());
  return build_world(load_dataset(dir / "train.tsv", DatasetFormat::tsv, Split::train),
                     load_dataset(dir / "test.tsv", DatasetFormat::tsv, Split::test),
                     SynonymLexicon::load(dir / "synonyms.tsv"), load_word_list(dir / "adverbs.txt"),
                     PosLexicon::load(dir / "pos.tsv"), options);
}

}  // namespace textshield::harness

#endif  // TEXTSHIELD_HARNESS_WORLD_HPP_
