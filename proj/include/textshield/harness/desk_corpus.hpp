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

#ifndef TEXTSHIELD_HARNESS_DESK_CORPUS_HPP_
#define TEXTSHIELD_HARNESS_DESK_CORPUS_HPP_

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "textshield/dataset_io.hpp"
#include "textshield/lexicon.hpp"
#include "textshield/rng.hpp"

namespace textshield::harness {

// Synthetic movie-review polarity corpus with a matching synonym lexicon,
// neutral-adverb list and POS lexicon. Each sentence has one to three
// clauses, each with one sentiment adjective; the label is the majority
// polarity. Synonym members follow a Zipf profile in the corpus and the
// tail members of every group occur only in the lexicon.
struct DeskCorpusConfig {
  std::uint64_t seed = 2024;
  std::size_t train_size = 2000;
  std::size_t test_size = 500;
  double label_noise = 0.03;
  double zipf_exponent = 1.2;
  std::size_t lexicon_only = 2;  // tail members of each sentiment group kept out of the corpus
};

struct DeskCorpus {
  Dataset train;
  Dataset test;
  SynonymLexicon synonyms;
  std::vector<std::string> adverbs;
  PosLexicon pos;
};

namespace desk {

inline const std::vector<std::string> kLabels = {"negative", "positive"};

struct Group {
  std::vector<std::string> members;
  std::size_t hidden = 0;  // trailing members absent from the corpus
};

inline std::vector<Group> positive_groups() {
  return {{{"good", "fine", "decent", "solid", "nice", "pleasing"}},
          {{"great", "excellent", "superb", "terrific", "outstanding", "splendid"}},
          {{"fun", "entertaining", "enjoyable", "amusing", "diverting", "lively"}},
          {{"moving", "touching", "poignant", "heartfelt", "affecting", "stirring"}},
          {{"smart", "clever", "witty", "sharp", "intelligent", "astute"}},
          {{"beautiful", "gorgeous", "lovely", "stunning", "elegant", "exquisite"}},
          {{"fresh", "original", "inventive", "novel", "creative", "imaginative"}},
          {{"gripping", "compelling", "riveting", "engaging", "absorbing", "enthralling"}}};
}

inline std::vector<Group> negative_groups() {
  return {{{"bad", "poor", "awful", "lousy", "dreadful", "abysmal"}},
          {{"boring", "dull", "tedious", "tiresome", "monotonous", "plodding"}},
          {{"stupid", "dumb", "silly", "foolish", "idiotic", "brainless"}},
          {{"ugly", "unsightly", "hideous", "grotesque", "garish", "unattractive"}},
          {{"stale", "predictable", "derivative", "formulaic", "hackneyed", "trite"}},
          {{"messy", "sloppy", "clumsy", "muddled", "chaotic", "disjointed"}},
          {{"weak", "feeble", "flimsy", "lame", "anemic", "limp"}},
          {{"painful", "unbearable", "excruciating", "agonizing", "grueling", "insufferable"}}};
}

inline std::vector<Group> noun_groups() {
  return {{{"plot", "story", "storyline", "narrative"}},
          {{"acting", "performance", "portrayal"}},
          {{"script", "screenplay", "writing"}},
          {{"ending", "finale", "conclusion"}},
          {{"soundtrack", "music", "score"}},
          {{"dialogue", "banter", "conversation"}},
          {{"character", "protagonist", "hero"}},
          {{"pacing", "tempo", "rhythm"}},
          {{"cinematography", "camerawork", "photography"}},
          {{"premise", "concept", "idea"}}};
}

inline std::vector<Group> work_groups() {
  return {{{"film", "movie", "picture"}}, {{"comedy", "romp", "farce"}}, {{"drama", "melodrama", "saga"}}};
}

inline std::vector<Group> verb_groups() {
  return {{{"seems", "appears", "looks"}}, {{"feels", "comes", "plays"}}, {{"delivers", "offers", "provides"}},
          {{"thought", "felt", "found"}}};
}

inline const std::vector<std::string>& intensifiers() {
  static const std::vector<std::string> w = {"really", "quite", "rather", "pretty", "truly", "fairly"};
  return w;
}

inline const std::vector<std::string>& openers() {
  static const std::vector<std::string> w = {"overall", "honestly", "frankly", "ultimately", "admittedly"};
  return w;
}

// Neutral adverbs for the insertion transform: none of them carries
// polarity, and most never occur in the corpus.
inline const std::vector<std::string>& neutral_adverbs() {
  static const std::vector<std::string> w = {
      "actually",   "apparently", "basically",   "certainly",  "clearly",     "commonly",   "currently",
      "definitely", "especially", "essentially", "eventually", "evidently",   "finally",    "frequently",
      "generally",  "gradually",  "largely",     "likewise",   "literally",   "mainly",     "meanwhile",
      "mostly",     "naturally",  "nonetheless", "normally",   "notably",     "obviously",  "occasionally",
      "originally", "particularly", "perhaps",   "possibly",   "presumably",  "primarily",  "probably",
      "reportedly", "seemingly",  "similarly",   "simply",     "specifically", "still",     "supposedly",
      "technically", "typically", "usually",     "virtually",  "apparently",  "arguably",   "broadly",
      "chiefly",    "consistently", "continually", "customarily", "deliberately", "directly", "entirely",
      "explicitly", "formally",   "increasingly", "initially"};
  return w;
}

inline std::size_t zipf_draw(std::size_t n, double exponent, RngStream& rng) {
  std::vector<double> w(n);
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) total += w[i] = 1.0 / std::pow(static_cast<double>(i + 1), exponent);
  double u = rng.uniform01() * total;
  for (std::size_t i = 0; i < n; ++i) {
    u -= w[i];
    if (u < 0) return i;
  }
  return n - 1;
}

}  // namespace desk

inline std::vector<std::string> desk_labels() { return desk::kLabels; }

inline DeskCorpus generate_desk_corpus(const DeskCorpusConfig& config = {}) {
  using namespace desk;
  auto pos_g = positive_groups(), neg_g = negative_groups();
  for (auto* gs : {&pos_g, &neg_g})
    for (auto& g : *gs) g.hidden = std::min(config.lexicon_only, g.members.size() - 1);
  const auto nouns = noun_groups(), works = work_groups(), verbs = verb_groups();

  DeskCorpus out;
  auto add_group = [&](const Group& g) {
    for (const auto& w : g.members) {
      std::vector<std::string> syns;
      for (const auto& s : g.members)
        if (s != w) syns.push_back(s);
      out.synonyms.add(w, syns);
    }
  };
  for (const std::vector<Group>* gs : std::initializer_list<const std::vector<Group>*>{&pos_g, &neg_g, &nouns, &works, &verbs})
    for (const auto& g : *gs) add_group(g);
  out.adverbs = neutral_adverbs();
  std::sort(out.adverbs.begin(), out.adverbs.end());
  out.adverbs.erase(std::unique(out.adverbs.begin(), out.adverbs.end()), out.adverbs.end());

  for (const std::vector<Group>* gs : std::initializer_list<const std::vector<Group>*>{&pos_g, &neg_g})
    for (const auto& g : *gs)
      for (const auto& w : g.members) out.pos.add(w, "ADJ");
  for (const std::vector<Group>* gs : std::initializer_list<const std::vector<Group>*>{&nouns, &works})
    for (const auto& g : *gs)
      for (const auto& w : g.members) out.pos.add(w, "NOUN");
  for (const auto& g : verbs)
    for (const auto& w : g.members) out.pos.add(w, "VERB");
  for (const auto& w : {"is", "was", "made"}) out.pos.add(w, "VERB");
  for (const auto& w : intensifiers()) out.pos.add(w, "ADV");
  for (const auto& w : openers()) out.pos.add(w, "ADV");
  for (const auto& w : out.adverbs) out.pos.add(w, "ADV");
  for (const auto& w : {"the", "a", "this", "its"}) out.pos.add(w, "DET");

  auto pick = [&](const Group& g, RngStream& rng) {
    const std::size_t visible = g.members.size() - g.hidden;
    return g.members[zipf_draw(visible, config.zipf_exponent, rng)];
  };
  auto uniform = [](const auto& v, RngStream& rng) -> const auto& { return v[rng.uniform_int(v.size())]; };

  auto adjective = [&](int polarity, RngStream& rng) {
    const auto& gs = polarity ? pos_g : neg_g;
    return pick(gs[rng.uniform_int(gs.size())], rng);
  };
  auto noun = [&](RngStream& rng) { return pick(uniform(nouns, rng), rng); };
  auto work = [&](RngStream& rng) { return pick(uniform(works, rng), rng); };
  auto intens = [&](RngStream& rng) { return rng.bernoulli(0.4) ? uniform(intensifiers(), rng) + " " : std::string(); };

  auto clause = [&](int polarity, RngStream& rng) -> std::string {
    const std::string a = adjective(polarity, rng);
    switch (rng.uniform_int(5)) {
      case 0: return "the " + noun(rng) + " of this " + work(rng) + " " + pick(verbs[0], rng) + " " + intens(rng) + a;
      case 1: return "i " + pick(verbs[3], rng) + " the " + noun(rng) + " " + intens(rng) + a;
      case 2: return "this is a " + intens(rng) + a + " " + work(rng) + " from start to finish";
      case 3: return "the director " + pick(verbs[2], rng) + " a " + a + " " + work(rng) + " here";
      default: return "all in all the " + noun(rng) + " " + pick(verbs[1], rng) + " " + intens(rng) + a;
    }
  };

  auto sentence = [&](RngStream& rng, int& label) {
    label = static_cast<int>(rng.uniform_int(2));
    const double u = rng.uniform01();
    const std::size_t slots = u < 0.4 ? 1 : (u < 0.75 ? 2 : 3);
    std::vector<int> pol(slots, label);
    if (slots == 3 && rng.bernoulli(0.5)) pol[rng.uniform_int(3)] = 1 - label;
    std::string s;
    if (rng.bernoulli(0.3)) s = uniform(openers(), rng) + " , ";
    for (std::size_t i = 0; i < slots; ++i) {
      if (i) s += rng.bernoulli(0.7) ? " , and " : " ; ";
      s += clause(pol[i], rng);
    }
    s += " .";
    if (rng.bernoulli(config.label_noise)) label = 1 - label;
    return s;
  };

  auto make = [&](Split split, std::size_t n, const std::string& name) {
    Dataset ds;
    ds.name = name;
    ds.split = split;
    ds.label_set = kLabels;
    const RngStream root(config.seed, {fnv1a64("desk-corpus"), fnv1a64(name)});
    for (std::size_t i = 0; i < n; ++i) {
      RngStream rng = root.child(i);
      int label = 0;
      std::string text = sentence(rng, label);
      ds.examples.push_back({name + "-" + std::to_string(i), std::nullopt, std::move(text), kLabels[label]});
    }
    return ds;
  };
  out.train = make(Split::train, config.train_size, "train");
  out.test = make(Split::test, config.test_size, "test");
  return out;
}

inline void write_desk_corpus(const DeskCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_dataset_tsv(corpus.train, dir / "train.tsv");
  write_dataset_tsv(corpus.test, dir / "test.tsv");
  corpus.synonyms.save(dir / "synonyms.tsv");
  save_word_list(corpus.adverbs, dir / "adverbs.txt");
  corpus.pos.save(dir / "pos.tsv");
}

}  // namespace textshield::harness

#endif  // TEXTSHIELD_HARNESS_DESK_CORPUS_HPP_
