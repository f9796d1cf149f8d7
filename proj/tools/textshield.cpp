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

// textshield: command-line front end for the attack/detect/defend pipeline.
//
// Exit status: 0 on success, 1 on runtime errors, 2 on usage errors
// (unknown flags, missing input files, empty report directories).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "textshield/harness/config.hpp"
#include "textshield/harness/desk_corpus.hpp"
#include "textshield/harness/pipeline.hpp"
#include "textshield/harness/report.hpp"

namespace fs = std::filesystem;
using namespace textshield;
using namespace textshield::harness;

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

// Options shared by every subcommand. Flags override the config file.
struct Common {
  std::string config_path;
  std::string data_dir;
  std::optional<std::uint64_t> seed;
  bool print_config = false;

  void attach(CLI::App* sub, bool needs_data) {
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    auto* d = sub->add_option("--data", data_dir, "corpus directory (train.tsv, test.tsv, synonyms.tsv, adverbs.txt, pos.tsv)")
                  ->check(CLI::ExistingDirectory);
    if (needs_data) d->required();
    sub->add_option("--seed", seed, "global seed");
    sub->add_flag("--print-config", print_config, "print the effective config and exit");
  }

  PipelineConfig load() const {
    PipelineConfig c = config_path.empty() ? PipelineConfig{} : PipelineConfig::load(config_path);
    if (seed) c.seed = *seed;
    return c;
  }
};

AttackFamily family_arg(const std::string& s) {
  try {
    return attack_family_from_string(s);
  } catch (const Error& e) {
    throw InputError(e.what());
  }
}

TransformKind transform_arg(const std::string& s) {
  try {
    return transform_kind_from_string(s);
  } catch (const Error& e) {
    throw InputError(e.what());
  }
}

World open_world(const std::string& dir, const PipelineConfig& c) {
  for (const char* f : {"train.tsv", "test.tsv", "synonyms.tsv", "adverbs.txt", "pos.tsv"})
    if (!fs::exists(fs::path(dir) / f)) throw InputError("missing corpus file " + (fs::path(dir) / f).string());
  return load_world(dir, c.world);
}

Dataset open_dataset(const std::string& path, Split split) {
  if (!fs::exists(path)) throw InputError("missing dataset file " + path);
  const bool jsonl = fs::path(path).extension() == ".jsonl";
  return load_dataset(path, jsonl ? DatasetFormat::jsonl : DatasetFormat::tsv, split);
}

ClassifierModel open_victim(const std::string& path) {
  if (!fs::exists(path)) throw InputError("missing victim model " + path);
  return ClassifierModel::load(path);
}

std::shared_ptr<const DetectorModel> open_detector(const std::string& path) {
  if (!fs::exists(path)) throw InputError("missing detector model " + path);
  return std::make_shared<const DetectorModel>(DetectorModel::load(path));
}

ExperimentRecord single_record(const std::string& path) {
  if (!fs::exists(path)) throw InputError("missing record file " + path);
  auto recs = read_records(path);
  if (recs.size() != 1) throw Error(path + ": expected exactly one record, found " + std::to_string(recs.size()));
  return recs.front();
}

void write_one(const ExperimentRecord& r, const std::string& out) {
  write_records({r}, out);
  std::cerr << r.name << ": success rate " << pct(r.metrics.attack_success_rate) << "%, after-attack accuracy "
            << pct(r.metrics.after_attack_accuracy) << "% -> " << out << '\n';
}

bool print_if_asked(const Common& c, const PipelineConfig& cfg) {
  if (!c.print_config) return false;
  std::cout << cfg.to_json().dump(2) << '\n';
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"textshield: anomaly detection and randomization defenses against textual adversarial attacks"};
  app.require_subcommand(1);

  // ---- desk-corpus ---------------------------------------------------------
  DeskCorpusConfig desk;
  std::string desk_out;
  auto* desk_cmd = app.add_subcommand("desk-corpus", "generate the synthetic desk corpus");
  desk_cmd->add_option("--out", desk_out, "output directory")->required();
  desk_cmd->add_option("--seed", desk.seed, "corpus seed");
  desk_cmd->add_option("--train-size", desk.train_size, "training examples");
  desk_cmd->add_option("--test-size", desk.test_size, "test examples");
  desk_cmd->add_option("--label-noise", desk.label_noise, "fraction of flipped labels");

  // ---- train-victim --------------------------------------------------------
  Common tv;
  std::string tv_augment, tv_out;
  auto* tv_cmd = app.add_subcommand("train-victim", "train the victim classifier");
  tv.attach(tv_cmd, true);
  tv_cmd->add_option("--augment", tv_augment, "augment the training set with this transform");
  tv_cmd->add_option("--out", tv_out, "model path")->required();

  // ---- gen-adv -------------------------------------------------------------
  Common ga;
  std::string ga_family, ga_victim, ga_out, ga_split = "all";
  auto* ga_cmd = app.add_subcommand("gen-adv", "attack a split to build an adversarial pool");
  ga.attach(ga_cmd, true);
  ga_cmd->add_option("--family", ga_family, "attack family");
  ga_cmd->add_option("--victim", ga_victim, "victim model (default: train the clean victim)")->check(CLI::ExistingFile);
  ga_cmd->add_option("--split", ga_split, "train, test or all")->check(CLI::IsMember({"train", "test", "all"}));
  ga_cmd->add_option("--out", ga_out, "record file")->required();

  // ---- train-detector ------------------------------------------------------
  Common td;
  std::vector<std::string> td_pools;
  std::string td_mode = "specific", td_out;
  std::optional<std::size_t> td_limit;
  auto* td_cmd = app.add_subcommand("train-detector", "train an anomaly detector from adversarial pools");
  td.attach(td_cmd, true);
  td_cmd->add_option("--pool", td_pools, "pool record files from gen-adv")->required()->check(CLI::ExistingFile);
  td_cmd->add_option("--mode", td_mode, "specific or general")->check(CLI::IsMember({"specific", "general"}));
  td_cmd->add_option("--train-examples", td_limit, "use outcomes with index below this");
  td_cmd->add_option("--out", td_out, "model path")->required();

  // ---- detect --------------------------------------------------------------
  std::string dt_detector, dt_input, dt_out;
  std::optional<double> dt_threshold;
  auto* dt_cmd = app.add_subcommand("detect", "score texts (one per line) with a detector");
  dt_cmd->add_option("--detector", dt_detector, "detector model")->required()->check(CLI::ExistingFile);
  dt_cmd->add_option("--input", dt_input, "text file, one text per line")->required()->check(CLI::ExistingFile);
  dt_cmd->add_option("--threshold", dt_threshold, "flag threshold (default: the detector's)");
  dt_cmd->add_option("--out", dt_out, "JSONL output (default: stdout)");

  // ---- attack --------------------------------------------------------------
  Common at;
  std::string at_family, at_dataset, at_victim, at_detector, at_out;
  std::optional<std::uint64_t> at_budget;
  std::optional<double> at_threshold;
  bool at_anomaly = false;
  auto* at_cmd = app.add_subcommand("attack", "attack the undefended victim");
  at.attach(at_cmd, false);
  at_cmd->add_option("--family", at_family, "attack family");
  at_cmd->add_option("--dataset", at_dataset, "examples to attack (required unless --print-config)")
      ->check(CLI::ExistingFile);
  at_cmd->add_option("--victim", at_victim, "victim model (default: train the clean victim)")->check(CLI::ExistingFile);
  at_cmd->add_option("--budget", at_budget, "victim queries per example");
  at_cmd->add_flag("--anomaly-constraint", at_anomaly, "reject candidates the detector flags");
  at_cmd->add_option("--detector", at_detector, "detector for --anomaly-constraint")->check(CLI::ExistingFile);
  at_cmd->add_option("--threshold", at_threshold, "anomaly threshold");
  at_cmd->add_option("--out", at_out, "record file (default: attack_<family>_s<seed>.jsonl)");

  // ---- randomize -----------------------------------------------------------
  Common rz;
  std::string rz_records, rz_transform, rz_victim, rz_out;
  bool rz_augmented = false;
  auto* rz_cmd = app.add_subcommand("randomize", "randomize the adversarial texts of an attack record once");
  rz.attach(rz_cmd, true);
  rz_cmd->add_option("--records", rz_records, "record file from attack")->required()->check(CLI::ExistingFile);
  rz_cmd->add_option("--transform", rz_transform, "randomization process");
  rz_cmd->add_option("--victim", rz_victim, "classifier (default: clean victim)")->check(CLI::ExistingFile);
  rz_cmd->add_flag("--augmented", rz_augmented, "default classifier trained with the transform's augmentation");
  rz_cmd->add_option("--out", rz_out, "record file")->required();

  // ---- defend --------------------------------------------------------------
  Common df;
  std::string df_family, df_dataset, df_transform, df_victim, df_detector, df_out;
  std::optional<double> df_threshold;
  std::optional<std::size_t> df_k, df_verdict_m;
  bool df_no_gate = false, df_memo = false, df_adaptive = false;
  auto* df_cmd = app.add_subcommand("defend", "attack the detector-gated randomized victim");
  df.attach(df_cmd, false);
  df_cmd->add_option("--family", df_family, "attack family");
  df_cmd->add_option("--dataset", df_dataset, "examples to attack (default: the corpus test split)")
      ->check(CLI::ExistingFile);
  df_cmd->add_option("--transform", df_transform, "randomization process");
  df_cmd->add_option("--victim", df_victim, "classifier (default: trained with the transform's augmentation)")
      ->check(CLI::ExistingFile);
  df_cmd->add_option("--detector", df_detector, "gate detector (default: train the general detector)")
      ->check(CLI::ExistingFile);
  df_cmd->add_flag("--no-gate", df_no_gate, "randomize every query");
  df_cmd->add_flag("--memo", df_memo, "one randomization draw per distinct text");
  df_cmd->add_option("--threshold", df_threshold, "gate threshold");
  df_cmd->add_option("--verdict-m", df_verdict_m, "fresh defended queries per success verdict");
  df_cmd->add_flag("--adaptive", df_adaptive, "expectation-over-transformation attack");
  df_cmd->add_option("--k", df_k, "EOT samples per query (implies --adaptive)");
  df_cmd->add_option("--out", df_out, "record file (default: defend_<family>_s<seed>.jsonl)");

  // ---- evaluate ------------------------------------------------------------
  std::string ev_records;
  auto* ev_cmd = app.add_subcommand("evaluate", "recompute and print metrics of record files");
  ev_cmd->add_option("--records", ev_records, "record file or output directory")->required()->check(CLI::ExistingPath);

  // ---- report --------------------------------------------------------------
  std::string rp_records, rp_out;
  auto* rp_cmd = app.add_subcommand("report", "fold stored records into CSV tables and plot data");
  rp_cmd->add_option("--records", rp_records, "output directory of run")->required();
  rp_cmd->add_option("--out", rp_out, "report directory (default: <records>/report)");

  // ---- run -----------------------------------------------------------------
  Common rn;
  std::string rn_out;
  std::optional<std::size_t> rn_repeats;
  auto* rn_cmd = app.add_subcommand("run", "run every stage and write records plus the report");
  rn.attach(rn_cmd, false);
  rn_cmd->add_option("--out", rn_out, "output directory")->required();
  rn_cmd->add_option("--repeats", rn_repeats, "repeats of randomized evaluations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*desk_cmd) {
      write_desk_corpus(generate_desk_corpus(desk), desk_out);
      std::cerr << "desk corpus written to " << desk_out << '\n';
      return 0;
    }

    if (*tv_cmd) {
      auto cfg = tv.load();
      if (print_if_asked(tv, cfg)) return 0;
      Pipeline p(open_world(tv.data_dir, cfg), cfg);
      auto model = tv_augment.empty() ? p.victim() : p.augmented_victim(transform_arg(tv_augment));
      model->save(tv_out);
      std::cerr << "test accuracy " << pct(accuracy(*model, p.world().test)) << "% -> " << tv_out << '\n';
      return 0;
    }

    if (*ga_cmd) {
      auto cfg = ga.load();
      if (!ga_family.empty()) cfg.family = family_arg(ga_family);
      if (print_if_asked(ga, cfg)) return 0;
      Pipeline p(open_world(ga.data_dir, cfg), cfg);
      auto victim = ga_victim.empty() ? p.victim() : std::make_shared<const ClassifierModel>(open_victim(ga_victim));
      const Dataset& ds = ga_split == "all" ? p.pool_source() : ga_split == "train" ? p.world().train : p.world().test;
      ClassifierEndpoint ep(victim);
      write_one(run_attack(Attack(p.attack_spec(cfg.family)), ep, ds, cfg.seed,
                           {std::string("pool/") + to_string(cfg.family), cfg.digest(), 1}),
                ga_out);
      return 0;
    }

    if (*td_cmd) {
      auto cfg = td.load();
      if (td_limit) cfg.detector_train_examples = *td_limit;
      if (print_if_asked(td, cfg)) return 0;
      Pipeline p(open_world(td.data_dir, cfg), cfg);
      std::vector<std::string> normal, adv;
      std::vector<DetectorSource> prov;
      for (std::size_t k = 0; k < td_pools.size(); ++k) {
        const auto rec = single_record(td_pools[k]);
        const std::size_t n = std::min(cfg.detector_train_examples, rec.per_example.size());
        std::size_t used = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const auto& o = rec.per_example[i];
          if (k == 0) normal.push_back(detokenize(tokenize(o.original_text)));
          if (o.status == AttackStatus::success) {
            adv.push_back(o.final_text);
            ++used;
          }
        }
        prov.push_back({td_pools[k], rec.name, used});
      }
      if (adv.empty()) throw Error("the pools contain no successful adversarial examples");
      auto model = train_detector(normal, adv, p.detector_encoder(), cfg.detector);
      model.mode = td_mode == "general" ? DetectorMode::general : DetectorMode::specific;
      model.provenance = prov;
      model.save(td_out);
      std::cerr << "detector trained on " << normal.size() << " normal and " << adv.size() << " adversarial texts -> "
                << td_out << '\n';
      return 0;
    }

    if (*dt_cmd) {
      const auto det = open_detector(dt_detector);
      const double thr = dt_threshold.value_or(det->threshold());
      std::ifstream in(dt_input);
      std::ofstream file;
      if (!dt_out.empty()) {
        file.open(dt_out, std::ios::binary);
        if (!file) throw Error("cannot write " + dt_out);
      }
      std::ostream& out = dt_out.empty() ? std::cout : file;
      std::string line;
      while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto r = detect(*det, line, thr);
        nlohmann::ordered_json j;
        j["text"] = line;
        j["degree"] = r.degree;
        j["flag"] = r.flag;
        out << j.dump() << '\n';
      }
      return 0;
    }

    if (*at_cmd) {
      auto cfg = at.load();
      if (!at_family.empty()) cfg.family = family_arg(at_family);
      if (at_budget) cfg.attack_budget = *at_budget;
      if (at_anomaly) cfg.anomaly_constraint = true;
      if (at_threshold) cfg.defense_threshold = *at_threshold;
      cfg.validate();
      if (print_if_asked(at, cfg)) return 0;
      if (at_dataset.empty()) throw InputError("attack needs --dataset");
      const std::string data = at.data_dir.empty() ? fs::path(at_dataset).parent_path().string() : at.data_dir;
      Pipeline p(open_world(data.empty() ? "." : data, cfg), cfg);
      const Dataset ds = open_dataset(at_dataset, Split::test);
      auto victim = at_victim.empty() ? p.victim() : std::make_shared<const ClassifierModel>(open_victim(at_victim));
      ClassifierEndpoint ep(victim);
      Attack attack(p.attack_spec(cfg.family));
      if (cfg.anomaly_constraint)
        attack = with_anomaly_constraint(attack, at_detector.empty() ? p.general_detector() : open_detector(at_detector),
                                         cfg.defense_threshold);
      const std::string out = at_out.empty() ? "attack_" + std::string(to_string(cfg.family)) + "_s" +
                                                   std::to_string(cfg.seed) + ".jsonl"
                                             : at_out;
      write_one(run_attack(attack, ep, ds, cfg.seed,
                           {(cfg.anomaly_constraint ? "constrained/" : "undefended/") + std::string(to_string(cfg.family)),
                            cfg.digest(), 1}),
                out);
      return 0;
    }

    if (*rz_cmd) {
      auto cfg = rz.load();
      if (!rz_transform.empty()) cfg.defense_transform = transform_arg(rz_transform);
      if (print_if_asked(rz, cfg)) return 0;
      Pipeline p(open_world(rz.data_dir, cfg), cfg);
      const auto undefended = single_record(rz_records);
      std::shared_ptr<const ClassifierModel> victim;
      if (!rz_victim.empty()) victim = std::make_shared<const ClassifierModel>(open_victim(rz_victim));
      else victim = rz_augmented ? p.augmented_victim(cfg.defense_transform) : p.victim();
      ClassifierEndpoint ep(victim);
      const Transformer t(p.world().transform_config(cfg.defense_transform));
      const auto rec = randomize_after_attack(undefended, t.as_function(), ep, cfg.seed,
                                              "after/" + undefended.name + "/" + to_string(cfg.defense_transform));
      const auto st = after_attack_stats(undefended, rec);
      write_records({rec}, rz_out);
      std::cerr << "restored " << st.restored << " of " << st.successful << " adversarial examples; after-attack accuracy "
                << pct(st.baseline_accuracy) << "% -> " << pct(st.after_attack_accuracy) << "% -> " << rz_out << '\n';
      return 0;
    }

    if (*df_cmd) {
      auto cfg = df.load();
      if (!df_family.empty()) cfg.family = family_arg(df_family);
      if (!df_transform.empty()) cfg.defense_transform = transform_arg(df_transform);
      if (df_threshold) cfg.defense_threshold = *df_threshold;
      if (df_verdict_m) cfg.verdict_m = *df_verdict_m;
      if (df_memo) cfg.fresh_draw = false;
      if (df_k) {
        cfg.adaptive_k = *df_k;
        df_adaptive = true;
      }
      cfg.validate();
      if (print_if_asked(df, cfg)) return 0;
      if (df.data_dir.empty()) throw InputError("defend needs --data");
      Pipeline p(open_world(df.data_dir, cfg), cfg);
      const Dataset ds = df_dataset.empty() ? p.world().test : open_dataset(df_dataset, Split::test);
      auto victim = df_victim.empty() ? p.augmented_victim(cfg.defense_transform)
                                      : std::make_shared<const ClassifierModel>(open_victim(df_victim));
      std::shared_ptr<const AnomalyScorer> gate;
      if (!df_no_gate) gate = df_detector.empty() ? p.general_detector() : open_detector(df_detector);
      DefenseConfig dc;
      dc.threshold = cfg.defense_threshold;
      dc.gate = !df_no_gate;
      dc.fresh_draw = cfg.fresh_draw;
      dc.seed = cfg.seed;
      const auto tc = p.world().transform_config(cfg.defense_transform);
      auto ep = wrap(std::make_shared<ClassifierEndpoint>(victim), gate, tc, dc);
      Attack attack(p.attack_spec(cfg.family));
      if (df_adaptive) {
        const Transformer t(tc);
        attack = eot_adaptive(attack, {cfg.adaptive_k, std::make_shared<TransformDistribution>(
                                                           std::vector<TextTransform>{t.as_function()})});
      }
      const std::string out = df_out.empty() ? "defend_" + std::string(to_string(cfg.family)) + "_s" +
                                                   std::to_string(cfg.seed) + ".jsonl"
                                             : df_out;
      write_one(run_attack(attack, *ep, ds, cfg.seed,
                           {(df_adaptive ? "adaptive/" : "framework/") + std::string(to_string(cfg.family)),
                            cfg.digest(), cfg.verdict_m}),
                out);
      std::cerr << "detector calls " << ep->detector_calls() << ", randomized queries " << ep->randomized_calls() << '\n';
      return 0;
    }

    if (*ev_cmd) {
      std::vector<ExperimentRecord> recs;
      std::vector<DetectionScores> dets;
      if (fs::is_directory(ev_records)) {
        auto in = load_report_inputs(ev_records);
        for (auto& [name, r] : in.records) recs.push_back(r);
        dets = in.detection;
      } else {
        recs = read_records(ev_records);
      }
      bool ok = true;
      for (const auto& r : recs) {
        const bool consistent = r.consistent();
        ok = ok && consistent;
        nlohmann::ordered_json j;
        j["name"] = r.name;
        j["consistent"] = consistent;
        j["metrics"] = to_json(compute_metrics(r.per_example));
        std::cout << j.dump() << '\n';
      }
      for (const auto& d : dets) {
        const auto m = detection_metrics(d);
        nlohmann::ordered_json j;
        j["name"] = "detection/" + d.name;
        j["accuracy"] = m.accuracy;
        j["precision"] = m.precision;
        j["recall"] = m.recall;
        j["f1"] = m.f1;
        std::cout << j.dump() << '\n';
      }
      return ok ? 0 : kRuntimeError;
    }

    if (*rp_cmd) {
      const auto in = load_report_inputs(rp_records);
      const fs::path out = rp_out.empty() ? fs::path(rp_records) / "report" : fs::path(rp_out);
      for (const auto& name : write_report(in, out)) std::cout << (out / name).string() << '\n';
      return 0;
    }

    if (*rn_cmd) {
      auto cfg = rn.load();
      if (rn_repeats) cfg.repeats = *rn_repeats;
      cfg.validate();
      if (print_if_asked(rn, cfg)) return 0;
      World world = rn.data_dir.empty() ? build_world(generate_desk_corpus(), cfg.world) : open_world(rn.data_dir, cfg);
      Pipeline p(std::move(world), cfg);
      p.run_all(rn_out, [](const std::string& stage) { std::cerr << "stage: " << stage << '\n'; });
      const auto names = write_report(load_report_inputs(rn_out), fs::path(rn_out) / "report");
      std::cerr << "wrote " << names.size() << " report files to " << (fs::path(rn_out) / "report").string() << '\n';
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}
