#include "catlab/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "catlab/json_io.hpp"
#include "catlab/rng.hpp"

namespace catlab {

using nlohmann::json;

const char* attack_name(AttackKind kind) {
  return kind == AttackKind::Cat ? "cat" : "catplus";
}

namespace {

AttackKind attack_from_name(const std::string& name) {
  if (name == "cat") return AttackKind::Cat;
  if (name == "catplus") return AttackKind::CatPlus;
  throw std::invalid_argument("unknown attack '" + name + "' (expected cat, catplus or both)");
}

TrainConfig train_config_from_json(const json& j, TrainConfig base) {
  if (j.contains("learning_rate")) base.learning_rate = j["learning_rate"].get<double>();
  if (j.contains("weight_decay")) base.weight_decay = j["weight_decay"].get<double>();
  if (j.contains("lr_decay_gamma")) base.lr_decay_gamma = j["lr_decay_gamma"].get<double>();
  if (j.contains("epochs")) base.epochs = j["epochs"].get<std::size_t>();
  if (j.contains("batch_size")) base.batch_size = j["batch_size"].get<std::size_t>();
  if (j.contains("hidden_dim")) base.hidden_dim = j["hidden_dim"].get<std::size_t>();
  if (j.contains("seed")) base.seed = j["seed"].get<std::uint64_t>();
  return base;
}

json train_config_to_json(const TrainConfig& cfg) {
  return json{{"learning_rate", cfg.learning_rate},
              {"weight_decay", cfg.weight_decay},
              {"lr_decay_gamma", cfg.lr_decay_gamma},
              {"epochs", cfg.epochs},
              {"batch_size", cfg.batch_size},
              {"hidden_dim", cfg.hidden_dim},
              {"seed", cfg.seed}};
}

}  // namespace

void ExperimentConfig::validate() const {
  if (csv_path.has_value() == synth.has_value()) {
    throw std::invalid_argument("config: exactly one of dataset.csv / dataset.synth required");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("config: train_fraction must be in (0,1)");
  }
  if (y_tc < 0) throw std::invalid_argument("config: y_tc must be non-negative");
  if (attacks.empty()) throw std::invalid_argument("config: no attack selected");
  if (trigger_size < 1) throw std::invalid_argument("config: trigger_size must be >= 1");
  if (injection_rates.empty()) throw std::invalid_argument("config: injection_rates empty");
  for (double p : injection_rates) {
    if (!(p > 0.0 && p < 1.0)) {
      throw std::invalid_argument("config: injection rates must be in (0,1)");
    }
  }
  if (!(bayes.gamma > 0.0 && bayes.gamma < 1.0)) {
    throw std::invalid_argument("config: bayes.gamma must be in (0,1)");
  }
  if (defense.enabled) {
    for (std::size_t m : defense.clustering_nums) {
      if (m < 2) throw std::invalid_argument("config: defense clustering_nums must be >= 2");
    }
  }
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();

  if (!j.contains("dataset")) throw std::invalid_argument("config: missing dataset");
  const json& ds = j["dataset"];
  if (ds.contains("csv")) cfg.csv_path = ds["csv"].get<std::string>();
  if (ds.contains("synth")) {
    const json& s = ds["synth"];
    SynthConfig sc;
    sc.n_classes = s.value("n_classes", sc.n_classes);
    sc.n_samples = s.value("n_samples", sc.n_samples);
    sc.concept_count = s.value("L", sc.concept_count);
    sc.n_irrelevant = s.value("n_irrelevant", sc.n_irrelevant);
    sc.flip_noise = s.value("flip_noise", sc.flip_noise);
    sc.seed = s.contains("seed") ? s["seed"].get<std::uint64_t>() : derive_seed(cfg.seed, "synth");
    cfg.synth = sc;
  }

  cfg.train_fraction = j.value("train_fraction", cfg.train_fraction);
  cfg.y_tc = j.value("y_tc", cfg.y_tc);

  if (j.contains("attack")) {
    const std::string a = j["attack"].get<std::string>();
    if (a == "both") {
      cfg.attacks = {AttackKind::Cat, AttackKind::CatPlus};
    } else {
      cfg.attacks = {attack_from_name(a)};
    }
  }
  cfg.trigger_size = j.value("trigger_size", cfg.trigger_size);
  if (j.contains("injection_rates")) {
    cfg.injection_rates = j["injection_rates"].get<std::vector<double>>();
  }
  if (j.contains("mode")) {
    const std::string m = j["mode"].get<std::string>();
    if (m == "dirty") {
      cfg.mode = PoisonMode::DirtyLabel;
    } else if (m == "clean") {
      cfg.mode = PoisonMode::CleanLabel;
    } else {
      throw std::invalid_argument("config: mode must be dirty or clean");
    }
  }

  cfg.train.seed = derive_seed(cfg.seed, "train_mlp");
  if (j.contains("train")) cfg.train = train_config_from_json(j["train"], cfg.train);
  cfg.filter_train.seed = derive_seed(cfg.seed, "concept_filter");
  if (j.contains("filter_train")) {
    cfg.filter_train = train_config_from_json(j["filter_train"], cfg.filter_train);
  }

  if (j.contains("bayes")) {
    const json& b = j["bayes"];
    cfg.bayes.enabled = b.value("enabled", cfg.bayes.enabled);
    cfg.bayes.gamma = b.value("gamma", cfg.bayes.gamma);
    cfg.bayes.prior.alpha = b.value("prior_alpha", cfg.bayes.prior.alpha);
    cfg.bayes.prior.beta = b.value("prior_beta", cfg.bayes.prior.beta);
  }
  if (j.contains("robustness")) {
    const json& r = j["robustness"];
    cfg.robustness.enabled = r.value("enabled", cfg.robustness.enabled);
    cfg.robustness.flip_rate = r.value("q", cfg.robustness.flip_rate);
    cfg.robustness.n_samples = r.value("n_samples", cfg.robustness.n_samples);
  }
  if (j.contains("defense")) {
    const json& d = j["defense"];
    cfg.defense.enabled = d.value("enabled", cfg.defense.enabled);
    if (d.contains("clustering_nums")) {
      cfg.defense.clustering_nums = d["clustering_nums"].get<std::vector<std::size_t>>();
    }
  }
  cfg.validate();
  return cfg;
}

json ExperimentConfig::to_json() const {
  json j;
  j["seed"] = seed;
  json ds;
  if (csv_path) ds["csv"] = *csv_path;
  if (synth) {
    ds["synth"] = json{{"n_classes", synth->n_classes}, {"n_samples", synth->n_samples},
                       {"L", synth->concept_count},     {"n_irrelevant", synth->n_irrelevant},
                       {"flip_noise", synth->flip_noise}, {"seed", synth->seed}};
  }
  j["dataset"] = ds;
  j["train_fraction"] = train_fraction;
  j["y_tc"] = y_tc;
  if (attacks.size() == 2) {
    j["attack"] = "both";
  } else {
    j["attack"] = attack_name(attacks.front());
  }
  j["trigger_size"] = trigger_size;
  j["injection_rates"] = injection_rates;
  j["mode"] = mode == PoisonMode::DirtyLabel ? "dirty" : "clean";
  j["train"] = train_config_to_json(train);
  j["filter_train"] = train_config_to_json(filter_train);
  j["bayes"] = json{{"enabled", bayes.enabled},
                    {"gamma", bayes.gamma},
                    {"prior_alpha", bayes.prior.alpha},
                    {"prior_beta", bayes.prior.beta}};
  j["robustness"] = json{{"enabled", robustness.enabled},
                         {"q", robustness.flip_rate},
                         {"n_samples", robustness.n_samples}};
  j["defense"] = json{{"enabled", defense.enabled},
                      {"clustering_nums", defense.clustering_nums}};
  return j;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();

  ExperimentReport report;
  report.config = config;

  const ConceptDataset dataset =
      config.csv_path ? load_csv(*config.csv_path) : synth_generate(*config.synth);
  if (config.y_tc >= dataset.class_count()) {
    throw std::invalid_argument("config: y_tc out of range for dataset with " +
                                std::to_string(dataset.class_count()) + " classes");
  }
  report.dataset_n = dataset.size();
  report.concept_count = dataset.concept_count();
  report.n_classes = dataset.class_count();
  report.sparsity = sparsity_profile(dataset);

  const auto [train_set, test_set] =
      split(dataset, config.train_fraction, derive_seed(config.seed, "split"));
  report.train_n = train_set.size();
  report.test_n = test_set.size();

  const MlpModel clean_model = train_mlp(train_set, config.train);
  report.clean_train_accuracy = accuracy(clean_model, train_set);
  report.clean_test_accuracy = accuracy(clean_model, test_set);

  for (AttackKind kind : config.attacks) {
    AttackResult attack;
    attack.kind = kind;
    if (kind == AttackKind::Cat) {
      attack.trigger = cat_trigger(train_set, config.y_tc, config.trigger_size, config.filter_train);
    } else {
      CatPlusResult cp = catplus_trigger(train_set, config.y_tc, config.trigger_size);
      attack.trigger = std::move(cp.trigger);
      attack.trace = std::move(cp.trace);
    }

    for (std::size_t r = 0; r < config.injection_rates.size(); ++r) {
      const double rate = config.injection_rates[r];
      RateResult result;
      result.injection_rate = rate;

      PoisonPlan plan;
      plan.trigger = attack.trigger;
      plan.y_tc = config.y_tc;
      plan.injection_rate = rate;
      plan.mode = config.mode;
      plan.seed = derive_seed(config.seed, attack_name(kind), r);
      const PoisonOutcome outcome = poison_dataset(train_set, plan);

      // Retrain with the same hyper-parameters and seed as the clean model.
      const MlpModel poisoned_model = train_mlp(outcome.poisoned, config.train);
      result.eval = full_evaluation(clean_model, poisoned_model, test_set, attack.trigger,
                                    config.y_tc, rate);

      if (config.bayes.enabled) {
        // Per-sample reading: one trial per cache row, success = activation.
        result.bayes_trials = static_cast<long long>(result.eval.cache_size);
        result.bayes_successes = static_cast<long long>(result.eval.trigger_activations);
        const BetaParams posterior =
            beta_posterior(config.bayes.prior, result.bayes_trials, result.bayes_successes);
        result.bayes = {posterior, beta_interval(posterior, config.bayes.gamma)};
      }
      if (config.robustness.enabled) {
        PerturbationConfig pc;
        pc.flip_rate = config.robustness.flip_rate;
        pc.n_samples = config.robustness.n_samples;
        pc.seed = derive_seed(config.seed, "robustness", r);
        ConceptDataset eval_rows = poison_test_cache(test_set, attack.trigger, config.y_tc);
        result.robustness = robustness_mc(poisoned_model, eval_rows, attack.trigger, config.y_tc, pc);
      }
      if (config.defense.enabled) {
        for (std::size_t m : config.defense.clustering_nums) {
          const EnsembleDefense ensemble = train_ensemble(
              outcome.poisoned, m, config.train, derive_seed(config.seed, "defense", m));
          result.defense.push_back(
              evaluate_defense(ensemble, poisoned_model, test_set, attack.trigger, config.y_tc));
        }
      }
      attack.rates.push_back(std::move(result));
    }
    report.attacks.push_back(std::move(attack));
  }
  return report;
}

json ExperimentReport::to_json() const {
  json j;
  j["schema"] = "catlab-report-v1";
  j["config"] = config.to_json();
  j["dataset"] = json{{"n", dataset_n},
                      {"L", concept_count},
                      {"n_classes", n_classes},
                      {"train_n", train_n},
                      {"test_n", test_n},
                      {"positive_fraction", sparsity.positive_fraction},
                      {"polarity", sparsity.polarity == Polarity::Positive ? "Positive" : "Negative"}};
  j["clean_model"] = json{{"train_accuracy", clean_train_accuracy},
                          {"test_accuracy", clean_test_accuracy}};
  json attacks_json;
  for (const auto& attack : attacks) {
    json a;
    a["trigger"] = catlab::to_json(attack.trigger);
    if (attack.kind == AttackKind::CatPlus) {
      json trace = json::array();
      for (const auto& rec : attack.trace) trace.push_back(catlab::to_json(rec));
      a["trace"] = trace;
    } else {
      a["trace"] = nullptr;
    }
    json rates_json = json::array();
    for (const auto& rate : attack.rates) {
      json r;
      r["injection_rate"] = rate.injection_rate;
      r["eval"] = catlab::to_json(rate.eval);
      if (rate.bayes) {
        r["bayes"] = json{{"trials", rate.bayes_trials},
                          {"successes", rate.bayes_successes},
                          {"posterior", catlab::to_json(rate.bayes->first)},
                          {"interval", catlab::to_json(rate.bayes->second)}};
      } else {
        r["bayes"] = nullptr;
      }
      r["robustness"] = rate.robustness ? catlab::to_json(*rate.robustness) : json(nullptr);
      if (rate.defense.empty()) {
        r["defense"] = nullptr;
      } else {
        json d = json::array();
        for (const auto& rep : rate.defense) d.push_back(catlab::to_json(rep));
        r["defense"] = d;
      }
      rates_json.push_back(std::move(r));
    }
    a["rates"] = std::move(rates_json);
    attacks_json[attack_name(attack.kind)] = std::move(a);
  }
  j["attacks"] = std::move(attacks_json);
  return j;
}

namespace {

std::string percent_cell(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

const AttackResult* find_attack(const std::vector<AttackResult>& attacks, AttackKind kind) {
  for (const auto& a : attacks) {
    if (a.kind == kind) return &a;
  }
  return nullptr;
}

}  // namespace

std::string ExperimentReport::to_markdown() const {
  const AttackResult* cat = find_attack(attacks, AttackKind::Cat);
  const AttackResult* catplus = find_attack(attacks, AttackKind::CatPlus);

  std::string md;
  md += "# Attack evaluation\n\n";
  md += "Dataset: n=" + std::to_string(dataset_n) + ", L=" + std::to_string(concept_count) +
        ", classes=" + std::to_string(n_classes) + ", target class " + std::to_string(config.y_tc) +
        ", trigger size " + std::to_string(config.trigger_size) + ".\n\n";
  md += "| Original task accuracy (%) | Task accuracy (%) CAT | Task accuracy (%) CAT+ "
        "| ASR (%) CAT | ASR (%) CAT+ | Injection rate (%) |\n";
  md += "|---|---|---|---|---|---|\n";
  for (std::size_t r = 0; r < config.injection_rates.size(); ++r) {
    auto cell_acc = [&](const AttackResult* a) {
      return a ? percent_cell(a->rates[r].eval.acc_retrained_wo) : std::string("-");
    };
    auto cell_asr = [&](const AttackResult* a) {
      return a ? percent_cell(a->rates[r].eval.asr) : std::string("-");
    };
    md += "| " + percent_cell(clean_test_accuracy) + " | " + cell_acc(cat) + " | " +
          cell_acc(catplus) + " | " + cell_asr(cat) + " | " + cell_asr(catplus) + " | " +
          percent_cell(config.injection_rates[r]) + " |\n";
  }

  md += "\n## Bounds\n\n";
  md += "| Attack | Injection rate (%) | Measured drop | Bound p*dAcc | Holds | SR lower | SR upper |\n";
  md += "|---|---|---|---|---|---|---|\n";
  for (const auto& attack : attacks) {
    for (const auto& rate : attack.rates) {
      char buf[64];
      auto num = [&buf](double v) {
        if (std::isnan(v)) return std::string("-");
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return std::string(buf);
      };
      md += std::string("| ") + attack_name(attack.kind) + " | " +
            percent_cell(rate.injection_rate) + " | " + num(rate.eval.measured_drop) + " | " +
            num(rate.eval.degradation_bound) + " | " + (rate.eval.bound_holds ? "yes" : "no") +
            " | " + num(rate.eval.sr_lower) + " | " + num(rate.eval.sr_upper) + " |\n";
    }
  }

  bool any_defense = false;
  for (const auto& attack : attacks) {
    for (const auto& rate : attack.rates) {
      if (!rate.defense.empty()) any_defense = true;
    }
  }
  if (any_defense) {
    md += "\n## Defense\n\n";
    md += "| Attack | Injection rate (%) | Clustering num | Clean accuracy (%) | ASR (%) | "
          "Baseline ASR (%) | Reduction (pp) |\n";
    md += "|---|---|---|---|---|---|---|\n";
    for (const auto& attack : attacks) {
      for (const auto& rate : attack.rates) {
        for (const auto& d : rate.defense) {
          md += std::string("| ") + attack_name(attack.kind) + " | " +
                percent_cell(rate.injection_rate) + " | " + std::to_string(d.clustering_num) +
                " | " + percent_cell(d.ensemble_clean_accuracy) + " | " +
                percent_cell(d.ensemble_asr) + " | " + percent_cell(d.baseline_asr) + " | " +
                percent_cell(d.asr_reduction) + " |\n";
        }
      }
    }
  }
  return md;
}

ExperimentReport run_experiment_to_dir(const ExperimentConfig& config, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const ExperimentReport report = run_experiment(config);
  write_json_file(report.to_json(), (std::filesystem::path(out_dir) / "report.json").string());
  std::ofstream md((std::filesystem::path(out_dir) / "report.md").string());
  if (!md) throw std::runtime_error("cannot write report.md in " + out_dir);
  md << report.to_markdown();
  return report;
}

}  // namespace catlab
