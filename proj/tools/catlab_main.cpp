// catlab: command-line driver for dataset generation, attack construction,
// training, evaluation, statistics, defense and full experiment runs.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "catlab/defense.hpp"
#include "catlab/evaluate.hpp"
#include "catlab/experiment.hpp"
#include "catlab/json_io.hpp"
#include "catlab/learner.hpp"
#include "catlab/poison.hpp"
#include "catlab/stats.hpp"
#include "catlab/trigger_select.hpp"

namespace {

using nlohmann::json;

// Any output file registered here is removed when a stage fails, so a
// failing run never leaves partial outputs behind.
class OutputGuard {
 public:
  void track(const std::string& path) { paths_.push_back(path); }
  void commit() { paths_.clear(); }
  ~OutputGuard() {
    for (const auto& p : paths_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  }

 private:
  std::vector<std::string> paths_;
};

catlab::TrainConfig train_config_from_file(const std::string& path, catlab::TrainConfig base) {
  if (path.empty()) return base;
  const json j = catlab::read_json_file(path);
  if (j.contains("learning_rate")) base.learning_rate = j["learning_rate"].get<double>();
  if (j.contains("weight_decay")) base.weight_decay = j["weight_decay"].get<double>();
  if (j.contains("lr_decay_gamma")) base.lr_decay_gamma = j["lr_decay_gamma"].get<double>();
  if (j.contains("epochs")) base.epochs = j["epochs"].get<std::size_t>();
  if (j.contains("batch_size")) base.batch_size = j["batch_size"].get<std::size_t>();
  if (j.contains("hidden_dim")) base.hidden_dim = j["hidden_dim"].get<std::size_t>();
  if (j.contains("seed")) base.seed = j["seed"].get<std::uint64_t>();
  return base;
}

std::pair<double, double> parse_prior(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw CLI::ValidationError("--prior expects 'alpha,beta'");
  }
  return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
}

void emit(const json& j, const std::string& out_path, OutputGuard& guard) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    guard.track(out_path);
    catlab::write_json_file(j, out_path);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"catlab: concept-space backdoor attack laboratory"};
  app.require_subcommand(1);

  OutputGuard guard;

  // generate
  auto* generate = app.add_subcommand("generate", "Generate a dataset CSV (+ sidecar metadata)");
  struct {
    std::string out;
    std::string means;
    std::string config;
    int classes = 4;
    std::size_t samples = 2000;
    std::size_t concepts = 20;
    std::size_t irrelevant = 2;
    double noise = 0.05;
    std::size_t per_class = 100;
    std::uint64_t seed = 1;
  } gen;
  generate->add_option("--out", gen.out, "Output CSV path")->required();
  generate->add_option("--config", gen.config,
                       "Generator config JSON (n_classes, n_samples, L, n_irrelevant, flip_noise, seed)");
  generate->add_option("--classes", gen.classes, "Number of classes");
  generate->add_option("--samples", gen.samples, "Number of samples");
  generate->add_option("--concepts", gen.concepts, "Concept count L");
  generate->add_option("--irrelevant", gen.irrelevant, "Planted label-independent concepts");
  generate->add_option("--noise", gen.noise, "Per-bit flip probability");
  generate->add_option("--means", gen.means,
                       "JSON file with per-class concept means; switches to mean-based imputation");
  generate->add_option("--per-class", gen.per_class, "Samples per class for --means");
  generate->add_option("--seed", gen.seed, "RNG seed");

  // attack
  auto* attack = app.add_subcommand("attack", "Build a trigger (and optionally a poisoned CSV)");
  struct {
    std::string dataset;
    std::string out;
    std::string trace;
    std::string method = "cat";
    std::string train_config;
    std::string poison_out;
    std::string mode = "dirty";
    int target = 0;
    std::size_t size = 5;
    double rate = 0.0;
    std::uint64_t seed = 1;
  } atk;
  attack->add_option("--dataset", atk.dataset, "Training CSV")->required();
  attack->add_option("--out", atk.out, "Trigger JSON output");
  attack->add_option("--method", atk.method, "cat or catplus");
  attack->add_option("--target", atk.target, "Target class y_tc");
  attack->add_option("--size", atk.size, "Trigger size |e|");
  attack->add_option("--trace", atk.trace, "CAT+ selection trace (JSON lines)");
  attack->add_option("--config", atk.train_config, "Filter TrainConfig JSON (CAT only)");
  attack->add_option("--poison-out", atk.poison_out, "Also write a poisoned training CSV here");
  attack->add_option("--rate", atk.rate, "Injection rate for --poison-out");
  attack->add_option("--mode", atk.mode, "dirty or clean (for --poison-out)");
  attack->add_option("--seed", atk.seed, "RNG seed");

  // train
  auto* train = app.add_subcommand("train", "Train the MLP label head on a CSV");
  struct {
    std::string dataset;
    std::string out;
    std::string config;
    std::uint64_t seed = 1;
  } trn;
  train->add_option("--dataset", trn.dataset, "Training CSV")->required();
  train->add_option("--out", trn.out, "Model JSON output")->required();
  train->add_option("--config", trn.config, "TrainConfig JSON");
  train->add_option("--seed", trn.seed, "Overrides the config seed");

  // eval
  auto* eval = app.add_subcommand("eval", "Test Time I/II evaluation with bounds");
  struct {
    std::string clean_model;
    std::string poisoned_model;
    std::string test;
    std::string trigger;
    std::string out;
    int target = 0;
    double rate = 0.0;
  } ev;
  eval->add_option("--clean-model", ev.clean_model, "Clean model JSON")->required();
  eval->add_option("--poisoned-model", ev.poisoned_model, "Poisoned model JSON")->required();
  eval->add_option("--test", ev.test, "Clean test CSV")->required();
  eval->add_option("--trigger", ev.trigger, "Trigger JSON")->required();
  eval->add_option("--target", ev.target, "Target class y_tc");
  eval->add_option("--rate", ev.rate, "Injection rate used at train time")->required();
  eval->add_option("--out", ev.out, "Report JSON output (stdout when omitted)");

  // bayes
  auto* bayes = app.add_subcommand("bayes", "Beta posterior and credible interval");
  struct {
    std::string prior = "1,1";
    std::string samples;
    std::string out;
    long long trials = 0;
    long long successes = 0;
    double gamma = 0.05;
  } by;
  bayes->add_option("--prior", by.prior, "Prior alpha,beta");
  bayes->add_option("--trials", by.trials, "Number of trials N");
  bayes->add_option("--successes", by.successes, "Number of successes k");
  bayes->add_option("--gamma", by.gamma, "Total tail mass");
  bayes->add_option("--samples", by.samples, "JSON array of theta observations; adds an MLE fit");
  bayes->add_option("--out", by.out, "Output JSON (stdout when omitted)");

  // robustness
  auto* robust = app.add_subcommand("robustness", "Trigger robustness under random bit flips");
  struct {
    std::string model;
    std::string dataset;
    std::string trigger;
    std::string out;
    int target = 0;
    double q = 0.05;
    std::size_t samples = 10000;
    bool exact = false;
    std::uint64_t seed = 1;
  } rb;
  robust->add_option("--model", rb.model, "Model JSON")->required();
  robust->add_option("--dataset", rb.dataset, "Evaluation CSV")->required();
  robust->add_option("--trigger", rb.trigger, "Trigger JSON")->required();
  robust->add_option("--target", rb.target, "Target class y_tc");
  robust->add_option("--q", rb.q, "Per-concept flip probability");
  robust->add_option("--samples", rb.samples, "Monte-Carlo sample count");
  robust->add_flag("--exact", rb.exact, "Exhaustive enumeration instead of Monte Carlo");
  robust->add_option("--seed", rb.seed, "RNG seed");
  robust->add_option("--out", rb.out, "Output JSON (stdout when omitted)");

  // defend
  auto* defend = app.add_subcommand("defend", "Clustering-ensemble defense evaluation");
  struct {
    std::string train;
    std::string test;
    std::string baseline;
    std::string trigger;
    std::string config;
    std::string out;
    int target = 0;
    std::size_t m = 3;
    std::uint64_t seed = 1;
  } df;
  defend->add_option("--train", df.train, "Training CSV (typically the poisoned set)")->required();
  defend->add_option("--test", df.test, "Clean test CSV")->required();
  defend->add_option("--baseline", df.baseline, "Baseline (undefended) model JSON")->required();
  defend->add_option("--trigger", df.trigger, "Trigger JSON")->required();
  defend->add_option("--target", df.target, "Target class y_tc");
  defend->add_option("--m", df.m, "Cluster count");
  defend->add_option("--config", df.config, "TrainConfig JSON for the sub-models");
  defend->add_option("--seed", df.seed, "RNG seed");
  defend->add_option("--out", df.out, "Output JSON (stdout when omitted)");

  // report
  auto* report_cmd = app.add_subcommand("report", "Render a report.json");
  struct {
    std::string in;
    std::string format = "md";
    std::string out;
  } rp;
  report_cmd->add_option("--in", rp.in, "report.json path")->required();
  report_cmd->add_option("--format", rp.format, "md or json");
  report_cmd->add_option("--out", rp.out, "Output path (stdout when omitted)");

  // run
  auto* run = app.add_subcommand("run", "Run a full experiment from a config file");
  struct {
    std::string config;
    std::string out = ".";
    std::int64_t seed = -1;
  } rn;
  run->add_option("--config", rn.config, "Experiment config JSON")->required();
  run->add_option("--out", rn.out, "Output directory for report.json / report.md");
  run->add_option("--seed", rn.seed, "Overrides the config seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      guard.track(gen.out);
      guard.track(catlab::meta_path_for(gen.out));
      if (!gen.means.empty()) {
        const json j = catlab::read_json_file(gen.means);
        const auto means = j.get<std::vector<std::vector<double>>>();
        catlab::save_csv(catlab::impute_attributes(means, gen.per_class, gen.seed), gen.out);
      } else {
        catlab::SynthConfig cfg;
        cfg.n_classes = gen.classes;
        cfg.n_samples = gen.samples;
        cfg.concept_count = gen.concepts;
        cfg.n_irrelevant = gen.irrelevant;
        cfg.flip_noise = gen.noise;
        cfg.seed = gen.seed;
        if (!gen.config.empty()) {
          const json j = catlab::read_json_file(gen.config);
          cfg.n_classes = j.value("n_classes", cfg.n_classes);
          cfg.n_samples = j.value("n_samples", cfg.n_samples);
          cfg.concept_count = j.value("L", cfg.concept_count);
          cfg.n_irrelevant = j.value("n_irrelevant", cfg.n_irrelevant);
          cfg.flip_noise = j.value("flip_noise", cfg.flip_noise);
          if (j.contains("seed") && generate->count("--seed") == 0) {
            cfg.seed = j["seed"].get<std::uint64_t>();
          }
        }
        catlab::save_csv(catlab::synth_generate(cfg), gen.out);
      }
    } else if (*attack) {
      const catlab::ConceptDataset dataset = catlab::load_csv(atk.dataset);
      catlab::TriggerSpec trigger;
      if (atk.method == "cat") {
        catlab::TrainConfig cfg = train_config_from_file(
            atk.train_config, catlab::TrainConfig::logistic_filter_defaults());
        if (atk.train_config.empty()) cfg.seed = atk.seed;
        trigger = catlab::cat_trigger(dataset, atk.target, atk.size, cfg);
      } else if (atk.method == "catplus") {
        const catlab::CatPlusResult result =
            catlab::catplus_trigger(dataset, atk.target, atk.size);
        trigger = result.trigger;
        if (!atk.trace.empty()) {
          guard.track(atk.trace);
          std::ofstream out(atk.trace);
          if (!out) throw std::runtime_error("cannot open " + atk.trace);
          for (const auto& rec : result.trace) out << catlab::to_json(rec).dump() << "\n";
        }
      } else {
        throw std::runtime_error("unknown --method '" + atk.method + "'");
      }
      emit(catlab::to_json(trigger), atk.out, guard);
      if (!atk.poison_out.empty()) {
        catlab::PoisonPlan plan;
        plan.trigger = trigger;
        plan.y_tc = atk.target;
        plan.injection_rate = atk.rate;
        plan.mode =
            atk.mode == "clean" ? catlab::PoisonMode::CleanLabel : catlab::PoisonMode::DirtyLabel;
        plan.seed = atk.seed;
        const catlab::PoisonOutcome outcome = catlab::poison_dataset(dataset, plan);
        guard.track(atk.poison_out);
        guard.track(catlab::meta_path_for(atk.poison_out));
        catlab::save_csv(outcome.poisoned, atk.poison_out);
        // Audit record: the applied plan and which rows were replaced.
        json audit = catlab::to_json(plan);
        audit["adv_indices"] = outcome.adv_indices;
        const std::string audit_path = atk.poison_out + ".plan.json";
        guard.track(audit_path);
        catlab::write_json_file(audit, audit_path);
        std::cerr << "poisoned " << outcome.adv_indices.size() << " of " << dataset.size()
                  << " rows\n";
      }
    } else if (*train) {
      const catlab::ConceptDataset dataset = catlab::load_csv(trn.dataset);
      catlab::TrainConfig cfg = train_config_from_file(trn.config, catlab::TrainConfig{});
      if (train->count("--seed") > 0 || trn.config.empty()) cfg.seed = trn.seed;
      const catlab::MlpModel model = catlab::train_mlp(dataset, cfg);
      json out = catlab::to_json(model);
      out["train_accuracy"] = catlab::accuracy(model, dataset);
      emit(out, trn.out, guard);
    } else if (*eval) {
      const catlab::MlpModel clean = catlab::mlp_from_json(catlab::read_json_file(ev.clean_model));
      const catlab::MlpModel poisoned =
          catlab::mlp_from_json(catlab::read_json_file(ev.poisoned_model));
      const catlab::ConceptDataset test = catlab::load_csv(ev.test);
      const catlab::TriggerSpec trigger =
          catlab::trigger_from_json(catlab::read_json_file(ev.trigger));
      const catlab::EvalReport report =
          catlab::full_evaluation(clean, poisoned, test, trigger, ev.target, ev.rate);
      emit(catlab::to_json(report), ev.out, guard);
    } else if (*bayes) {
      const auto [alpha, beta] = parse_prior(by.prior);
      const catlab::BetaParams prior{alpha, beta};
      const catlab::BetaParams posterior = catlab::beta_posterior(prior, by.trials, by.successes);
      json out;
      out["posterior"] = catlab::to_json(posterior);
      out["interval"] = catlab::to_json(catlab::beta_interval(posterior, by.gamma));
      if (!by.samples.empty()) {
        const auto samples = catlab::read_json_file(by.samples).get<std::vector<double>>();
        out["mle"] = catlab::to_json(catlab::beta_mle(samples));
      }
      emit(out, by.out, guard);
    } else if (*robust) {
      const catlab::MlpModel model = catlab::mlp_from_json(catlab::read_json_file(rb.model));
      const catlab::ConceptDataset dataset = catlab::load_csv(rb.dataset);
      const catlab::TriggerSpec trigger =
          catlab::trigger_from_json(catlab::read_json_file(rb.trigger));
      json out;
      if (rb.exact) {
        out["r_exact"] = catlab::robustness_exact(model, dataset, trigger, rb.target, rb.q);
        out["q"] = rb.q;
      } else {
        catlab::PerturbationConfig cfg;
        cfg.flip_rate = rb.q;
        cfg.n_samples = rb.samples;
        cfg.seed = rb.seed;
        out = catlab::to_json(catlab::robustness_mc(model, dataset, trigger, rb.target, cfg));
        out["q"] = rb.q;
      }
      emit(out, rb.out, guard);
    } else if (*defend) {
      const catlab::ConceptDataset train_set = catlab::load_csv(df.train);
      const catlab::ConceptDataset test_set = catlab::load_csv(df.test);
      const catlab::MlpModel baseline =
          catlab::mlp_from_json(catlab::read_json_file(df.baseline));
      const catlab::TriggerSpec trigger =
          catlab::trigger_from_json(catlab::read_json_file(df.trigger));
      const catlab::TrainConfig cfg = train_config_from_file(df.config, catlab::TrainConfig{});
      const catlab::EnsembleDefense ensemble =
          catlab::train_ensemble(train_set, df.m, cfg, df.seed);
      const catlab::DefenseReport report =
          catlab::evaluate_defense(ensemble, baseline, test_set, trigger, df.target);
      emit(catlab::to_json(report), df.out, guard);
    } else if (*report_cmd) {
      const json j = catlab::read_json_file(rp.in);
      if (rp.format == "json") {
        emit(j, rp.out, guard);
      } else if (rp.format == "md") {
        // Re-render the markdown from the stored JSON numbers.
        catlab::ExperimentConfig cfg = catlab::ExperimentConfig::from_json(j.at("config"));
        catlab::ExperimentReport rep;
        rep.config = cfg;
        rep.dataset_n = j.at("dataset").at("n").get<std::size_t>();
        rep.concept_count = j.at("dataset").at("L").get<std::size_t>();
        rep.n_classes = j.at("dataset").at("n_classes").get<int>();
        rep.clean_test_accuracy = j.at("clean_model").at("test_accuracy").get<double>();
        for (const auto& [name, a] : j.at("attacks").items()) {
          catlab::AttackResult attack;
          attack.kind = name == "cat" ? catlab::AttackKind::Cat : catlab::AttackKind::CatPlus;
          attack.trigger = catlab::trigger_from_json(a.at("trigger"));
          for (const auto& r : a.at("rates")) {
            catlab::RateResult rate;
            rate.injection_rate = r.at("injection_rate").get<double>();
            const auto& e = r.at("eval");
            rate.eval.injection_rate = rate.injection_rate;
            rate.eval.acc_retrained_wo = e.at("acc_retrained_wo").get<double>();
            rate.eval.asr = e.at("asr").get<double>();
            rate.eval.measured_drop = e.at("measured_drop").get<double>();
            rate.eval.degradation_bound = e.at("degradation_bound").get<double>();
            rate.eval.bound_holds = e.at("bound_holds").get<bool>();
            rate.eval.sr_lower = e.at("sr_lower").is_null()
                                     ? std::numeric_limits<double>::quiet_NaN()
                                     : e.at("sr_lower").get<double>();
            rate.eval.sr_upper = e.at("sr_upper").is_null()
                                     ? std::numeric_limits<double>::quiet_NaN()
                                     : e.at("sr_upper").get<double>();
            attack.rates.push_back(std::move(rate));
          }
          rep.attacks.push_back(std::move(attack));
        }
        std::sort(rep.attacks.begin(), rep.attacks.end(),
                  [](const auto& a, const auto& b) { return a.kind < b.kind; });
        if (rp.out.empty()) {
          std::cout << rep.to_markdown();
        } else {
          guard.track(rp.out);
          std::ofstream out(rp.out);
          if (!out) throw std::runtime_error("cannot open " + rp.out);
          out << rep.to_markdown();
        }
      } else {
        throw std::runtime_error("unknown --format '" + rp.format + "'");
      }
    } else if (*run) {
      json config_json = catlab::read_json_file(rn.config);
      if (rn.seed >= 0) config_json["seed"] = static_cast<std::uint64_t>(rn.seed);
      const catlab::ExperimentConfig cfg = catlab::ExperimentConfig::from_json(config_json);
      guard.track((std::filesystem::path(rn.out) / "report.json").string());
      guard.track((std::filesystem::path(rn.out) / "report.md").string());
      const catlab::ExperimentReport report = catlab::run_experiment_to_dir(cfg, rn.out);
      std::cerr << "report written to " << rn.out << "\n";
      (void)report;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  guard.commit();
  return 0;
}
