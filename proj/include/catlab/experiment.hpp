#ifndef CATLAB_EXPERIMENT_HPP
#define CATLAB_EXPERIMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "catlab/concept_data.hpp"
#include "catlab/defense.hpp"
#include "catlab/evaluate.hpp"
#include "catlab/learner.hpp"
#include "catlab/poison.hpp"
#include "catlab/stats.hpp"
#include "catlab/trigger_select.hpp"

namespace catlab {

enum class AttackKind { Cat, CatPlus };

const char* attack_name(AttackKind kind);

struct BayesOptions {
  bool enabled = true;
  double gamma = 0.05;
  BetaParams prior{1.0, 1.0};
};

struct RobustnessOptions {
  bool enabled = false;
  double flip_rate = 0.05;
  std::size_t n_samples = 10000;
};

struct DefenseOptions {
  bool enabled = false;
  std::vector<std::size_t> clustering_nums = {3};
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  // Exactly one dataset source: a CSV path or a synthetic generator config.
  std::optional<std::string> csv_path;
  std::optional<SynthConfig> synth;
  double train_fraction = 0.8;
  int y_tc = 0;
  std::vector<AttackKind> attacks = {AttackKind::Cat, AttackKind::CatPlus};
  std::size_t trigger_size = 5;
  std::vector<double> injection_rates = {0.02, 0.05, 0.10};
  PoisonMode mode = PoisonMode::DirtyLabel;
  TrainConfig train;
  TrainConfig filter_train = TrainConfig::logistic_filter_defaults();
  BayesOptions bayes;
  RobustnessOptions robustness;
  DefenseOptions defense;

  void validate() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct RateResult {
  double injection_rate = 0.0;
  EvalReport eval;
  std::optional<std::pair<BetaParams, CredibleInterval>> bayes;
  long long bayes_trials = 0;
  long long bayes_successes = 0;
  std::optional<RobustnessEstimate> robustness;
  std::vector<DefenseReport> defense;
};

struct AttackResult {
  AttackKind kind = AttackKind::Cat;
  TriggerSpec trigger;
  std::vector<ZScoreRecord> trace;  // CAT+ only
  std::vector<RateResult> rates;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::size_t dataset_n = 0;
  std::size_t concept_count = 0;
  int n_classes = 0;
  std::size_t train_n = 0;
  std::size_t test_n = 0;
  SparsityProfile sparsity;
  double clean_train_accuracy = 0.0;
  double clean_test_accuracy = 0.0;
  std::vector<AttackResult> attacks;

  nlohmann::json to_json() const;
  // Accuracy/ASR table in the same layout as the headline results table:
  // one row per injection rate, CAT and CAT+ columns, percentages with two
  // decimals.
  std::string to_markdown() const;
};

// Full pipeline: load or generate, split, train the clean model, build the
// trigger(s), then poison / retrain / evaluate per injection rate, with
// optional Bayesian, robustness and defense analyses. Deterministic per
// config.
ExperimentReport run_experiment(const ExperimentConfig& config);

// run_experiment plus report.json / report.md in out_dir.
ExperimentReport run_experiment_to_dir(const ExperimentConfig& config, const std::string& out_dir);

}  // namespace catlab

#endif
