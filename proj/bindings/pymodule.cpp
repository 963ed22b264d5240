// Python bindings for the catlab core.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "catlab/defense.hpp"
#include "catlab/evaluate.hpp"
#include "catlab/experiment.hpp"
#include "catlab/json_io.hpp"
#include "catlab/learner.hpp"
#include "catlab/poison.hpp"
#include "catlab/stats.hpp"
#include "catlab/trigger_select.hpp"

namespace py = pybind11;
using namespace catlab;

namespace {

std::vector<LabeledExample> rows_from_python(
    const std::vector<std::pair<ConceptVector, int>>& rows) {
  std::vector<LabeledExample> out;
  out.reserve(rows.size());
  for (const auto& [concepts, label] : rows) out.push_back({concepts, label});
  return out;
}

}  // namespace

PYBIND11_MODULE(_catlab, m) {
  m.doc() = "Concept-space backdoor attack laboratory (C++ core)";

  // --- data ---
  py::class_<LabeledExample>(m, "LabeledExample")
      .def(py::init<ConceptVector, int>(), py::arg("concepts"), py::arg("label"))
      .def_readonly("concepts", &LabeledExample::concepts)
      .def_readonly("label", &LabeledExample::label);

  py::class_<ConceptDataset>(m, "ConceptDataset")
      .def(py::init([](const std::vector<std::pair<ConceptVector, int>>& rows, std::size_t L,
                       int n_classes, const std::vector<std::string>& names) {
             return ConceptDataset(rows_from_python(rows), L, n_classes, names);
           }),
           py::arg("rows"), py::arg("concept_count"), py::arg("n_classes"),
           py::arg("concept_names") = std::vector<std::string>{})
      .def("__len__", &ConceptDataset::size)
      .def_property_readonly("concept_count", &ConceptDataset::concept_count)
      .def_property_readonly("n_classes", &ConceptDataset::class_count)
      .def_property_readonly("concept_names", &ConceptDataset::concept_names)
      .def("example", &ConceptDataset::example, py::arg("index"))
      .def("labels",
           [](const ConceptDataset& d) {
             std::vector<int> out;
             out.reserve(d.size());
             for (const auto& ex : d.examples()) out.push_back(ex.label);
             return out;
           })
      .def("concepts",
           [](const ConceptDataset& d) {
             std::vector<ConceptVector> out;
             out.reserve(d.size());
             for (const auto& ex : d.examples()) out.push_back(ex.concepts);
             return out;
           })
      .def("label_histogram", &ConceptDataset::label_histogram)
      .def("is_binary", &ConceptDataset::is_binary)
      .def("__eq__", [](const ConceptDataset& a, const ConceptDataset& b) { return a == b; });

  py::class_<SynthConfig>(m, "SynthConfig")
      .def(py::init<>())
      .def_readwrite("n_classes", &SynthConfig::n_classes)
      .def_readwrite("n_samples", &SynthConfig::n_samples)
      .def_readwrite("concept_count", &SynthConfig::concept_count)
      .def_readwrite("n_irrelevant", &SynthConfig::n_irrelevant)
      .def_readwrite("flip_noise", &SynthConfig::flip_noise)
      .def_readwrite("seed", &SynthConfig::seed);

  py::enum_<Polarity>(m, "Polarity")
      .value("Positive", Polarity::Positive)
      .value("Negative", Polarity::Negative);

  py::class_<SparsityProfile>(m, "SparsityProfile")
      .def_readonly("positive_fraction", &SparsityProfile::positive_fraction)
      .def_readonly("polarity", &SparsityProfile::polarity);

  m.def("load_csv", &load_csv, py::arg("path"));
  m.def("save_csv", &save_csv, py::arg("dataset"), py::arg("path"));
  m.def("split", &split, py::arg("dataset"), py::arg("train_fraction"), py::arg("seed"));
  m.def("subset_by_label", &subset_by_label, py::arg("dataset"), py::arg("y_tc"));
  m.def("build_cache_subset", &build_cache_subset, py::arg("dataset"), py::arg("y_tc"),
        py::arg("seed"));
  m.def("sparsity_profile", &sparsity_profile, py::arg("dataset"));
  m.def("synth_generate", &synth_generate, py::arg("config"));
  m.def("irrelevant_concepts", &irrelevant_concepts, py::arg("dataset"));
  m.def("impute_attributes", &impute_attributes, py::arg("class_means"),
        py::arg("n_samples_per_class"), py::arg("seed"));

  // --- learner ---
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_static("logistic_filter_defaults", &TrainConfig::logistic_filter_defaults)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("weight_decay", &TrainConfig::weight_decay)
      .def_readwrite("lr_decay_gamma", &TrainConfig::lr_decay_gamma)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("hidden_dim", &TrainConfig::hidden_dim)
      .def_readwrite("seed", &TrainConfig::seed);

  py::class_<LogisticModel>(m, "LogisticModel")
      .def_readonly("weights", &LogisticModel::weights)
      .def_readonly("bias", &LogisticModel::bias)
      .def("to_json", [](const LogisticModel& model) { return to_json(model).dump(); });

  py::class_<MlpModel>(m, "MlpModel")
      .def_property_readonly("input_dim", [](const MlpModel& model) { return model.input_dim; })
      .def_property_readonly("hidden_dim", [](const MlpModel& model) { return model.hidden_dim; })
      .def_property_readonly("output_dim", [](const MlpModel& model) { return model.output_dim; })
      .def("to_json", [](const MlpModel& model) { return to_json(model).dump(); })
      .def_static("from_json", [](const std::string& text) {
        return mlp_from_json(nlohmann::json::parse(text));
      });

  py::class_<MlpPrediction>(m, "MlpPrediction")
      .def_readonly("label", &MlpPrediction::label)
      .def_readonly("probabilities", &MlpPrediction::probabilities);

  m.def("fit_logistic", &fit_logistic, py::arg("binary_dataset"), py::arg("config"));
  m.def("logistic_predict", &logistic_predict, py::arg("model"), py::arg("concepts"));
  m.def("train_mlp", &train_mlp, py::arg("dataset"), py::arg("config"));
  m.def("mlp_predict", &mlp_predict, py::arg("model"), py::arg("concepts"));
  m.def("accuracy", &accuracy, py::arg("model"), py::arg("dataset"));

  // --- triggers ---
  py::class_<TriggerSpec>(m, "TriggerSpec")
      .def(py::init([](const std::vector<std::size_t>& indices, const std::vector<double>& values) {
             TriggerSpec t{indices, values};
             return t;
           }),
           py::arg("indices"), py::arg("values"))
      .def_readonly("indices", &TriggerSpec::indices)
      .def_readonly("values", &TriggerSpec::values)
      .def("to_json", [](const TriggerSpec& trigger) { return to_json(trigger).dump(); });

  py::class_<ZScoreRecord>(m, "ZScoreRecord")
      .def_readonly("concept_index", &ZScoreRecord::concept_index)
      .def_readonly("op_value", &ZScoreRecord::op_value)
      .def_readonly("p0", &ZScoreRecord::p0)
      .def_readonly("p_cond", &ZScoreRecord::p_cond)
      .def_readonly("z", &ZScoreRecord::z)
      .def_readonly("supported", &ZScoreRecord::supported);

  py::class_<CatPlusResult>(m, "CatPlusResult")
      .def_readonly("trigger", &CatPlusResult::trigger)
      .def_readonly("trace", &CatPlusResult::trace);

  py::class_<InformationGain>(m, "InformationGain")
      .def_readonly("gain_bits", &InformationGain::gain_bits)
      .def_readonly("ratio", &InformationGain::ratio);

  m.def("concept_filter", &concept_filter, py::arg("dataset"), py::arg("y_tc"),
        py::arg("trigger_size"), py::arg("train_config"));
  m.def("attack_pattern", &attack_pattern, py::arg("profile"), py::arg("trigger_size"));
  m.def("cat_trigger", &cat_trigger, py::arg("dataset"), py::arg("y_tc"), py::arg("trigger_size"),
        py::arg("train_config"));
  m.def("zscore", &zscore, py::arg("dataset"), py::arg("y_tc"), py::arg("concept_index"),
        py::arg("op_value"));
  m.def("catplus_trigger", &catplus_trigger, py::arg("dataset"), py::arg("y_tc"),
        py::arg("trigger_size"));
  m.def("zscore_continuous", &zscore_continuous, py::arg("dataset"), py::arg("y_tc"),
        py::arg("concept_index"), py::arg("op_value"), py::arg("value_set"));
  m.def("information_gain", &information_gain, py::arg("dataset"), py::arg("y_tc"),
        py::arg("concept_index"), py::arg("op_value"));

  // --- poison ---
  py::enum_<PoisonMode>(m, "PoisonMode")
      .value("DirtyLabel", PoisonMode::DirtyLabel)
      .value("CleanLabel", PoisonMode::CleanLabel);

  py::class_<PoisonPlan>(m, "PoisonPlan")
      .def(py::init<>())
      .def_readwrite("trigger", &PoisonPlan::trigger)
      .def_readwrite("y_tc", &PoisonPlan::y_tc)
      .def_readwrite("injection_rate", &PoisonPlan::injection_rate)
      .def_readwrite("mode", &PoisonPlan::mode)
      .def_readwrite("seed", &PoisonPlan::seed);

  py::class_<PoisonOutcome>(m, "PoisonOutcome")
      .def_readonly("poisoned", &PoisonOutcome::poisoned)
      .def_readonly("adv_indices", &PoisonOutcome::adv_indices);

  m.def("embed", &embed, py::arg("concepts"), py::arg("trigger"));
  m.def("apply_te", &apply_te, py::arg("example"), py::arg("trigger"), py::arg("y_tc"));
  m.def("select_adv", &select_adv, py::arg("dataset"), py::arg("y_tc"), py::arg("injection_rate"),
        py::arg("mode"), py::arg("seed"));
  m.def("poison_dataset", &poison_dataset, py::arg("dataset"), py::arg("plan"));
  m.def("poison_test_cache", &poison_test_cache, py::arg("test_set"), py::arg("trigger"),
        py::arg("y_tc"));

  // --- evaluation ---
  py::class_<TriggeredAccuracy>(m, "TriggeredAccuracy")
      .def_readonly("acc_w", &TriggeredAccuracy::acc_w)
      .def_readonly("asr", &TriggeredAccuracy::asr);

  py::class_<SuccessRateBounds>(m, "SuccessRateBounds")
      .def_readonly("lower", &SuccessRateBounds::lower)
      .def_readonly("upper", &SuccessRateBounds::upper);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("injection_rate", &EvalReport::injection_rate)
      .def_readonly("acc_original", &EvalReport::acc_original)
      .def_readonly("acc_retrained_wo", &EvalReport::acc_retrained_wo)
      .def_readonly("acc_retrained_w", &EvalReport::acc_retrained_w)
      .def_readonly("asr", &EvalReport::asr)
      .def_readonly("epsilon", &EvalReport::epsilon)
      .def_readonly("delta_acc", &EvalReport::delta_acc)
      .def_readonly("degradation_bound", &EvalReport::degradation_bound)
      .def_readonly("measured_drop", &EvalReport::measured_drop)
      .def_readonly("bound_holds", &EvalReport::bound_holds)
      .def_readonly("sr_lower", &EvalReport::sr_lower)
      .def_readonly("sr_upper", &EvalReport::sr_upper)
      .def_readonly("cache_size", &EvalReport::cache_size)
      .def_readonly("trigger_activations", &EvalReport::trigger_activations)
      .def_readonly("logit_discrepancy", &EvalReport::logit_discrepancy)
      .def("to_json", [](const EvalReport& report) { return to_json(report).dump(); });

  m.def("test_time_1", &test_time_1, py::arg("model"), py::arg("clean_test"));
  m.def("test_time_2", &test_time_2, py::arg("model"), py::arg("triggered_cache"), py::arg("y_tc"));
  m.def("degradation_bound", &degradation_bound, py::arg("injection_rate"),
        py::arg("per_sample_drops"));
  m.def("success_rate_bounds", &success_rate_bounds, py::arg("acc_wo"), py::arg("acc_w"));
  m.def("full_evaluation", &full_evaluation, py::arg("clean_model"), py::arg("poisoned_model"),
        py::arg("clean_test"), py::arg("trigger"), py::arg("y_tc"), py::arg("injection_rate"));

  // --- stats ---
  py::class_<BetaParams>(m, "BetaParams")
      .def(py::init<double, double>(), py::arg("alpha") = 1.0, py::arg("beta") = 1.0)
      .def_readonly("alpha", &BetaParams::alpha)
      .def_readonly("beta", &BetaParams::beta);

  py::class_<CredibleInterval>(m, "CredibleInterval")
      .def_readonly("lo", &CredibleInterval::lo)
      .def_readonly("hi", &CredibleInterval::hi)
      .def_readonly("gamma", &CredibleInterval::gamma);

  py::class_<PerturbationConfig>(m, "PerturbationConfig")
      .def(py::init<>())
      .def_readwrite("flip_rate", &PerturbationConfig::flip_rate)
      .def_readwrite("n_samples", &PerturbationConfig::n_samples)
      .def_readwrite("seed", &PerturbationConfig::seed);

  py::class_<RobustnessEstimate>(m, "RobustnessEstimate")
      .def_readonly("r", &RobustnessEstimate::r)
      .def_readonly("ci_lo", &RobustnessEstimate::ci_lo)
      .def_readonly("ci_hi", &RobustnessEstimate::ci_hi)
      .def_readonly("n_samples", &RobustnessEstimate::n_samples);

  m.def("beta_posterior", &beta_posterior, py::arg("prior"), py::arg("trials"),
        py::arg("successes"));
  m.def("beta_cdf", &beta_cdf, py::arg("params"), py::arg("x"));
  m.def("beta_interval", &beta_interval, py::arg("params"), py::arg("gamma"));
  m.def("beta_mle", &beta_mle, py::arg("samples"));
  m.def("beta_log_likelihood", &beta_log_likelihood, py::arg("params"), py::arg("samples"));
  m.def("robustness_mc", &robustness_mc, py::arg("model"), py::arg("eval_set"), py::arg("trigger"),
        py::arg("y_tc"), py::arg("config"));
  m.def("robustness_exact", &robustness_exact, py::arg("model"), py::arg("eval_set"),
        py::arg("trigger"), py::arg("y_tc"), py::arg("flip_rate"));

  // --- defense ---
  py::class_<KMeansResult>(m, "KMeansResult")
      .def_readonly("assignments", &KMeansResult::assignments)
      .def_readonly("centroids", &KMeansResult::centroids)
      .def_readonly("iterations", &KMeansResult::iterations)
      .def_readonly("inertia", &KMeansResult::inertia);

  py::class_<EnsembleDefense>(m, "EnsembleDefense")
      .def_readonly("m", &EnsembleDefense::m)
      .def_readonly("centroids", &EnsembleDefense::centroids)
      .def_readonly("warnings", &EnsembleDefense::warnings);

  py::class_<DefenseReport>(m, "DefenseReport")
      .def_readonly("clustering_num", &DefenseReport::clustering_num)
      .def_readonly("ensemble_clean_accuracy", &DefenseReport::ensemble_clean_accuracy)
      .def_readonly("baseline_clean_accuracy", &DefenseReport::baseline_clean_accuracy)
      .def_readonly("ensemble_asr", &DefenseReport::ensemble_asr)
      .def_readonly("baseline_asr", &DefenseReport::baseline_asr)
      .def_readonly("asr_reduction", &DefenseReport::asr_reduction)
      .def_readonly("majority_clean_accuracy", &DefenseReport::majority_clean_accuracy)
      .def_readonly("majority_asr", &DefenseReport::majority_asr)
      .def("to_json", [](const DefenseReport& report) { return to_json(report).dump(); });

  m.def("kmeans_cluster", &kmeans_cluster, py::arg("vectors"), py::arg("m"), py::arg("seed"),
        py::arg("max_iters") = 100);
  m.def("train_ensemble", &train_ensemble, py::arg("train_set"), py::arg("m"),
        py::arg("train_config"), py::arg("seed"));
  m.def("ensemble_predict", &ensemble_predict, py::arg("defense"), py::arg("concepts"));
  m.def("routed_predict", &routed_predict, py::arg("defense"), py::arg("concepts"));
  m.def("evaluate_defense", &evaluate_defense, py::arg("defense"), py::arg("baseline_model"),
        py::arg("clean_test"), py::arg("trigger"), py::arg("y_tc"));

  // --- experiments ---
  m.def(
      "run_experiment",
      [](const std::string& config_json, const std::string& out_dir) {
        const ExperimentConfig cfg =
            ExperimentConfig::from_json(nlohmann::json::parse(config_json));
        const ExperimentReport report =
            out_dir.empty() ? run_experiment(cfg) : run_experiment_to_dir(cfg, out_dir);
        return report.to_json().dump();
      },
      py::arg("config_json"), py::arg("out_dir") = std::string(),
      "Run the full pipeline from a JSON config string; returns report JSON.");
}
