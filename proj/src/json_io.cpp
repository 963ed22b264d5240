#include "catlab/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace catlab {

using nlohmann::json;

namespace {

json matrix_to_json(const std::vector<double>& flat, std::size_t rows, std::size_t cols) {
  json out = json::array();
  for (std::size_t r = 0; r < rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < cols; ++c) row.push_back(flat[r * cols + c]);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<double> matrix_from_json(const json& j, std::size_t& rows, std::size_t& cols) {
  rows = j.size();
  if (rows == 0) throw std::runtime_error("model json: empty matrix");
  cols = j.at(0).size();
  std::vector<double> flat;
  flat.reserve(rows * cols);
  for (const auto& row : j) {
    if (row.size() != cols) throw std::runtime_error("model json: ragged matrix");
    for (const auto& v : row) flat.push_back(v.get<double>());
  }
  return flat;
}

}  // namespace

json to_json(const LogisticModel& model) {
  return json{{"weights", model.weights}, {"bias", model.bias}};
}

LogisticModel logistic_from_json(const json& j) {
  LogisticModel model;
  model.weights = j.at("weights").get<std::vector<double>>();
  model.bias = j.at("bias").get<double>();
  return model;
}

json to_json(const MlpModel& model) {
  json j;
  j["hidden_dim"] = model.hidden_dim;
  j["W1"] = matrix_to_json(model.w1, model.hidden_dim, model.input_dim);
  j["b1"] = model.b1;
  j["W2"] = matrix_to_json(model.w2, model.output_dim, model.hidden_dim);
  j["b2"] = model.b2;
  return j;
}

MlpModel mlp_from_json(const json& j) {
  MlpModel model;
  std::size_t rows = 0, cols = 0;
  model.w1 = matrix_from_json(j.at("W1"), rows, cols);
  model.hidden_dim = rows;
  model.input_dim = cols;
  model.b1 = j.at("b1").get<std::vector<double>>();
  model.w2 = matrix_from_json(j.at("W2"), rows, cols);
  model.output_dim = rows;
  if (cols != model.hidden_dim) throw std::runtime_error("model json: W1/W2 shape mismatch");
  model.b2 = j.at("b2").get<std::vector<double>>();
  if (j.contains("hidden_dim") && j.at("hidden_dim").get<std::size_t>() != model.hidden_dim) {
    throw std::runtime_error("model json: hidden_dim does not match W1");
  }
  if (model.b1.size() != model.hidden_dim || model.b2.size() != model.output_dim) {
    throw std::runtime_error("model json: bias shape mismatch");
  }
  return model;
}

json to_json(const TriggerSpec& trigger) {
  return json{{"indices", trigger.indices}, {"values", trigger.values}};
}

TriggerSpec trigger_from_json(const json& j) {
  TriggerSpec trigger;
  trigger.indices = j.at("indices").get<std::vector<std::size_t>>();
  trigger.values = j.at("values").get<std::vector<double>>();
  return trigger;
}

json to_json(const ZScoreRecord& record) {
  return json{{"concept", record.concept_index}, {"op_value", record.op_value},
              {"p0", record.p0},                 {"p_cond", record.p_cond},
              {"z", record.z},                   {"supported", record.supported}};
}

json to_json(const EvalReport& report) {
  json j;
  j["injection_rate"] = report.injection_rate;
  j["acc_original"] = report.acc_original;
  j["acc_retrained_wo"] = report.acc_retrained_wo;
  j["acc_retrained_w"] = report.acc_retrained_w;
  j["asr"] = report.asr;
  j["epsilon"] = report.epsilon;
  j["delta_acc"] = report.delta_acc;
  j["degradation_bound"] = report.degradation_bound;
  j["measured_drop"] = report.measured_drop;
  j["bound_holds"] = report.bound_holds;
  j["sr_lower"] = report.sr_lower;
  j["sr_upper"] = report.sr_upper;
  j["sr_lower_clamped"] = report.sr_lower_clamped;
  j["sr_upper_clamped"] = report.sr_upper_clamped;
  j["cache_size"] = report.cache_size;
  j["trigger_activations"] = report.trigger_activations;
  j["logit_discrepancy"] = report.logit_discrepancy;
  return j;
}

json to_json(const PoisonPlan& plan) {
  return json{{"trigger", to_json(plan.trigger)},
              {"y_tc", plan.y_tc},
              {"injection_rate", plan.injection_rate},
              {"mode", plan.mode == PoisonMode::DirtyLabel ? "dirty" : "clean"},
              {"seed", plan.seed}};
}

PoisonPlan poison_plan_from_json(const json& j) {
  PoisonPlan plan;
  plan.trigger = trigger_from_json(j.at("trigger"));
  plan.y_tc = j.at("y_tc").get<int>();
  plan.injection_rate = j.at("injection_rate").get<double>();
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "dirty") {
    plan.mode = PoisonMode::DirtyLabel;
  } else if (mode == "clean") {
    plan.mode = PoisonMode::CleanLabel;
  } else {
    throw std::runtime_error("poison plan json: mode must be dirty or clean");
  }
  plan.seed = j.value("seed", std::uint64_t{0});
  return plan;
}

json to_json(const BetaParams& params) {
  return json{{"alpha", params.alpha}, {"beta", params.beta}};
}

json to_json(const CredibleInterval& interval) {
  return json{{"lo", interval.lo}, {"hi", interval.hi}, {"gamma", interval.gamma}};
}

json to_json(const RobustnessEstimate& estimate) {
  return json{{"r_estimate", estimate.r},
              {"ci_lo", estimate.ci_lo},
              {"ci_hi", estimate.ci_hi},
              {"n_samples", estimate.n_samples}};
}

json to_json(const DefenseReport& report) {
  return json{{"clustering_num", report.clustering_num},
              {"ensemble_clean_accuracy", report.ensemble_clean_accuracy},
              {"baseline_clean_accuracy", report.baseline_clean_accuracy},
              {"ensemble_asr", report.ensemble_asr},
              {"baseline_asr", report.baseline_asr},
              {"asr_reduction", report.asr_reduction},
              {"routing", EnsembleDefense::kRouting},
              {"majority_clean_accuracy", report.majority_clean_accuracy},
              {"majority_asr", report.majority_asr},
              {"warnings", report.warnings}};
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace catlab
