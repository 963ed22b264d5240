#include "catlab/evaluate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace catlab {

double test_time_1(const MlpModel& model, const ConceptDataset& clean_test) {
  return accuracy(model, clean_test);
}

TriggeredAccuracy test_time_2(const MlpModel& model, const ConceptDataset& triggered_cache,
                              int y_tc) {
  if (triggered_cache.size() == 0) throw std::invalid_argument("test_time_2: empty cache");
  std::size_t hits = 0, correct = 0;
  for (const auto& ex : triggered_cache.examples()) {
    if (ex.label == y_tc) {
      throw std::invalid_argument("test_time_2: cache contains a target-class row");
    }
    const int predicted = mlp_predict(model, ex.concepts).label;
    if (predicted == y_tc) ++hits;
    if (predicted == ex.label) ++correct;
  }
  const double n = static_cast<double>(triggered_cache.size());
  return {static_cast<double>(correct) / n, static_cast<double>(hits) / n};
}

double degradation_bound(double injection_rate, const std::vector<double>& per_sample_drops) {
  if (!(injection_rate >= 0.0 && injection_rate <= 1.0)) {
    throw std::invalid_argument("degradation_bound: injection rate must be in [0,1]");
  }
  if (per_sample_drops.empty()) {
    throw std::invalid_argument("degradation_bound: no per-sample drops");
  }
  double total = 0.0;
  for (double d : per_sample_drops) total += d;
  return injection_rate * (total / static_cast<double>(per_sample_drops.size()));
}

SuccessRateBounds success_rate_bounds(double acc_wo, double acc_w) {
  if (!(acc_wo > 0.0 && acc_wo < 1.0)) {
    throw std::invalid_argument("success_rate_bounds: acc_wo must be strictly inside (0,1)");
  }
  if (acc_w > acc_wo) {
    throw std::invalid_argument("success_rate_bounds: acc_w must not exceed acc_wo");
  }
  const double delta = acc_wo - acc_w;
  return {delta / (1.0 - acc_wo), delta / acc_wo};
}

EvalReport full_evaluation(const MlpModel& clean_model, const MlpModel& poisoned_model,
                           const ConceptDataset& clean_test, const TriggerSpec& trigger, int y_tc,
                           double injection_rate) {
  EvalReport report;
  report.injection_rate = injection_rate;
  report.acc_original = test_time_1(clean_model, clean_test);
  report.acc_retrained_wo = test_time_1(poisoned_model, clean_test);
  report.epsilon = report.acc_original - report.acc_retrained_wo;

  const ConceptDataset cache = poison_test_cache(clean_test, trigger, y_tc);
  const TriggeredAccuracy tt2 = test_time_2(poisoned_model, cache, y_tc);
  report.acc_retrained_w = tt2.acc_w;
  report.asr = tt2.asr;
  report.cache_size = cache.size();

  // Per-sample drop = 1{correct without trigger} - 1{correct with trigger},
  // over the same non-target test points the cache was built from.
  std::vector<double> drops;
  drops.reserve(cache.size());
  std::size_t activations = 0;
  double discrepancy = 0.0;
  for (const auto& ex : clean_test.examples()) {
    if (ex.label == y_tc) continue;
    const bool clean_correct = mlp_predict(poisoned_model, ex.concepts).label == ex.label;
    const MlpPrediction triggered = mlp_predict(poisoned_model, embed(ex.concepts, trigger));
    if (triggered.label == y_tc) ++activations;
    drops.push_back((clean_correct ? 1.0 : 0.0) - (triggered.label == ex.label ? 1.0 : 0.0));
    discrepancy += std::fabs(triggered.probabilities[static_cast<std::size_t>(ex.label)] -
                             triggered.probabilities[static_cast<std::size_t>(y_tc)]);
  }
  report.trigger_activations = activations;
  report.logit_discrepancy = discrepancy;
  double total = 0.0;
  for (double d : drops) total += d;
  report.delta_acc = total / static_cast<double>(drops.size());
  report.degradation_bound = degradation_bound(injection_rate, drops);
  report.measured_drop = report.acc_retrained_wo - report.acc_retrained_w;
  report.bound_holds = report.measured_drop <= report.degradation_bound;

  if (report.acc_retrained_wo > 0.0 && report.acc_retrained_wo < 1.0 &&
      report.acc_retrained_w <= report.acc_retrained_wo) {
    const SuccessRateBounds bounds =
        success_rate_bounds(report.acc_retrained_wo, report.acc_retrained_w);
    report.sr_lower = bounds.lower;
    report.sr_upper = bounds.upper;
    report.sr_lower_clamped = std::fmin(std::fmax(bounds.lower, 0.0), 1.0);
    report.sr_upper_clamped = std::fmin(std::fmax(bounds.upper, 0.0), 1.0);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.sr_lower = nan;
    report.sr_upper = nan;
    report.sr_lower_clamped = nan;
    report.sr_upper_clamped = nan;
  }
  return report;
}

}  // namespace catlab
