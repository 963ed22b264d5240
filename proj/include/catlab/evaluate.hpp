#ifndef CATLAB_EVALUATE_HPP
#define CATLAB_EVALUATE_HPP

#include <utility>
#include <vector>

#include "catlab/concept_data.hpp"
#include "catlab/learner.hpp"
#include "catlab/poison.hpp"

namespace catlab {

struct TriggeredAccuracy {
  double acc_w = 0.0;  // agreement with the stored (non-target) labels
  double asr = 0.0;    // fraction predicted as the target class
};

struct SuccessRateBounds {
  double lower = 0.0;  // delta / (1 - acc_wo); can exceed 1, reported raw
  double upper = 0.0;  // delta / acc_wo
};

struct EvalReport {
  double injection_rate = 0.0;
  double acc_original = 0.0;      // clean model on clean test
  double acc_retrained_wo = 0.0;  // poisoned model on clean test
  double acc_retrained_w = 0.0;   // poisoned model on triggered cache
  double asr = 0.0;
  double epsilon = 0.0;  // acc_original - acc_retrained_wo
  double delta_acc = 0.0;          // mean per-sample drop over the cache rows
  double degradation_bound = 0.0;  // p * delta_acc
  double measured_drop = 0.0;      // acc_retrained_wo - acc_retrained_w
  bool bound_holds = false;
  // NaN when the bound preconditions (0 < acc_wo < 1, acc_w <= acc_wo) fail.
  double sr_lower = 0.0;
  double sr_upper = 0.0;
  double sr_lower_clamped = 0.0;
  double sr_upper_clamped = 0.0;
  std::size_t cache_size = 0;
  std::size_t trigger_activations = 0;  // rows predicted as the target class
  // Diagnostic only: sum over cache rows of |p(original label) - p(target)|
  // under the poisoned model on triggered inputs.
  double logit_discrepancy = 0.0;
};

// Test Time I: clean-set accuracy (no trigger).
double test_time_1(const MlpModel& model, const ConceptDataset& clean_test);

// Test Time II: accuracy and attack success rate over the triggered cache.
// The cache must not contain rows originally labeled y_tc.
TriggeredAccuracy test_time_2(const MlpModel& model, const ConceptDataset& triggered_cache,
                              int y_tc);

// p * mean(per_sample_drops).
double degradation_bound(double injection_rate, const std::vector<double>& per_sample_drops);

// Literal bound formulas; caller guarantees 0 < acc_wo < 1 and acc_w <= acc_wo.
SuccessRateBounds success_rate_bounds(double acc_wo, double acc_w);

// Composes Test Time I/II, the degradation bound (per-sample indicator
// drops over the cache rows), and the success-rate bounds.
EvalReport full_evaluation(const MlpModel& clean_model, const MlpModel& poisoned_model,
                           const ConceptDataset& clean_test, const TriggerSpec& trigger, int y_tc,
                           double injection_rate);

}  // namespace catlab

#endif
