#ifndef CATLAB_TRIGGER_SELECT_HPP
#define CATLAB_TRIGGER_SELECT_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "catlab/concept_data.hpp"
#include "catlab/learner.hpp"

namespace catlab {

// The attack payload: which concepts to overwrite and the values written.
struct TriggerSpec {
  std::vector<std::size_t> indices;  // distinct, selection order preserved
  std::vector<double> values;

  bool operator==(const TriggerSpec&) const = default;
};

void validate_trigger(const TriggerSpec& trigger, std::size_t concept_count);

struct ZScoreRecord {
  std::size_t concept_index = 0;
  double op_value = 0.0;
  double p0 = 0.0;      // prior target fraction
  double p_cond = 0.0;  // target fraction among rows whose concept equals op_value
  double z = 0.0;       // -inf when unsupported
  bool supported = false;
};

// Least-relevant concepts for the target class: fits the logistic filter on
// the balanced cache subset and returns the trigger_size indices with the
// smallest coefficient magnitudes, ascending, ties to the lower index.
std::vector<std::size_t> concept_filter(const ConceptDataset& dataset, int y_tc,
                                        std::size_t trigger_size, const TrainConfig& train_config);

// All-zeros for positive-polarity data, all-ones for negative.
std::vector<double> attack_pattern(const SparsityProfile& profile, std::size_t trigger_size);

// Filter + pattern over the full training set's sparsity profile.
TriggerSpec cat_trigger(const ConceptDataset& dataset, int y_tc, std::size_t trigger_size,
                        const TrainConfig& train_config);

// Correlation score for forcing one concept to a value:
// z = (p_cond - p0) / (p0 (1 - p0) / p_cond).
ZScoreRecord zscore(const ConceptDataset& dataset, int y_tc, std::size_t concept_index,
                    double op_value);

struct CatPlusResult {
  TriggerSpec trigger;
  std::vector<ZScoreRecord> trace;  // the chosen candidate at each step
};

// Greedy loop: at each step scores every remaining (concept, value in {0,1})
// pair on the working copy, takes the max (ties: lower index, then value 0),
// then rewrites that concept to the chosen value in every working row.
CatPlusResult catplus_trigger(const ConceptDataset& dataset, int y_tc, std::size_t trigger_size);

// Continuous extension: the base z weighted by the sum of squared distances
// from op_value to every value in value_set.
double zscore_continuous(const ConceptDataset& dataset, int y_tc, std::size_t concept_index,
                         double op_value, const std::vector<double>& value_set);

struct InformationGain {
  double gain_bits = 0.0;
  double ratio = 0.0;
};

// Binary-entropy gain of splitting target membership on concept == op_value.
InformationGain information_gain(const ConceptDataset& dataset, int y_tc,
                                 std::size_t concept_index, double op_value);

}  // namespace catlab

#endif
