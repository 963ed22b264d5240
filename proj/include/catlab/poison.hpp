#ifndef CATLAB_POISON_HPP
#define CATLAB_POISON_HPP

#include <cstdint>
#include <vector>

#include "catlab/concept_data.hpp"
#include "catlab/trigger_select.hpp"

namespace catlab {

// Dirty-label poisons rows from outside the target class (and relabels
// them); clean-label poisons rows already in the target class.
enum class PoisonMode { DirtyLabel, CleanLabel };

struct PoisonPlan {
  TriggerSpec trigger;
  int y_tc = 0;
  double injection_rate = 0.0;  // |D_adv| / |D|
  PoisonMode mode = PoisonMode::DirtyLabel;
  std::uint64_t seed = 0;
};

struct PoisonOutcome {
  ConceptDataset poisoned;
  std::vector<std::size_t> adv_indices;  // original row indices, ascending
};

// Writes the trigger values at the trigger indices; everything else is
// copied through unchanged.
ConceptVector embed(const ConceptVector& concepts, const TriggerSpec& trigger);

// The poisoning function: embed the trigger and relabel to the target class.
LabeledExample apply_te(const LabeledExample& example, const TriggerSpec& trigger, int y_tc);

// round(p*n) row indices drawn uniformly without replacement from the
// mode's eligible pool.
std::vector<std::size_t> select_adv(const ConceptDataset& dataset, int y_tc, double injection_rate,
                                    PoisonMode mode, std::uint64_t seed);

// D' = D with the selected rows replaced by their poisoned versions, in place.
PoisonOutcome poison_dataset(const ConceptDataset& dataset, const PoisonPlan& plan);

// Drops target-class rows, embeds the trigger into the rest; original labels
// are kept for attack-success bookkeeping.
ConceptDataset poison_test_cache(const ConceptDataset& test_set, const TriggerSpec& trigger,
                                 int y_tc);

}  // namespace catlab

#endif
