#include "catlab/poison.hpp"

#include <stdexcept>
#include <string>

#include "catlab/numeric.hpp"
#include "catlab/rng.hpp"

namespace catlab {

ConceptVector embed(const ConceptVector& concepts, const TriggerSpec& trigger) {
  validate_trigger(trigger, concepts.size());
  ConceptVector out = concepts;
  for (std::size_t i = 0; i < trigger.indices.size(); ++i) {
    out[trigger.indices[i]] = trigger.values[i];
  }
  return out;
}

LabeledExample apply_te(const LabeledExample& example, const TriggerSpec& trigger, int y_tc) {
  return {embed(example.concepts, trigger), y_tc};
}

std::vector<std::size_t> select_adv(const ConceptDataset& dataset, int y_tc, double injection_rate,
                                    PoisonMode mode, std::uint64_t seed) {
  if (y_tc < 0 || y_tc >= dataset.class_count()) {
    throw std::invalid_argument("select_adv: target class out of range");
  }
  if (!(injection_rate > 0.0 && injection_rate < 1.0)) {
    throw std::invalid_argument("select_adv: injection rate must be in (0,1)");
  }
  const long long count = round_half_up(injection_rate * static_cast<double>(dataset.size()));
  if (count < 1) {
    throw std::invalid_argument("select_adv: injection rate too small, round(p*n) must be >= 1");
  }
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const bool is_target = dataset.example(i).label == y_tc;
    if (mode == PoisonMode::DirtyLabel ? !is_target : is_target) pool.push_back(i);
  }
  if (pool.size() < static_cast<std::size_t>(count)) {
    throw std::invalid_argument("select_adv: eligible pool has " + std::to_string(pool.size()) +
                                " rows, need " + std::to_string(count));
  }
  Rng rng(seed);
  const auto picks = rng.sample_without_replacement(pool.size(), static_cast<std::size_t>(count));
  std::vector<std::size_t> indices;
  indices.reserve(picks.size());
  for (std::size_t p : picks) indices.push_back(pool[p]);
  return indices;  // ascending, since picks are sorted and pool is ascending
}

PoisonOutcome poison_dataset(const ConceptDataset& dataset, const PoisonPlan& plan) {
  validate_trigger(plan.trigger, dataset.concept_count());
  auto adv = select_adv(dataset, plan.y_tc, plan.injection_rate, plan.mode, plan.seed);
  std::vector<LabeledExample> rows(dataset.examples().begin(), dataset.examples().end());
  for (std::size_t i : adv) rows[i] = apply_te(rows[i], plan.trigger, plan.y_tc);
  return {ConceptDataset(std::move(rows), dataset.concept_count(), dataset.class_count(),
                         dataset.concept_names()),
          std::move(adv)};
}

ConceptDataset poison_test_cache(const ConceptDataset& test_set, const TriggerSpec& trigger,
                                 int y_tc) {
  validate_trigger(trigger, test_set.concept_count());
  std::vector<LabeledExample> rows;
  for (const auto& ex : test_set.examples()) {
    if (ex.label == y_tc) continue;
    rows.push_back({embed(ex.concepts, trigger), ex.label});
  }
  if (rows.empty()) {
    throw std::invalid_argument("poison_test_cache: no rows left after dropping the target class");
  }
  return ConceptDataset(std::move(rows), test_set.concept_count(), test_set.class_count(),
                        test_set.concept_names());
}

}  // namespace catlab
