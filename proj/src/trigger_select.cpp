#include "catlab/trigger_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "catlab/numeric.hpp"
#include "catlab/rng.hpp"

namespace catlab {

void validate_trigger(const TriggerSpec& trigger, std::size_t concept_count) {
  if (trigger.indices.empty()) throw std::invalid_argument("trigger: needs at least one concept");
  if (trigger.indices.size() != trigger.values.size()) {
    throw std::invalid_argument("trigger: indices and values must have equal length");
  }
  std::vector<bool> seen(concept_count, false);
  for (std::size_t k : trigger.indices) {
    if (k >= concept_count) throw std::invalid_argument("trigger: concept index out of range");
    if (seen[k]) throw std::invalid_argument("trigger: duplicate concept index");
    seen[k] = true;
  }
  for (double v : trigger.values) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw std::invalid_argument("trigger: value outside [0,1]");
    }
  }
}

std::vector<std::size_t> concept_filter(const ConceptDataset& dataset, int y_tc,
                                        std::size_t trigger_size,
                                        const TrainConfig& train_config) {
  if (trigger_size < 1 || trigger_size > dataset.concept_count()) {
    throw std::invalid_argument("concept_filter: trigger_size must be in [1, L]");
  }
  const ConceptDataset cache = build_cache_subset(dataset, y_tc, train_config.seed);
  const LogisticModel filter = fit_logistic(cache, train_config);

  std::vector<std::size_t> order(dataset.concept_count());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&filter](std::size_t a, std::size_t b) {
    const double ma = std::fabs(filter.weights[a]);
    const double mb = std::fabs(filter.weights[b]);
    if (ma != mb) return ma < mb;
    return a < b;
  });
  order.resize(trigger_size);
  return order;
}

std::vector<double> attack_pattern(const SparsityProfile& profile, std::size_t trigger_size) {
  if (trigger_size < 1) throw std::invalid_argument("attack_pattern: trigger_size must be >= 1");
  const double fill = profile.polarity == Polarity::Positive ? 0.0 : 1.0;
  return std::vector<double>(trigger_size, fill);
}

TriggerSpec cat_trigger(const ConceptDataset& dataset, int y_tc, std::size_t trigger_size,
                        const TrainConfig& train_config) {
  TriggerSpec spec;
  spec.indices = concept_filter(dataset, y_tc, trigger_size, train_config);
  spec.values = attack_pattern(sparsity_profile(dataset), trigger_size);
  return spec;
}

ZScoreRecord zscore(const ConceptDataset& dataset, int y_tc, std::size_t concept_index,
                    double op_value) {
  if (dataset.size() == 0) throw std::invalid_argument("zscore: empty dataset");
  if (concept_index >= dataset.concept_count()) {
    throw std::invalid_argument("zscore: concept index out of range");
  }
  std::size_t n_target = 0, n_match = 0, n_match_target = 0;
  for (const auto& ex : dataset.examples()) {
    const bool is_target = ex.label == y_tc;
    if (is_target) ++n_target;
    if (ex.concepts[concept_index] == op_value) {
      ++n_match;
      if (is_target) ++n_match_target;
    }
  }
  ZScoreRecord rec;
  rec.concept_index = concept_index;
  rec.op_value = op_value;
  rec.p0 = static_cast<double>(n_target) / static_cast<double>(dataset.size());
  if (rec.p0 == 0.0 || rec.p0 == 1.0) {
    throw std::invalid_argument("zscore: degenerate target distribution (p0 = " +
                                std::to_string(rec.p0) + ")");
  }
  if (n_match == 0) {
    // No row holds the operation value: never selectable.
    rec.supported = false;
    rec.p_cond = 0.0;
    rec.z = -std::numeric_limits<double>::infinity();
    return rec;
  }
  rec.supported = true;
  rec.p_cond = static_cast<double>(n_match_target) / static_cast<double>(n_match);
  rec.z = (rec.p_cond - rec.p0) / (rec.p0 * (1.0 - rec.p0) / rec.p_cond);
  return rec;
}

CatPlusResult catplus_trigger(const ConceptDataset& dataset, int y_tc, std::size_t trigger_size) {
  if (trigger_size < 1 || trigger_size > dataset.concept_count()) {
    throw std::invalid_argument("catplus_trigger: trigger_size must be in [1, L]");
  }
  // Private working copy; the caller's dataset is never touched.
  std::vector<LabeledExample> working(dataset.examples().begin(), dataset.examples().end());
  std::vector<bool> chosen(dataset.concept_count(), false);

  CatPlusResult result;
  while (result.trigger.indices.size() < trigger_size) {
    const ConceptDataset view(working, dataset.concept_count(), dataset.class_count());
    bool found = false;
    ZScoreRecord best;
    for (std::size_t k = 0; k < dataset.concept_count(); ++k) {
      if (chosen[k]) continue;
      for (double op : {0.0, 1.0}) {
        const ZScoreRecord rec = zscore(view, y_tc, k, op);
        if (!rec.supported) continue;
        // Scan order (ascending concept, value 0 first) + strict improvement
        // implements the tie-breaking rule.
        if (!found || rec.z > best.z) {
          best = rec;
          found = true;
        }
      }
    }
    if (!found) {
      throw std::runtime_error("catplus_trigger: no supported (concept, value) candidate left");
    }
    chosen[best.concept_index] = true;
    result.trigger.indices.push_back(best.concept_index);
    result.trigger.values.push_back(best.op_value);
    result.trace.push_back(best);
    for (auto& ex : working) ex.concepts[best.concept_index] = best.op_value;
  }
  return result;
}

double zscore_continuous(const ConceptDataset& dataset, int y_tc, std::size_t concept_index,
                         double op_value, const std::vector<double>& value_set) {
  if (value_set.empty()) throw std::invalid_argument("zscore_continuous: empty value set");
  double distance = 0.0;
  for (double v : value_set) distance += (v - op_value) * (v - op_value);
  const ZScoreRecord base = zscore(dataset, y_tc, concept_index, op_value);
  if (!base.supported) return -std::numeric_limits<double>::infinity();
  return distance * base.z;
}

InformationGain information_gain(const ConceptDataset& dataset, int y_tc,
                                 std::size_t concept_index, double op_value) {
  if (dataset.size() == 0) throw std::invalid_argument("information_gain: empty dataset");
  if (concept_index >= dataset.concept_count()) {
    throw std::invalid_argument("information_gain: concept index out of range");
  }
  std::size_t n_target = 0, n_match = 0, n_match_target = 0;
  for (const auto& ex : dataset.examples()) {
    const bool is_target = ex.label == y_tc;
    if (is_target) ++n_target;
    if (ex.concepts[concept_index] == op_value) {
      ++n_match;
      if (is_target) ++n_match_target;
    }
  }
  const double n = static_cast<double>(dataset.size());
  const double p0 = static_cast<double>(n_target) / n;
  if (p0 == 0.0 || p0 == 1.0) {
    throw std::invalid_argument("information_gain: degenerate target distribution");
  }
  const double prior_entropy = binary_entropy_bits(p0);
  double conditional = 0.0;
  if (n_match > 0) {
    const double p_match = static_cast<double>(n_match_target) / static_cast<double>(n_match);
    conditional += (static_cast<double>(n_match) / n) * binary_entropy_bits(p_match);
  }
  const std::size_t n_other = dataset.size() - n_match;
  if (n_other > 0) {
    const double p_other =
        static_cast<double>(n_target - n_match_target) / static_cast<double>(n_other);
    conditional += (static_cast<double>(n_other) / n) * binary_entropy_bits(p_other);
  }
  InformationGain ig;
  ig.gain_bits = prior_entropy - conditional;
  ig.ratio = ig.gain_bits / prior_entropy;
  return ig;
}

}  // namespace catlab
