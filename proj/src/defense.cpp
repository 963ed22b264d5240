#include "catlab/defense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "catlab/evaluate.hpp"
#include "catlab/parallel.hpp"
#include "catlab/poison.hpp"
#include "catlab/rng.hpp"

namespace catlab {

namespace {

double squared_distance(const ConceptVector& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    d += diff * diff;
  }
  return d;
}

std::vector<std::vector<double>> kmeanspp_seed(const std::vector<ConceptVector>& vectors,
                                               std::size_t m, Rng& rng) {
  std::vector<std::vector<double>> centroids;
  centroids.reserve(m);
  const std::size_t first = rng.uniform_index(vectors.size());
  centroids.emplace_back(vectors[first].begin(), vectors[first].end());

  std::vector<double> d2(vectors.size());
  while (centroids.size() < m) {
    double total = 0.0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) best = std::min(best, squared_distance(vectors[i], c));
      d2[i] = best;
      total += best;
    }
    std::size_t pick;
    if (total <= 0.0) {
      // All points coincide with existing centers; any point works.
      pick = rng.uniform_index(vectors.size());
    } else {
      const double u = rng.uniform() * total;
      double cum = 0.0;
      pick = vectors.size() - 1;
      for (std::size_t i = 0; i < vectors.size(); ++i) {
        cum += d2[i];
        if (u < cum) {
          pick = i;
          break;
        }
      }
    }
    centroids.emplace_back(vectors[pick].begin(), vectors[pick].end());
  }
  return centroids;
}

}  // namespace

double kmeans_inertia(const std::vector<ConceptVector>& vectors,
                      const std::vector<std::size_t>& assignments,
                      const std::vector<std::vector<double>>& centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    total += squared_distance(vectors[i], centroids[assignments[i]]);
  }
  return total;
}

KMeansResult kmeans_cluster(const std::vector<ConceptVector>& vectors, std::size_t m,
                            std::uint64_t seed, std::size_t max_iters) {
  if (m < 1) throw std::invalid_argument("kmeans_cluster: m must be >= 1");
  if (vectors.size() < m) {
    throw std::invalid_argument("kmeans_cluster: need at least m points, have " +
                                std::to_string(vectors.size()));
  }
  const std::size_t width = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != width) throw std::invalid_argument("kmeans_cluster: ragged inputs");
  }

  Rng rng(seed);
  KMeansResult result;
  result.centroids = kmeanspp_seed(vectors, m, rng);
  result.assignments.assign(vectors.size(), 0);
  std::vector<std::size_t> previous;
  std::vector<std::size_t> counts(m, 0);

  for (std::size_t iter = 1; iter <= max_iters; ++iter) {
    // Assignment step; ties go to the lower cluster index.
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      std::size_t best = 0;
      double best_d = squared_distance(vectors[i], result.centroids[0]);
      for (std::size_t c = 1; c < m; ++c) {
        const double d = squared_distance(vectors[i], result.centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      result.assignments[i] = best;
    }

    // Empty-cluster repair: steal the point farthest from its assigned
    // centroid, drawing only from clusters that keep at least two points.
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t a : result.assignments) counts[a]++;
    for (std::size_t c = 0; c < m; ++c) {
      if (counts[c] != 0) continue;
      std::size_t thief = vectors.size();
      double worst = -1.0;
      for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (counts[result.assignments[i]] < 2) continue;
        const double d = squared_distance(vectors[i], result.centroids[result.assignments[i]]);
        if (d > worst) {
          worst = d;
          thief = i;
        }
      }
      if (thief == vectors.size()) {
        throw std::runtime_error("kmeans_cluster: cannot repair empty cluster");
      }
      counts[result.assignments[thief]]--;
      result.assignments[thief] = c;
      counts[c] = 1;
    }

    // Update step.
    for (auto& c : result.centroids) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      auto& c = result.centroids[result.assignments[i]];
      for (std::size_t k = 0; k < width; ++k) c[k] += vectors[i][k];
    }
    for (std::size_t c = 0; c < m; ++c) {
      for (double& v : result.centroids[c]) v /= static_cast<double>(counts[c]);
    }

    result.iterations = iter;
    if (result.assignments == previous) break;
    previous = result.assignments;
  }

  result.inertia = kmeans_inertia(vectors, result.assignments, result.centroids);
  return result;
}

EnsembleDefense train_ensemble(const ConceptDataset& train_set, std::size_t m,
                               const TrainConfig& train_config, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("train_ensemble: m must be >= 2");
  if (train_set.size() < m) {
    throw std::invalid_argument("train_ensemble: fewer training rows than clusters");
  }
  std::vector<ConceptVector> vectors;
  vectors.reserve(train_set.size());
  for (const auto& ex : train_set.examples()) vectors.push_back(ex.concepts);
  KMeansResult clusters = kmeans_cluster(vectors, m, derive_seed(seed, "kmeans"));

  std::vector<std::vector<LabeledExample>> groups(m);
  for (std::size_t i = 0; i < train_set.size(); ++i) {
    groups[clusters.assignments[i]].push_back(train_set.example(i));
  }

  EnsembleDefense defense;
  defense.m = m;
  defense.centroids = std::move(clusters.centroids);
  defense.sub_models.resize(m);
  for (std::size_t c = 0; c < m; ++c) {
    bool single_class = true;
    for (const auto& ex : groups[c]) {
      if (ex.label != groups[c].front().label) {
        single_class = false;
        break;
      }
    }
    if (single_class) {
      defense.warnings.push_back("cluster " + std::to_string(c) +
                                 " contains a single class (label " +
                                 std::to_string(groups[c].front().label) + ")");
    }
  }

  // Independent sub-seeds keep parallel training deterministic.
  run_tasks(m, [&](std::size_t c) {
    TrainConfig sub_config = train_config;
    sub_config.seed = derive_seed(seed, "sub_model", c);
    const ConceptDataset sub_set(groups[c], train_set.concept_count(), train_set.class_count(),
                                 train_set.concept_names());
    defense.sub_models[c] = train_mlp(sub_set, sub_config);
  });
  return defense;
}

int ensemble_predict(const EnsembleDefense& defense, const ConceptVector& concepts) {
  if (defense.sub_models.empty()) throw std::invalid_argument("ensemble_predict: empty ensemble");
  std::vector<std::size_t> votes(defense.sub_models.front().output_dim, 0);
  for (const auto& model : defense.sub_models) {
    votes[static_cast<std::size_t>(mlp_predict(model, concepts).label)]++;
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < votes.size(); ++k) {
    if (votes[k] > votes[best]) best = k;
  }
  return static_cast<int>(best);
}

int routed_predict(const EnsembleDefense& defense, const ConceptVector& concepts) {
  if (defense.sub_models.empty() || defense.centroids.size() != defense.sub_models.size()) {
    throw std::invalid_argument("routed_predict: ensemble has no usable centroids");
  }
  std::size_t best = 0;
  double best_d = squared_distance(concepts, defense.centroids[0]);
  for (std::size_t j = 1; j < defense.centroids.size(); ++j) {
    const double d = squared_distance(concepts, defense.centroids[j]);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return mlp_predict(defense.sub_models[best], concepts).label;
}

DefenseReport evaluate_defense(const EnsembleDefense& defense, const MlpModel& baseline_model,
                               const ConceptDataset& clean_test, const TriggerSpec& trigger,
                               int y_tc) {
  if (clean_test.size() == 0) throw std::invalid_argument("evaluate_defense: empty test set");
  DefenseReport report;
  report.clustering_num = defense.m;
  report.warnings = defense.warnings;

  std::size_t routed_correct = 0, majority_correct = 0;
  for (const auto& ex : clean_test.examples()) {
    if (routed_predict(defense, ex.concepts) == ex.label) ++routed_correct;
    if (ensemble_predict(defense, ex.concepts) == ex.label) ++majority_correct;
  }
  const double n_test = static_cast<double>(clean_test.size());
  report.ensemble_clean_accuracy = static_cast<double>(routed_correct) / n_test;
  report.majority_clean_accuracy = static_cast<double>(majority_correct) / n_test;
  report.baseline_clean_accuracy = accuracy(baseline_model, clean_test);

  const ConceptDataset cache = poison_test_cache(clean_test, trigger, y_tc);
  std::size_t routed_hits = 0, majority_hits = 0;
  for (const auto& ex : cache.examples()) {
    if (routed_predict(defense, ex.concepts) == y_tc) ++routed_hits;
    if (ensemble_predict(defense, ex.concepts) == y_tc) ++majority_hits;
  }
  const double n_cache = static_cast<double>(cache.size());
  report.ensemble_asr = static_cast<double>(routed_hits) / n_cache;
  report.majority_asr = static_cast<double>(majority_hits) / n_cache;
  report.baseline_asr = test_time_2(baseline_model, cache, y_tc).asr;
  report.asr_reduction = report.baseline_asr - report.ensemble_asr;
  return report;
}

}  // namespace catlab
