#ifndef CATLAB_LEARNER_HPP
#define CATLAB_LEARNER_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "catlab/concept_data.hpp"

namespace catlab {

struct TrainConfig {
  double learning_rate = 1e-4;
  double weight_decay = 5e-5;
  double lr_decay_gamma = 0.95;  // applied per epoch
  std::size_t epochs = 200;
  std::size_t batch_size = 64;
  std::size_t hidden_dim = 64;
  std::uint64_t seed = 0;

  // Settings for the full-batch logistic filter fit: a stronger penalty so
  // label-independent concepts shrink to clearly-smallest magnitudes within
  // the epoch budget.
  static TrainConfig logistic_filter_defaults() {
    TrainConfig cfg;
    cfg.learning_rate = 0.5;
    cfg.weight_decay = 1e-2;
    cfg.lr_decay_gamma = 1.0;
    cfg.epochs = 800;
    return cfg;
  }
};

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;

  bool operator==(const LogisticModel&) const = default;
};

// One hidden ReLU layer, softmax output. Matrices are row-major.
struct MlpModel {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t output_dim = 0;
  std::vector<double> w1;  // hidden_dim x input_dim
  std::vector<double> b1;  // hidden_dim
  std::vector<double> w2;  // output_dim x hidden_dim
  std::vector<double> b2;  // output_dim

  bool operator==(const MlpModel&) const = default;
};

// Full-batch gradient descent on mean binary cross-entropy plus an L2
// penalty (weight_decay/2)*||w||^2 on the weights. Weights start at zero, so
// the result is seed-free; gradient sums are accumulated exactly, so it is
// also invariant under permutations of the training rows.
LogisticModel fit_logistic(const ConceptDataset& binary_dataset, const TrainConfig& config);

double logistic_predict(const LogisticModel& model, const ConceptVector& concepts);

// Penalized objective minimized by fit_logistic; exposed for gradient and
// monotonicity checks.
double logistic_loss(const LogisticModel& model, const ConceptDataset& dataset,
                     double weight_decay);
std::pair<std::vector<double>, double> logistic_gradients(const LogisticModel& model,
                                                          const ConceptDataset& dataset,
                                                          double weight_decay);

// Adam (beta1=0.9, beta2=0.999, eps=1e-8) with decoupled weight decay on the
// weight matrices and a per-epoch exponential learning-rate schedule.
// Deterministic for a fixed seed: init draws and epoch shuffles come from one
// seeded stream and execution is single-threaded.
MlpModel train_mlp(const ConceptDataset& dataset, const TrainConfig& config);

// Parameters at initialization (what train_mlp returns for epochs = 0).
MlpModel init_mlp(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim,
                  std::uint64_t seed);

struct MlpPrediction {
  int label = 0;
  std::vector<double> probabilities;
};

// Argmax of the softmax probabilities; exact ties resolve to the lowest index.
MlpPrediction mlp_predict(const MlpModel& model, const ConceptVector& concepts);

double accuracy(const MlpModel& model, const ConceptDataset& dataset);

struct MlpGradients {
  std::vector<double> w1, b1, w2, b2;
};

// Mean softmax cross-entropy over the given rows (no decay term), with
// analytic gradients; exposed for finite-difference checks.
double mlp_loss(const MlpModel& model, const std::vector<LabeledExample>& rows);
MlpGradients mlp_gradients(const MlpModel& model, const std::vector<LabeledExample>& rows);

}  // namespace catlab

#endif
