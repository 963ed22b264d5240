#include "catlab/learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "catlab/numeric.hpp"
#include "catlab/rng.hpp"

namespace catlab {

namespace {

void check_width(std::size_t expected, std::size_t got, const char* who) {
  if (expected != got) {
    throw std::invalid_argument(std::string(who) + ": concept vector length " +
                                std::to_string(got) + " does not match model input " +
                                std::to_string(expected));
  }
}

}  // namespace

double logistic_predict(const LogisticModel& model, const ConceptVector& concepts) {
  check_width(model.weights.size(), concepts.size(), "logistic_predict");
  double z = model.bias;
  for (std::size_t j = 0; j < concepts.size(); ++j) z += model.weights[j] * concepts[j];
  return sigmoid(z);
}

double logistic_loss(const LogisticModel& model, const ConceptDataset& dataset,
                     double weight_decay) {
  ExactSum acc;
  for (const auto& ex : dataset.examples()) {
    double z = model.bias;
    for (std::size_t j = 0; j < ex.concepts.size(); ++j) z += model.weights[j] * ex.concepts[j];
    // -[y log s + (1-y) log(1-s)] = softplus(z) - y*z
    acc.add(softplus(z) - static_cast<double>(ex.label) * z);
  }
  double penalty = 0.0;
  for (double w : model.weights) penalty += w * w;
  return acc.total() / static_cast<double>(dataset.size()) + 0.5 * weight_decay * penalty;
}

std::pair<std::vector<double>, double> logistic_gradients(const LogisticModel& model,
                                                          const ConceptDataset& dataset,
                                                          double weight_decay) {
  const std::size_t width = model.weights.size();
  std::vector<ExactSum> grad_w(width);
  ExactSum grad_b;
  for (const auto& ex : dataset.examples()) {
    double z = model.bias;
    for (std::size_t j = 0; j < width; ++j) z += model.weights[j] * ex.concepts[j];
    const double residual = sigmoid(z) - static_cast<double>(ex.label);
    for (std::size_t j = 0; j < width; ++j) {
      if (ex.concepts[j] != 0.0) grad_w[j].add(residual * ex.concepts[j]);
    }
    grad_b.add(residual);
  }
  const double inv_n = 1.0 / static_cast<double>(dataset.size());
  std::vector<double> gw(width);
  for (std::size_t j = 0; j < width; ++j) {
    gw[j] = grad_w[j].total() * inv_n + weight_decay * model.weights[j];
  }
  return {std::move(gw), grad_b.total() * inv_n};
}

LogisticModel fit_logistic(const ConceptDataset& binary_dataset, const TrainConfig& config) {
  if (binary_dataset.size() < 2) throw std::invalid_argument("fit_logistic: need >= 2 examples");
  bool seen[2] = {false, false};
  for (const auto& ex : binary_dataset.examples()) {
    if (ex.label != 0 && ex.label != 1) {
      throw std::invalid_argument("fit_logistic: labels must be 0/1");
    }
    seen[ex.label] = true;
  }
  if (!seen[0] || !seen[1]) throw std::invalid_argument("fit_logistic: single-class input");
  if (!(config.learning_rate > 0.0)) throw std::invalid_argument("fit_logistic: learning_rate must be positive");
  if (!(config.lr_decay_gamma > 0.0 && config.lr_decay_gamma <= 1.0)) {
    throw std::invalid_argument("fit_logistic: lr_decay_gamma must be in (0,1]");
  }

  LogisticModel model;
  model.weights.assign(binary_dataset.concept_count(), 0.0);
  double lr = config.learning_rate;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    auto [gw, gb] = logistic_gradients(model, binary_dataset, config.weight_decay);
    for (std::size_t j = 0; j < model.weights.size(); ++j) model.weights[j] -= lr * gw[j];
    model.bias -= lr * gb;
    lr *= config.lr_decay_gamma;
  }
  return model;
}

MlpModel init_mlp(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim,
                  std::uint64_t seed) {
  if (input_dim == 0 || hidden_dim == 0 || output_dim == 0) {
    throw std::invalid_argument("init_mlp: dimensions must be positive");
  }
  MlpModel m;
  m.input_dim = input_dim;
  m.hidden_dim = hidden_dim;
  m.output_dim = output_dim;
  Rng rng(seed);
  auto fill = [&rng](std::vector<double>& v, std::size_t n, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    v.resize(n);
    for (double& x : v) x = (2.0 * rng.uniform() - 1.0) * bound;
  };
  fill(m.w1, hidden_dim * input_dim, input_dim);
  fill(m.b1, hidden_dim, input_dim);
  fill(m.w2, output_dim * hidden_dim, hidden_dim);
  fill(m.b2, output_dim, hidden_dim);
  return m;
}

namespace {

struct Forward {
  std::vector<double> hidden;  // post-ReLU
  std::vector<double> logits;
};

Forward forward_pass(const MlpModel& m, const ConceptVector& c) {
  Forward f;
  f.hidden.resize(m.hidden_dim);
  for (std::size_t h = 0; h < m.hidden_dim; ++h) {
    double z = m.b1[h];
    const double* row = &m.w1[h * m.input_dim];
    for (std::size_t j = 0; j < m.input_dim; ++j) z += row[j] * c[j];
    f.hidden[h] = z > 0.0 ? z : 0.0;
  }
  f.logits.resize(m.output_dim);
  for (std::size_t k = 0; k < m.output_dim; ++k) {
    double z = m.b2[k];
    const double* row = &m.w2[k * m.hidden_dim];
    for (std::size_t h = 0; h < m.hidden_dim; ++h) z += row[h] * f.hidden[h];
    f.logits[k] = z;
  }
  return f;
}

// Accumulates dLoss/dparams for one example into grads (unnormalized).
void backward_pass(const MlpModel& m, const ConceptVector& c, int label, const Forward& f,
                   MlpGradients& g) {
  std::vector<double> delta = softmax(f.logits);
  delta[static_cast<std::size_t>(label)] -= 1.0;

  for (std::size_t k = 0; k < m.output_dim; ++k) {
    double* row = &g.w2[k * m.hidden_dim];
    for (std::size_t h = 0; h < m.hidden_dim; ++h) row[h] += delta[k] * f.hidden[h];
    g.b2[k] += delta[k];
  }
  for (std::size_t h = 0; h < m.hidden_dim; ++h) {
    if (f.hidden[h] <= 0.0) continue;  // ReLU gate
    double dh = 0.0;
    for (std::size_t k = 0; k < m.output_dim; ++k) dh += m.w2[k * m.hidden_dim + h] * delta[k];
    double* row = &g.w1[h * m.input_dim];
    for (std::size_t j = 0; j < m.input_dim; ++j) row[j] += dh * c[j];
    g.b1[h] += dh;
  }
}

MlpGradients zero_gradients(const MlpModel& m) {
  MlpGradients g;
  g.w1.assign(m.w1.size(), 0.0);
  g.b1.assign(m.b1.size(), 0.0);
  g.w2.assign(m.w2.size(), 0.0);
  g.b2.assign(m.b2.size(), 0.0);
  return g;
}

void scale(MlpGradients& g, double s) {
  for (double& v : g.w1) v *= s;
  for (double& v : g.b1) v *= s;
  for (double& v : g.w2) v *= s;
  for (double& v : g.b2) v *= s;
}

struct AdamState {
  std::vector<double> m, v;
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

void adam_step(std::vector<double>& params, const std::vector<double>& grad, AdamState& state,
               double lr, long long t) {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = kBeta1 * state.m[i] + (1.0 - kBeta1) * grad[i];
    state.v[i] = kBeta2 * state.v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + kEps);
  }
}

}  // namespace

double mlp_loss(const MlpModel& model, const std::vector<LabeledExample>& rows) {
  if (rows.empty()) throw std::invalid_argument("mlp_loss: empty batch");
  double total = 0.0;
  for (const auto& ex : rows) {
    const Forward f = forward_pass(model, ex.concepts);
    total += log_sum_exp(f.logits) - f.logits[static_cast<std::size_t>(ex.label)];
  }
  return total / static_cast<double>(rows.size());
}

MlpGradients mlp_gradients(const MlpModel& model, const std::vector<LabeledExample>& rows) {
  if (rows.empty()) throw std::invalid_argument("mlp_gradients: empty batch");
  MlpGradients g = zero_gradients(model);
  for (const auto& ex : rows) {
    const Forward f = forward_pass(model, ex.concepts);
    backward_pass(model, ex.concepts, ex.label, f, g);
  }
  scale(g, 1.0 / static_cast<double>(rows.size()));
  return g;
}

MlpModel train_mlp(const ConceptDataset& dataset, const TrainConfig& config) {
  if (dataset.size() == 0) throw std::invalid_argument("train_mlp: empty dataset");
  if (config.hidden_dim == 0) throw std::invalid_argument("train_mlp: hidden_dim must be positive");
  if (config.batch_size == 0) throw std::invalid_argument("train_mlp: batch_size must be positive");
  if (!(config.learning_rate > 0.0)) throw std::invalid_argument("train_mlp: learning_rate must be positive");
  if (!(config.lr_decay_gamma > 0.0 && config.lr_decay_gamma <= 1.0)) {
    throw std::invalid_argument("train_mlp: lr_decay_gamma must be in (0,1]");
  }

  MlpModel model = init_mlp(dataset.concept_count(), config.hidden_dim,
                            static_cast<std::size_t>(dataset.class_count()), config.seed);
  // Epoch shuffles draw from their own stream derived from the same seed.
  Rng rng(derive_seed(config.seed, "mlp_shuffle"));

  AdamState s_w1(model.w1.size()), s_b1(model.b1.size()), s_w2(model.w2.size()),
      s_b2(model.b2.size());
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  double lr = config.learning_rate;
  long long step = 0;
  std::vector<LabeledExample> batch;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(dataset.example(order[i]));
      const MlpGradients g = mlp_gradients(model, batch);
      ++step;
      adam_step(model.w1, g.w1, s_w1, lr, step);
      adam_step(model.b1, g.b1, s_b1, lr, step);
      adam_step(model.w2, g.w2, s_w2, lr, step);
      adam_step(model.b2, g.b2, s_b2, lr, step);
      // Decoupled decay on the weight matrices only.
      if (config.weight_decay > 0.0) {
        const double shrink = lr * config.weight_decay;
        for (double& w : model.w1) w -= shrink * w;
        for (double& w : model.w2) w -= shrink * w;
      }
    }
    lr *= config.lr_decay_gamma;
  }
  return model;
}

MlpPrediction mlp_predict(const MlpModel& model, const ConceptVector& concepts) {
  check_width(model.input_dim, concepts.size(), "mlp_predict");
  const Forward f = forward_pass(model, concepts);
  MlpPrediction pred;
  pred.probabilities = softmax(f.logits);
  pred.label = 0;
  for (std::size_t k = 1; k < pred.probabilities.size(); ++k) {
    if (pred.probabilities[k] > pred.probabilities[static_cast<std::size_t>(pred.label)]) {
      pred.label = static_cast<int>(k);
    }
  }
  return pred;
}

double accuracy(const MlpModel& model, const ConceptDataset& dataset) {
  if (dataset.size() == 0) throw std::invalid_argument("accuracy: empty dataset");
  std::size_t correct = 0;
  for (const auto& ex : dataset.examples()) {
    if (mlp_predict(model, ex.concepts).label == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

}  // namespace catlab
