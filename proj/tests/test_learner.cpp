#include <cmath>

#include "doctest.h"

#include "catlab/learner.hpp"
#include "catlab/rng.hpp"
#include "helpers.hpp"

using namespace catlab;
using testutil::make_dataset;

namespace {

// Central finite differences against a scalar loss.
template <typename Loss>
double fd_gradient(Loss&& loss, double& param) {
  constexpr double kStep = 1e-5;
  const double saved = param;
  param = saved + kStep;
  const double up = loss();
  param = saved - kStep;
  const double down = loss();
  param = saved;
  return (up - down) / (2.0 * kStep);
}

double rel_error(double analytic, double fd) {
  return std::fabs(analytic - fd) / std::fmax(1.0, std::fmax(std::fabs(analytic), std::fabs(fd)));
}

}  // namespace

TEST_CASE("logistic_predict basics") {
  LogisticModel zero;
  zero.weights = {0.0, 0.0};
  CHECK(logistic_predict(zero, {1.0, 0.0}) == 0.5);

  LogisticModel strong;
  strong.weights = {10.0, 0.0};
  CHECK(logistic_predict(strong, {1.0, 0.0}) > 0.999);
  CHECK_THROWS(logistic_predict(strong, {1.0}));

  // monotone in each coordinate with the sign of the weight
  LogisticModel mixed;
  mixed.weights = {2.0, -3.0};
  CHECK(logistic_predict(mixed, {0.8, 0.5}) > logistic_predict(mixed, {0.2, 0.5}));
  CHECK(logistic_predict(mixed, {0.5, 0.8}) < logistic_predict(mixed, {0.5, 0.2}));
}

TEST_CASE("fit_logistic input validation") {
  TrainConfig cfg = TrainConfig::logistic_filter_defaults();
  CHECK_THROWS(fit_logistic(make_dataset({{0, 1}, {1, 0}}, {0, 0}, 2), cfg));  // single class
  CHECK_THROWS(fit_logistic(make_dataset({{0, 1}}, {1}, 2), cfg));             // too small
  CHECK_THROWS(fit_logistic(make_dataset({{0, 1}, {1, 0}, {1, 1}}, {0, 1, 2}, 3), cfg));
}

TEST_CASE("fit_logistic finds the predictive concept") {
  // concept 0 equals the label; concepts 1,2 constant
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    const int y = i % 2;
    rows.push_back({static_cast<double>(y), 1.0, 0.0});
    labels.push_back(y);
  }
  TrainConfig cfg = TrainConfig::logistic_filter_defaults();
  cfg.epochs = 3000;
  cfg.learning_rate = 1.0;
  cfg.weight_decay = 0.05;
  const LogisticModel model = fit_logistic(make_dataset(rows, labels, 2), cfg);

  CHECK(std::fabs(model.weights[0]) > std::fabs(model.weights[1]));
  CHECK(std::fabs(model.weights[0]) > std::fabs(model.weights[2]));
  // constant concepts decay to zero under the penalty
  CHECK(std::fabs(model.weights[1]) < 1e-3);
  CHECK(std::fabs(model.weights[2]) < 1e-3);
}

TEST_CASE("fit_logistic symmetry between identical concepts") {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  Rng rng(3);
  for (int i = 0; i < 30; ++i) {
    const double a = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const double other = rng.bernoulli(0.5) ? 1.0 : 0.0;
    rows.push_back({a, a, other});
    labels.push_back(rng.bernoulli(0.5) ? 1 : 0);
  }
  labels[0] = 0;
  labels[1] = 1;
  const LogisticModel model =
      fit_logistic(make_dataset(rows, labels, 2), TrainConfig::logistic_filter_defaults());
  CHECK(std::fabs(model.weights[0] - model.weights[1]) < 1e-8);
}

TEST_CASE("fit_logistic is invariant under row permutation") {
  Rng rng(19);
  const ConceptDataset d = testutil::random_binary_dataset(rng, 37, 5, 2);
  std::vector<LabeledExample> reversed(d.examples().rbegin(), d.examples().rend());
  const ConceptDataset r(reversed, d.concept_count(), d.class_count());

  TrainConfig cfg = TrainConfig::logistic_filter_defaults();
  cfg.epochs = 200;
  const LogisticModel a = fit_logistic(d, cfg);
  const LogisticModel b = fit_logistic(r, cfg);
  CHECK(a.weights == b.weights);  // bit-exact
  CHECK(a.bias == b.bias);
}

TEST_CASE("logistic loss decreases monotonically over epochs") {
  Rng rng(23);
  const ConceptDataset d = testutil::random_binary_dataset(rng, 50, 4, 2);
  TrainConfig cfg = TrainConfig::logistic_filter_defaults();
  double previous = logistic_loss(LogisticModel{{0.0, 0.0, 0.0, 0.0}, 0.0}, d, cfg.weight_decay);
  for (std::size_t epochs = 1; epochs <= 40; ++epochs) {
    cfg.epochs = epochs;
    const double loss = logistic_loss(fit_logistic(d, cfg), d, cfg.weight_decay);
    CHECK(loss <= previous + 1e-12);
    previous = loss;
  }
}

TEST_CASE("logistic gradients match finite differences") {
  Rng rng(29);
  for (int instance = 0; instance < 5; ++instance) {
    const ConceptDataset d = testutil::random_binary_dataset(rng, 12, 4, 2);
    LogisticModel model;
    model.weights.resize(4);
    for (double& w : model.weights) w = 2.0 * rng.uniform() - 1.0;
    model.bias = 2.0 * rng.uniform() - 1.0;

    const auto [gw, gb] = logistic_gradients(model, d, 0.01);
    for (std::size_t j = 0; j < model.weights.size(); ++j) {
      const double fd =
          fd_gradient([&] { return logistic_loss(model, d, 0.01); }, model.weights[j]);
      CHECK(rel_error(gw[j], fd) <= 1e-4);
    }
    const double fdb = fd_gradient([&] { return logistic_loss(model, d, 0.01); }, model.bias);
    CHECK(rel_error(gb, fdb) <= 1e-4);
  }
}

TEST_CASE("mlp_predict properties") {
  MlpModel zero;
  zero.input_dim = 3;
  zero.hidden_dim = 2;
  zero.output_dim = 4;
  zero.w1.assign(6, 0.0);
  zero.b1.assign(2, 0.0);
  zero.w2.assign(8, 0.0);
  zero.b2.assign(4, 0.0);
  const auto pred = mlp_predict(zero, {0.5, 0.5, 0.5});
  CHECK(pred.label == 0);  // tie resolves to the lowest index
  for (double p : pred.probabilities) CHECK(p == doctest::Approx(0.25));

  SUBCASE("probabilities form a simplex and shifts cancel") {
    Rng rng(31);
    for (int i = 0; i < 20; ++i) {
      MlpModel model = init_mlp(3, 4, 5, rng.next_u64());
      const ConceptVector c = {rng.uniform(), rng.uniform(), rng.uniform()};
      const auto p = mlp_predict(model, c);
      double total = 0.0;
      for (double v : p.probabilities) {
        CHECK(v >= 0.0);
        total += v;
      }
      CHECK(std::fabs(total - 1.0) <= 1e-9);

      MlpModel shifted = model;
      for (double& b : shifted.b2) b += 17.5;
      CHECK(mlp_predict(shifted, c).label == p.label);
    }
  }
  SUBCASE("width mismatch") { CHECK_THROWS(mlp_predict(zero, {0.5})); }
}

TEST_CASE("train_mlp deterministic and epochs=0 returns the init") {
  Rng rng(37);
  const ConceptDataset d = testutil::random_binary_dataset(rng, 30, 5, 3);
  TrainConfig cfg;
  cfg.epochs = 0;
  cfg.hidden_dim = 4;
  cfg.seed = 91;
  CHECK(train_mlp(d, cfg) == init_mlp(5, 4, 3, 91));

  cfg.epochs = 20;
  cfg.learning_rate = 1e-3;
  const MlpModel a = train_mlp(d, cfg);
  const MlpModel b = train_mlp(d, cfg);
  CHECK(a == b);  // bit-for-bit

  cfg.seed = 92;
  CHECK(train_mlp(d, cfg) != a);
}

TEST_CASE("train_mlp separates a linearly separable set") {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    const int y = i % 2;
    std::vector<double> c(4);
    for (std::size_t k = 0; k < 4; ++k) {
      c[k] = y == 1 ? (rng.uniform() * 0.3 + 0.7) : rng.uniform() * 0.3;
    }
    rows.push_back(c);
    labels.push_back(y);
  }
  const ConceptDataset d = make_dataset(rows, labels, 2);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 1e-2;
  cfg.hidden_dim = 8;
  cfg.batch_size = 4;
  cfg.seed = 5;
  const MlpModel model = train_mlp(d, cfg);
  CHECK(accuracy(model, d) == 1.0);
}

TEST_CASE("mlp gradients match finite differences") {
  Rng rng(43);
  for (int instance = 0; instance < 5; ++instance) {
    const std::size_t width = 2 + rng.uniform_index(5);   // <= 6
    const std::size_t hidden = 2 + rng.uniform_index(3);  // <= 4
    const int classes = 2 + static_cast<int>(rng.uniform_index(3));
    MlpModel model = init_mlp(width, hidden, static_cast<std::size_t>(classes), rng.next_u64());

    std::vector<LabeledExample> batch;
    for (int i = 0; i < 6; ++i) {
      LabeledExample ex;
      ex.label = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(classes)));
      for (std::size_t k = 0; k < width; ++k) ex.concepts.push_back(rng.uniform());
      batch.push_back(ex);
    }

    const MlpGradients g = mlp_gradients(model, batch);
    auto loss = [&] { return mlp_loss(model, batch); };
    auto check_block = [&](std::vector<double>& params, const std::vector<double>& analytic) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        CHECK(rel_error(analytic[i], fd_gradient(loss, params[i])) <= 1e-4);
      }
    };
    check_block(model.w1, g.w1);
    check_block(model.b1, g.b1);
    check_block(model.w2, g.w2);
    check_block(model.b2, g.b2);
  }
}

TEST_CASE("accuracy definition") {
  const auto d0 = make_dataset({{0, 0}, {0, 1}}, {0, 0}, 2);
  const auto d1 = make_dataset({{0, 0}, {0, 1}}, {1, 1}, 2);
  MlpModel constant0;  // all zeros predicts class 0 by the tie rule
  constant0.input_dim = 2;
  constant0.hidden_dim = 1;
  constant0.output_dim = 2;
  constant0.w1.assign(2, 0.0);
  constant0.b1.assign(1, 0.0);
  constant0.w2.assign(2, 0.0);
  constant0.b2.assign(2, 0.0);
  CHECK(accuracy(constant0, d0) == 1.0);
  CHECK(accuracy(constant0, d1) == 0.0);
  CHECK(accuracy(constant0, d0) + (1.0 - accuracy(constant0, d0)) == 1.0);
  CHECK_THROWS(accuracy(constant0, ConceptDataset({}, 2, 2)));
}
