#include <cmath>
#include <limits>

#include "doctest.h"

#include "catlab/rng.hpp"
#include "catlab/trigger_select.hpp"
#include "helpers.hpp"

using namespace catlab;
using testutil::make_dataset;

namespace {

// Independent scoring route for oracle replays: recount from scratch and
// apply the literal formula.
double oracle_z(const ConceptDataset& d, int y_tc, std::size_t concept_index, double op_value,
                bool& supported) {
  std::size_t n_target = 0, n_match = 0, n_both = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& ex = d.example(i);
    if (ex.label == y_tc) ++n_target;
    if (ex.concepts[concept_index] == op_value) {
      ++n_match;
      if (ex.label == y_tc) ++n_both;
    }
  }
  const double p0 = static_cast<double>(n_target) / static_cast<double>(d.size());
  if (n_match == 0) {
    supported = false;
    return -std::numeric_limits<double>::infinity();
  }
  supported = true;
  const double p_cond = static_cast<double>(n_both) / static_cast<double>(n_match);
  return (p_cond - p0) / (p0 * (1.0 - p0) / p_cond);
}

ConceptDataset hand_example() {
  // n=10, 2 target rows (p0 = 0.2); concept 3 holds value 1 in 4 rows, 2 of
  // them target (p_cond = 0.5).
  std::vector<std::vector<double>> rows = {{0, 0, 0, 1}, {0, 1, 0, 1}, {1, 0, 0, 1}, {0, 0, 1, 1},
                                           {0, 0, 0, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 1, 0},
                                           {0, 1, 0, 0}, {1, 0, 0, 0}};
  std::vector<int> labels = {1, 1, 0, 0, 0, 0, 0, 0, 0, 0};
  return make_dataset(rows, labels, 2);
}

}  // namespace

TEST_CASE("zscore matches the hand-counted example") {
  const ConceptDataset d = hand_example();
  const ZScoreRecord rec = zscore(d, 1, 3, 1.0);
  CHECK(rec.supported);
  CHECK(rec.p0 == doctest::Approx(0.2));
  CHECK(rec.p_cond == doctest::Approx(0.5));
  CHECK(rec.z == doctest::Approx(0.9375).epsilon(1e-12));
}

TEST_CASE("zscore edge cases") {
  SUBCASE("p_cond equal to p0 gives zero") {
    // every row has concept 0 = 1, so the conditional equals the prior
    const auto d = make_dataset({{1, 0}, {1, 0}, {1, 1}, {1, 1}}, {1, 0, 1, 0}, 2);
    CHECK(zscore(d, 1, 0, 1.0).z == 0.0);
  }
  SUBCASE("value never present is unsupported") {
    const auto d = make_dataset({{1, 0}, {1, 1}}, {1, 0}, 2);
    const ZScoreRecord rec = zscore(d, 1, 0, 0.0);
    CHECK_FALSE(rec.supported);
    CHECK(std::isinf(rec.z));
    CHECK(rec.z < 0.0);
  }
  SUBCASE("degenerate target distribution") {
    const auto d = make_dataset({{1, 0}, {1, 1}}, {1, 1}, 2);
    CHECK_THROWS(zscore(d, 1, 0, 1.0));  // p0 = 1
    CHECK_THROWS(zscore(d, 0, 0, 1.0));  // p0 = 0
  }
  SUBCASE("strictly increasing in p_cond above p0 for shared p0") {
    // direct check of the closed form
    const double p0 = 0.3;
    double previous = 0.0;
    for (double p_cond = 0.35; p_cond <= 1.0; p_cond += 0.05) {
      const double z = (p_cond - p0) / (p0 * (1.0 - p0) / p_cond);
      CHECK(z > previous);
      previous = z;
    }
  }
}

TEST_CASE("catplus_trigger greedy selection replays the oracle") {
  Rng rng(101);
  for (int round = 0; round < 50; ++round) {
    const std::size_t n = 8 + rng.uniform_index(33);      // <= 40
    const std::size_t width = 2 + rng.uniform_index(7);   // <= 8
    const ConceptDataset d = testutil::random_binary_dataset(rng, n, width, 2);
    const std::size_t trigger_size = 1 + rng.uniform_index(std::min<std::size_t>(width, 3));

    const CatPlusResult got = catplus_trigger(d, 1, trigger_size);
    CHECK(got.trigger.indices.size() == trigger_size);
    CHECK(got.trace.size() == trigger_size);

    // Independent greedy replay with the literal formula.
    std::vector<LabeledExample> working(d.examples().begin(), d.examples().end());
    std::vector<bool> used(width, false);
    for (std::size_t step = 0; step < trigger_size; ++step) {
      const ConceptDataset view(working, width, 2);
      double best_z = 0.0;
      std::size_t best_k = width;
      double best_v = 0.0;
      for (std::size_t k = 0; k < width; ++k) {
        if (used[k]) continue;
        for (double v : {0.0, 1.0}) {
          bool supported = false;
          const double z = oracle_z(view, 1, k, v, supported);
          if (!supported) continue;
          if (best_k == width || z > best_z) {
            best_z = z;
            best_k = k;
            best_v = v;
          }
        }
      }
      REQUIRE(best_k != width);
      CHECK(got.trigger.indices[step] == best_k);
      CHECK(got.trigger.values[step] == best_v);
      CHECK(got.trace[step].z == best_z);  // exact: same literal formula
      used[best_k] = true;
      for (auto& ex : working) ex.concepts[best_k] = best_v;
    }
  }
}

TEST_CASE("catplus_trigger basics") {
  const ConceptDataset d = hand_example();
  SUBCASE("size one selects the global argmax") {
    const CatPlusResult result = catplus_trigger(d, 1, 1);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    double best_v = 0.0;
    for (std::size_t k = 0; k < d.concept_count(); ++k) {
      for (double v : {0.0, 1.0}) {
        bool s = false;
        const double z = oracle_z(d, 1, k, v, s);
        if (s && z > best) {
          best = z;
          best_k = k;
          best_v = v;
        }
      }
    }
    CHECK(result.trigger.indices[0] == best_k);
    CHECK(result.trigger.values[0] == best_v);
  }
  SUBCASE("indices are never repeated") {
    const CatPlusResult result = catplus_trigger(d, 1, 4);
    std::vector<bool> seen(4, false);
    for (std::size_t k : result.trigger.indices) {
      CHECK_FALSE(seen[k]);
      seen[k] = true;
    }
  }
  SUBCASE("input dataset is untouched") {
    const ConceptDataset copy = d;
    (void)catplus_trigger(d, 1, 3);
    CHECK(d == copy);
  }
}

TEST_CASE("attack_pattern follows polarity") {
  SparsityProfile positive{0.8, Polarity::Positive};
  CHECK(attack_pattern(positive, 3) == std::vector<double>{0.0, 0.0, 0.0});
  SparsityProfile negative{0.2, Polarity::Negative};
  CHECK(attack_pattern(negative, 2) == std::vector<double>{1.0, 1.0});
  SparsityProfile boundary{0.5, Polarity::Positive};
  CHECK(attack_pattern(boundary, 1) == std::vector<double>{0.0});
  CHECK_THROWS(attack_pattern(positive, 0));
}

TEST_CASE("concept_filter picks the planted irrelevant concepts") {
  SynthConfig cfg;
  cfg.n_classes = 2;
  cfg.n_samples = 400;
  cfg.concept_count = 10;
  cfg.n_irrelevant = 2;
  cfg.flip_noise = 0.05;
  cfg.seed = 71;
  const ConceptDataset d = synth_generate(cfg);
  const auto filter_cfg = TrainConfig::logistic_filter_defaults();

  const auto picked = concept_filter(d, 0, 2, filter_cfg);
  std::vector<std::size_t> sorted = picked;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<std::size_t>{8, 9});

  SUBCASE("trigger_size = L returns every index ordered by magnitude") {
    const auto all = concept_filter(d, 0, 10, filter_cfg);
    CHECK(all.size() == 10);
    const ConceptDataset cache = build_cache_subset(d, 0, filter_cfg.seed);
    const LogisticModel filter = fit_logistic(cache, filter_cfg);
    for (std::size_t i = 1; i < all.size(); ++i) {
      CHECK(std::fabs(filter.weights[all[i - 1]]) <= std::fabs(filter.weights[all[i]]));
    }
  }
  SUBCASE("deterministic per seed") {
    CHECK(concept_filter(d, 0, 4, filter_cfg) == concept_filter(d, 0, 4, filter_cfg));
  }
}

TEST_CASE("concept_filter breaks ties between identical columns by index") {
  // concepts 1 and 2 byte-identical; concept 0 carries the label
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  Rng rng(7);
  for (int i = 0; i < 60; ++i) {
    const int y = i % 2;
    const double noise = rng.bernoulli(0.5) ? 1.0 : 0.0;
    rows.push_back({static_cast<double>(y), noise, noise});
    labels.push_back(y);
  }
  const ConceptDataset d = make_dataset(rows, labels, 2);
  const auto picked = concept_filter(d, 1, 2, TrainConfig::logistic_filter_defaults());
  CHECK(picked == std::vector<std::size_t>{1, 2});
}

TEST_CASE("cat_trigger composes filter and pattern") {
  SynthConfig cfg;
  cfg.n_classes = 2;
  cfg.n_samples = 300;
  cfg.concept_count = 8;
  cfg.n_irrelevant = 2;
  cfg.flip_noise = 0.02;
  cfg.seed = 11;
  const ConceptDataset d = synth_generate(cfg);
  const TriggerSpec spec = cat_trigger(d, 0, 3, TrainConfig::logistic_filter_defaults());
  CHECK(spec.indices.size() == 3);
  CHECK(spec.values.size() == 3);
  validate_trigger(spec, d.concept_count());

  const SparsityProfile profile = sparsity_profile(d);
  const double expected = profile.polarity == Polarity::Positive ? 0.0 : 1.0;
  for (double v : spec.values) CHECK(v == expected);

  SUBCASE("singleton trigger") {
    CHECK(cat_trigger(d, 0, 1, TrainConfig::logistic_filter_defaults()).indices.size() == 1);
  }
}

TEST_CASE("zscore_continuous weighting") {
  const ConceptDataset d = hand_example();
  const double base = zscore(d, 1, 3, 1.0).z;
  SUBCASE("binary value set reduces to the base score") {
    CHECK(zscore_continuous(d, 1, 3, 1.0, {0.0, 1.0}) == doctest::Approx(base).epsilon(1e-15));
  }
  SUBCASE("singleton value set scores zero") {
    CHECK(zscore_continuous(d, 1, 3, 1.0, {1.0}) == 0.0);
  }
  SUBCASE("squared distances accumulate") {
    CHECK(zscore_continuous(d, 1, 3, 1.0, {0.0, 0.5, 1.0}) ==
          doctest::Approx(1.25 * base).epsilon(1e-15));
  }
}

TEST_CASE("information_gain entropy arithmetic") {
  SUBCASE("perfect predictor has ratio one") {
    const auto d = make_dataset({{1, 0}, {1, 1}, {0, 0}, {0, 1}}, {1, 1, 0, 0}, 2);
    const InformationGain ig = information_gain(d, 1, 0, 1.0);
    CHECK(ig.gain_bits == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ig.ratio == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("independent concept has zero gain") {
    const auto d = make_dataset({{1, 0}, {0, 0}, {1, 1}, {0, 1}}, {1, 1, 0, 0}, 2);
    const InformationGain ig = information_gain(d, 1, 0, 1.0);
    CHECK(ig.gain_bits == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("ten-row table matches direct entropy arithmetic") {
    const ConceptDataset d = hand_example();
    const InformationGain ig = information_gain(d, 1, 3, 1.0);
    // branch c3==1: 4 rows, 2 targets; branch c3!=1: 6 rows, 0 targets
    auto h = [](double p) {
      if (p <= 0.0 || p >= 1.0) return 0.0;
      return -(p * std::log2(p) + (1 - p) * std::log2(1 - p));
    };
    const double expected = h(0.2) - (0.4 * h(0.5) + 0.6 * h(0.0));
    CHECK(ig.gain_bits == doctest::Approx(expected).epsilon(1e-12));
    CHECK(ig.ratio == doctest::Approx(expected / h(0.2)).epsilon(1e-12));
  }
  SUBCASE("degenerate target distribution") {
    const auto d = make_dataset({{1, 0}, {0, 1}}, {0, 0}, 2);
    CHECK_THROWS(information_gain(d, 0, 0, 1.0));
  }
}

TEST_CASE("z respects information-gain ordering above p0") {
  // Shared p0, both conditionals above it: higher gain ratio pairs with
  // higher p_cond, and z is increasing in p_cond.
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  // 20 rows, 10 targets. concept 0: value 1 in 10 rows of which 9 target.
  // concept 1: value 1 in 10 rows of which 7 target.
  for (int i = 0; i < 20; ++i) {
    const int y = i < 10 ? 1 : 0;
    const double c0 = (i < 9 || i == 10) ? 1.0 : 0.0;
    const double c1 = (i < 7 || (i >= 10 && i < 13)) ? 1.0 : 0.0;
    rows.push_back({c0, c1});
    labels.push_back(y);
  }
  const ConceptDataset d = make_dataset(rows, labels, 2);
  const ZScoreRecord a = zscore(d, 1, 0, 1.0);
  const ZScoreRecord b = zscore(d, 1, 1, 1.0);
  const InformationGain ga = information_gain(d, 1, 0, 1.0);
  const InformationGain gb = information_gain(d, 1, 1, 1.0);
  CHECK(a.p_cond > b.p_cond);
  CHECK(b.p_cond > a.p0);
  CHECK(ga.ratio > gb.ratio);
  CHECK(a.z > b.z);
}
