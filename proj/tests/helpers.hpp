#ifndef CATLAB_TESTS_HELPERS_HPP
#define CATLAB_TESTS_HELPERS_HPP

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "catlab/concept_data.hpp"
#include "catlab/rng.hpp"

namespace testutil {

// Scratch directory removed when the test ends.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() / ("catlab_test_" + tag);
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline double normal_draw(catlab::Rng& rng) {
  double u1;
  do {
    u1 = rng.uniform();
  } while (u1 == 0.0);
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Marsaglia-Tsang; boosted below shape 1.
inline double gamma_draw(catlab::Rng& rng, double shape) {
  if (shape < 1.0) {
    const double u = rng.uniform();
    return gamma_draw(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = normal_draw(rng);
    const double v = (1.0 + c * x) * (1.0 + c * x) * (1.0 + c * x);
    if (v <= 0.0) continue;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

inline double beta_draw(catlab::Rng& rng, double alpha, double beta) {
  const double g1 = gamma_draw(rng, alpha);
  const double g2 = gamma_draw(rng, beta);
  return g1 / (g1 + g2);
}

// Small hand-rolled binary dataset builder for table-style fixtures.
inline catlab::ConceptDataset make_dataset(const std::vector<std::vector<double>>& rows,
                                           const std::vector<int>& labels, int n_classes) {
  std::vector<catlab::LabeledExample> examples;
  for (std::size_t i = 0; i < rows.size(); ++i) examples.push_back({rows[i], labels[i]});
  return catlab::ConceptDataset(std::move(examples), rows.front().size(), n_classes);
}

// Uniform random binary dataset with at least one target and one non-target row.
inline catlab::ConceptDataset random_binary_dataset(catlab::Rng& rng, std::size_t n,
                                                    std::size_t width, int n_classes) {
  std::vector<catlab::LabeledExample> examples;
  for (std::size_t i = 0; i < n; ++i) {
    catlab::LabeledExample ex;
    ex.label = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n_classes)));
    if (i == 0) ex.label = 0;
    if (i == 1) ex.label = 1;
    ex.concepts.resize(width);
    for (double& v : ex.concepts) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
    examples.push_back(std::move(ex));
  }
  return catlab::ConceptDataset(std::move(examples), width, n_classes);
}

}  // namespace testutil

#endif
