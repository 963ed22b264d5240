#ifndef CATLAB_CONCEPT_DATA_HPP
#define CATLAB_CONCEPT_DATA_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace catlab {

// A concept vector is a length-L activation pattern with entries in [0, 1];
// the default regime is binary {0, 1} and continuous values are the CAT+
// extension, so there is a single floating-point representation throughout.
using ConceptVector = std::vector<double>;

struct LabeledExample {
  ConceptVector concepts;
  int label = 0;

  bool operator==(const LabeledExample&) const = default;
};

enum class Polarity { Positive, Negative };

struct SparsityProfile {
  double positive_fraction = 0.0;
  Polarity polarity = Polarity::Negative;
};

struct SynthConfig {
  int n_classes = 2;
  std::size_t n_samples = 100;
  std::size_t concept_count = 8;
  std::size_t n_irrelevant = 0;
  double flip_noise = 0.0;
  std::uint64_t seed = 0;
};

// Immutable labeled dataset of fixed-width concept vectors.
class ConceptDataset {
 public:
  // Validates: uniform width, values finite in [0,1], labels in [0, n_classes),
  // n_classes >= 2, and (when given) one name per concept.
  ConceptDataset(std::vector<LabeledExample> examples, std::size_t concept_count, int n_classes,
                 std::vector<std::string> concept_names = {});

  std::size_t size() const { return examples_.size(); }
  std::size_t concept_count() const { return concept_count_; }
  int class_count() const { return n_classes_; }
  const std::vector<LabeledExample>& examples() const { return examples_; }
  const LabeledExample& example(std::size_t i) const { return examples_.at(i); }
  const std::vector<std::string>& concept_names() const { return concept_names_; }

  std::vector<std::size_t> label_histogram() const;
  bool is_binary() const;

  bool operator==(const ConceptDataset&) const = default;

 private:
  std::vector<LabeledExample> examples_;
  std::size_t concept_count_;
  int n_classes_;
  std::vector<std::string> concept_names_;
};

// CSV interchange. Header contract: concept_0,...,concept_{L-1},label.
// Binary cells are written as 0/1, continuous cells with six decimals.
// A sidecar <name>.meta.json carries class count and concept names so a
// save/load round trip reproduces the dataset exactly.
ConceptDataset load_csv(const std::string& path);
void save_csv(const ConceptDataset& dataset, const std::string& path);

// Path of the metadata sidecar for a dataset CSV path.
std::string meta_path_for(const std::string& csv_path);

// Shuffle then cut: returns (train, test), disjoint and exhaustive.
std::pair<ConceptDataset, ConceptDataset> split(const ConceptDataset& dataset,
                                                double train_fraction, std::uint64_t seed);

// All examples with the given label, original order preserved.
ConceptDataset subset_by_label(const ConceptDataset& dataset, int y_tc);

// D_cache = D_tc plus an equally sized uniform sample of non-target rows,
// relabeled to the binary task (1 = target class).
ConceptDataset build_cache_subset(const ConceptDataset& dataset, int y_tc, std::uint64_t seed);

SparsityProfile sparsity_profile(const ConceptDataset& dataset);

// Class-prototype generator with planted label-independent coin-flip
// concepts in the last n_irrelevant positions; their names carry an
// "_irrelevant" suffix.
ConceptDataset synth_generate(const SynthConfig& config);

// Indices whose names mark them as planted irrelevant concepts.
std::vector<std::size_t> irrelevant_concepts(const ConceptDataset& dataset);

// Samples binary concepts from per-class activation means:
// value = 1 iff a uniform draw falls below the class mean.
ConceptDataset impute_attributes(const std::vector<std::vector<double>>& class_means,
                                 std::size_t n_samples_per_class, std::uint64_t seed);

}  // namespace catlab

#endif
