#include "catlab/concept_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "catlab/numeric.hpp"
#include "catlab/rng.hpp"
#include "json.hpp"

namespace catlab {

using nlohmann::json;

ConceptDataset::ConceptDataset(std::vector<LabeledExample> examples, std::size_t concept_count,
                               int n_classes, std::vector<std::string> concept_names)
    : examples_(std::move(examples)),
      concept_count_(concept_count),
      n_classes_(n_classes),
      concept_names_(std::move(concept_names)) {
  if (n_classes_ < 2) throw std::invalid_argument("ConceptDataset: need at least 2 classes");
  if (!concept_names_.empty() && concept_names_.size() != concept_count_) {
    throw std::invalid_argument("ConceptDataset: concept_names length must equal concept count");
  }
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const auto& ex = examples_[i];
    if (ex.concepts.size() != concept_count_) {
      throw std::invalid_argument("ConceptDataset: example " + std::to_string(i) +
                                  " has wrong concept count");
    }
    for (std::size_t k = 0; k < ex.concepts.size(); ++k) {
      const double v = ex.concepts[k];
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw std::invalid_argument("ConceptDataset: concept value out of [0,1] at example " +
                                    std::to_string(i) + ", concept " + std::to_string(k));
      }
    }
    if (ex.label < 0 || ex.label >= n_classes_) {
      throw std::invalid_argument("ConceptDataset: label out of range at example " +
                                  std::to_string(i));
    }
  }
}

std::vector<std::size_t> ConceptDataset::label_histogram() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes_), 0);
  for (const auto& ex : examples_) counts[static_cast<std::size_t>(ex.label)]++;
  return counts;
}

bool ConceptDataset::is_binary() const {
  for (const auto& ex : examples_) {
    for (double v : ex.concepts) {
      if (v != 0.0 && v != 1.0) return false;
    }
  }
  return true;
}

std::string meta_path_for(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  if (p.extension() == ".csv") p.replace_extension();
  return p.string() + ".meta.json";
}

namespace {

std::string format_cell(double v) {
  if (v == 0.0) return "0";
  if (v == 1.0) return "1";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t row, const std::string& what) {
  throw std::runtime_error(path + ": row " + std::to_string(row) + ": " + what);
}

}  // namespace

ConceptDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file, header expected");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  // Header must be concept_0,...,concept_{L-1},label in order.
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header.back() != "label") {
    throw std::runtime_error(path + ": malformed header, expected concept_0,...,label");
  }
  const std::size_t concept_count = header.size() - 1;
  for (std::size_t k = 0; k < concept_count; ++k) {
    if (header[k] != "concept_" + std::to_string(k)) {
      throw std::runtime_error(path + ": malformed header at column " + std::to_string(k) +
                               " (expected concept_" + std::to_string(k) + ", got " + header[k] + ")");
    }
  }

  std::vector<LabeledExample> examples;
  int max_label = -1;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    LabeledExample ex;
    ex.concepts.reserve(concept_count);
    for (std::size_t k = 0; k < concept_count; ++k) {
      if (!std::getline(ss, cell, ',')) parse_fail(path, row, "ragged row, missing concept_" + std::to_string(k));
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        parse_fail(path, row, "column concept_" + std::to_string(k) + ": not a number: '" + cell + "'");
      }
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        parse_fail(path, row, "column concept_" + std::to_string(k) + ": value " + cell + " outside [0,1]");
      }
      ex.concepts.push_back(v);
    }
    if (!std::getline(ss, cell, ',')) parse_fail(path, row, "ragged row, missing label");
    char* end = nullptr;
    const long lab = std::strtol(cell.c_str(), &end, 10);
    if (end == cell.c_str() || *end != '\0' || lab < 0) {
      parse_fail(path, row, "column label: not a non-negative integer: '" + cell + "'");
    }
    if (std::getline(ss, cell, ',')) parse_fail(path, row, "ragged row, extra cell '" + cell + "'");
    ex.label = static_cast<int>(lab);
    max_label = std::max(max_label, ex.label);
    examples.push_back(std::move(ex));
  }

  int n_classes = std::max(max_label + 1, 2);
  std::vector<std::string> names;

  // The sidecar, when present, restores class count and concept names that the
  // CSV alone cannot carry (e.g. classes with no rows).
  const std::string meta = meta_path_for(path);
  if (std::filesystem::exists(meta)) {
    std::ifstream min(meta);
    json j;
    min >> j;
    if (j.contains("n_classes")) n_classes = std::max(n_classes, j["n_classes"].get<int>());
    if (j.contains("concept_names") && !j["concept_names"].is_null()) {
      names = j["concept_names"].get<std::vector<std::string>>();
    }
  }

  return ConceptDataset(std::move(examples), concept_count, n_classes, std::move(names));
}

void save_csv(const ConceptDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_csv: cannot open " + path + " for writing");
  for (std::size_t k = 0; k < dataset.concept_count(); ++k) out << "concept_" << k << ",";
  out << "label\n";
  for (const auto& ex : dataset.examples()) {
    for (double v : ex.concepts) out << format_cell(v) << ",";
    out << ex.label << "\n";
  }
  if (!out) throw std::runtime_error("save_csv: write failed for " + path);

  json meta;
  meta["L"] = dataset.concept_count();
  meta["n_classes"] = dataset.class_count();
  if (dataset.concept_names().empty()) {
    meta["concept_names"] = nullptr;
  } else {
    meta["concept_names"] = dataset.concept_names();
  }
  std::vector<std::size_t> irr = irrelevant_concepts(dataset);
  meta["irrelevant_concepts"] = irr;
  std::ofstream mout(meta_path_for(path));
  if (!mout) throw std::runtime_error("save_csv: cannot open sidecar for " + path);
  mout << meta.dump(2) << "\n";
}

std::pair<ConceptDataset, ConceptDataset> split(const ConceptDataset& dataset,
                                                double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("split: train_fraction must be in (0,1)");
  }
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  const auto cut = static_cast<std::size_t>(
      std::clamp<long long>(round_half_up(train_fraction * static_cast<double>(dataset.size())),
                            0, static_cast<long long>(dataset.size())));
  std::vector<LabeledExample> train_rows, test_rows;
  train_rows.reserve(cut);
  test_rows.reserve(dataset.size() - cut);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < cut ? train_rows : test_rows).push_back(dataset.example(order[i]));
  }
  return {ConceptDataset(std::move(train_rows), dataset.concept_count(), dataset.class_count(),
                         dataset.concept_names()),
          ConceptDataset(std::move(test_rows), dataset.concept_count(), dataset.class_count(),
                         dataset.concept_names())};
}

ConceptDataset subset_by_label(const ConceptDataset& dataset, int y_tc) {
  if (y_tc < 0 || y_tc >= dataset.class_count()) {
    throw std::invalid_argument("subset_by_label: label out of range");
  }
  std::vector<LabeledExample> rows;
  for (const auto& ex : dataset.examples()) {
    if (ex.label == y_tc) rows.push_back(ex);
  }
  return ConceptDataset(std::move(rows), dataset.concept_count(), dataset.class_count(),
                        dataset.concept_names());
}

ConceptDataset build_cache_subset(const ConceptDataset& dataset, int y_tc, std::uint64_t seed) {
  if (y_tc < 0 || y_tc >= dataset.class_count()) {
    throw std::invalid_argument("build_cache_subset: label out of range");
  }
  std::vector<std::size_t> target_idx, other_idx;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (dataset.example(i).label == y_tc ? target_idx : other_idx).push_back(i);
  }
  if (other_idx.size() < target_idx.size()) {
    throw std::invalid_argument("build_cache_subset: need at least " +
                                std::to_string(target_idx.size()) + " non-target examples, have " +
                                std::to_string(other_idx.size()));
  }
  Rng rng(seed);
  const auto picks = rng.sample_without_replacement(other_idx.size(), target_idx.size());

  std::vector<LabeledExample> rows;
  rows.reserve(2 * target_idx.size());
  for (std::size_t i : target_idx) rows.push_back({dataset.example(i).concepts, 1});
  for (std::size_t p : picks) rows.push_back({dataset.example(other_idx[p]).concepts, 0});
  return ConceptDataset(std::move(rows), dataset.concept_count(), 2, dataset.concept_names());
}

SparsityProfile sparsity_profile(const ConceptDataset& dataset) {
  if (dataset.size() == 0) throw std::invalid_argument("sparsity_profile: empty dataset");
  double total = 0.0;
  for (const auto& ex : dataset.examples()) {
    for (double v : ex.concepts) total += v;
  }
  SparsityProfile profile;
  profile.positive_fraction =
      total / (static_cast<double>(dataset.size()) * static_cast<double>(dataset.concept_count()));
  profile.polarity = profile.positive_fraction >= 0.5 ? Polarity::Positive : Polarity::Negative;
  return profile;
}

ConceptDataset synth_generate(const SynthConfig& config) {
  if (config.n_classes < 2) throw std::invalid_argument("synth_generate: need >= 2 classes");
  if (config.n_irrelevant >= config.concept_count) {
    throw std::invalid_argument("synth_generate: n_irrelevant must be < concept count");
  }
  if (!(config.flip_noise >= 0.0 && config.flip_noise < 0.5)) {
    throw std::invalid_argument("synth_generate: flip_noise must be in [0, 0.5)");
  }
  const std::size_t informative = config.concept_count - config.n_irrelevant;
  Rng rng(config.seed);

  // Class prototypes. A column on which every class agrees would be just as
  // label-independent as a planted coin, so such columns are redrawn: the
  // planted concepts must be the only irrelevant ones.
  std::vector<std::vector<double>> prototypes(static_cast<std::size_t>(config.n_classes),
                                              std::vector<double>(informative, 0.0));
  for (std::size_t k = 0; k < informative; ++k) {
    for (;;) {
      bool all_same = true;
      for (std::size_t c = 0; c < prototypes.size(); ++c) {
        prototypes[c][k] = rng.bernoulli(0.5) ? 1.0 : 0.0;
        if (prototypes[c][k] != prototypes[0][k]) all_same = false;
      }
      if (!all_same) break;
    }
  }

  std::vector<LabeledExample> rows;
  rows.reserve(config.n_samples);
  for (std::size_t i = 0; i < config.n_samples; ++i) {
    const int label = static_cast<int>(i % static_cast<std::size_t>(config.n_classes));
    LabeledExample ex;
    ex.label = label;
    ex.concepts.resize(config.concept_count);
    const auto& proto = prototypes[static_cast<std::size_t>(label)];
    for (std::size_t k = 0; k < informative; ++k) {
      const bool flip = config.flip_noise > 0.0 && rng.bernoulli(config.flip_noise);
      ex.concepts[k] = flip ? 1.0 - proto[k] : proto[k];
    }
    for (std::size_t k = informative; k < config.concept_count; ++k) {
      ex.concepts[k] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
    rows.push_back(std::move(ex));
  }

  std::vector<std::string> names(config.concept_count);
  for (std::size_t k = 0; k < config.concept_count; ++k) {
    names[k] = "concept_" + std::to_string(k) + (k >= informative ? "_irrelevant" : "");
  }
  return ConceptDataset(std::move(rows), config.concept_count, config.n_classes, std::move(names));
}

std::vector<std::size_t> irrelevant_concepts(const ConceptDataset& dataset) {
  std::vector<std::size_t> out;
  const auto& names = dataset.concept_names();
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k].ends_with("_irrelevant")) out.push_back(k);
  }
  return out;
}

ConceptDataset impute_attributes(const std::vector<std::vector<double>>& class_means,
                                 std::size_t n_samples_per_class, std::uint64_t seed) {
  if (class_means.size() < 2) throw std::invalid_argument("impute_attributes: need >= 2 classes");
  const std::size_t concept_count = class_means.front().size();
  if (concept_count == 0) throw std::invalid_argument("impute_attributes: empty mean vectors");
  for (const auto& means : class_means) {
    if (means.size() != concept_count) {
      throw std::invalid_argument("impute_attributes: ragged class means");
    }
    for (double m : means) {
      if (!(m >= 0.0 && m <= 1.0)) {
        throw std::invalid_argument("impute_attributes: mean outside [0,1]");
      }
    }
  }
  Rng rng(seed);
  std::vector<LabeledExample> rows;
  rows.reserve(class_means.size() * n_samples_per_class);
  for (std::size_t c = 0; c < class_means.size(); ++c) {
    for (std::size_t s = 0; s < n_samples_per_class; ++s) {
      LabeledExample ex;
      ex.label = static_cast<int>(c);
      ex.concepts.resize(concept_count);
      for (std::size_t k = 0; k < concept_count; ++k) {
        // Literal indicator rule: 1 iff a uniform draw lands below the mean.
        ex.concepts[k] = rng.uniform() < class_means[c][k] ? 1.0 : 0.0;
      }
      rows.push_back(std::move(ex));
    }
  }
  return ConceptDataset(std::move(rows), concept_count, static_cast<int>(class_means.size()));
}

}  // namespace catlab
