#ifndef CATLAB_NUMERIC_HPP
#define CATLAB_NUMERIC_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace catlab {

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double softplus(double z) {
  return std::fmax(z, 0.0) + std::log1p(std::exp(-std::fabs(z)));
}

// Stable softmax via max subtraction; output sums to 1 for any finite logits.
inline std::vector<double> softmax(std::span<const double> logits) {
  double m = logits[0];
  for (double v : logits) m = std::fmax(m, v);
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

inline double log_sum_exp(std::span<const double> values) {
  double m = values[0];
  for (double v : values) m = std::fmax(m, v);
  double total = 0.0;
  for (double v : values) total += std::exp(v - m);
  return m + std::log(total);
}

// |D_adv| = round(p * n) with halves rounding up.
inline long long round_half_up(double x) {
  return static_cast<long long>(std::floor(x + 0.5));
}

// Shewchuk-style exact accumulator: the rounded total is independent of the
// order in which values were added, which makes full-batch gradients
// invariant under permutations of the training set.
class ExactSum {
 public:
  void add(double value) {
    std::size_t used = 0;
    for (double partial : partials_) {
      if (std::fabs(value) < std::fabs(partial)) std::swap(value, partial);
      const double high = value + partial;
      const double low = partial - (high - value);
      if (low != 0.0) partials_[used++] = low;
      value = high;
    }
    partials_.resize(used);
    partials_.push_back(value);
  }

  // Correctly-rounded total (same scheme as Python's math.fsum, including
  // the half-ulp correction), so the result depends only on the multiset of
  // added values.
  double total() const {
    std::size_t n = partials_.size();
    if (n == 0) return 0.0;
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = partials_[--n];
      hi = x + y;
      const double yr = hi - x;
      lo = y - yr;
      if (lo != 0.0) break;
    }
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      if (y == x - hi) hi = x;
    }
    return hi;
  }

  void reset() { partials_.clear(); }

 private:
  std::vector<double> partials_;
};

// Binary entropy in bits; H(0) = H(1) = 0.
inline double binary_entropy_bits(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

}  // namespace catlab

#endif
