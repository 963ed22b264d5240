#ifndef CATLAB_STATS_HPP
#define CATLAB_STATS_HPP

#include <cstdint>
#include <vector>

#include "catlab/concept_data.hpp"
#include "catlab/learner.hpp"
#include "catlab/trigger_select.hpp"

namespace catlab {

struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;
};

struct CredibleInterval {
  double lo = 0.0;
  double hi = 1.0;
  double gamma = 0.05;  // total tail mass
};

// Conjugate update: (alpha + k, beta + N - k).
BetaParams beta_posterior(const BetaParams& prior, long long trials, long long successes);

// Regularized incomplete beta I_x(alpha, beta); absolute error <= 1e-10.
double beta_cdf(const BetaParams& params, double x);

// Equal-tailed interval: endpoints solve beta_cdf = gamma/2 and 1 - gamma/2
// by bisection to 1e-12 in x.
CredibleInterval beta_interval(const BetaParams& params, double gamma);

// Maximum-likelihood Beta fit by damped Newton iterations, initialized from
// the method of moments. Converges when the log-likelihood gradient norm
// drops to 1e-8; at most 512 iterations.
BetaParams beta_mle(const std::vector<double>& samples);

// Per-observation mean log-likelihood; exposed for the ascent check.
double beta_log_likelihood(const BetaParams& params, const std::vector<double>& samples);

BetaParams beta_moments_init(const std::vector<double>& samples);

// Independent per-concept bit flips: the simplest measurable perturbation
// space for binary concepts.
struct PerturbationConfig {
  double flip_rate = 0.0;
  std::size_t n_samples = 10000;
  std::uint64_t seed = 0;
};

struct RobustnessEstimate {
  double r = 0.0;
  double ci_lo = 0.0;  // normal-approximation 95% interval
  double ci_hi = 0.0;
  std::size_t n_samples = 0;
};

// Monte-Carlo estimate of P{f(S(c + trigger)) = y_tc}: draw a row uniformly,
// embed the trigger, flip each concept independently with probability q.
RobustnessEstimate robustness_mc(const MlpModel& model, const ConceptDataset& eval_set,
                                 const TriggerSpec& trigger, int y_tc,
                                 const PerturbationConfig& config);

// Exact value by enumerating all 2^L flip patterns; the Monte-Carlo oracle.
// Requires L <= max_exhaustive_width() unless flip_rate is zero, where the
// only pattern with mass is the identity.
double robustness_exact(const MlpModel& model, const ConceptDataset& eval_set,
                        const TriggerSpec& trigger, int y_tc, double flip_rate);

constexpr std::size_t max_exhaustive_width() { return 12; }

}  // namespace catlab

#endif
