#include "catlab/stats.hpp"

#include <cmath>
#include <stdexcept>

#include "catlab/numeric.hpp"
#include "catlab/parallel.hpp"
#include "catlab/poison.hpp"
#include "catlab/rng.hpp"
#include "catlab/special_functions.hpp"

namespace catlab {

namespace {

void check_params(const BetaParams& p, const char* who) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0)) {
    throw std::invalid_argument(std::string(who) + ": alpha and beta must be positive");
  }
}

}  // namespace

BetaParams beta_posterior(const BetaParams& prior, long long trials, long long successes) {
  check_params(prior, "beta_posterior");
  if (trials < 0 || successes < 0 || successes > trials) {
    throw std::invalid_argument("beta_posterior: need 0 <= successes <= trials");
  }
  return {prior.alpha + static_cast<double>(successes),
          prior.beta + static_cast<double>(trials - successes)};
}

double beta_cdf(const BetaParams& params, double x) {
  check_params(params, "beta_cdf");
  return incomplete_beta(params.alpha, params.beta, x);
}

namespace {

double beta_quantile(const BetaParams& params, double p) {
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 100 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (beta_cdf(params, mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

CredibleInterval beta_interval(const BetaParams& params, double gamma) {
  check_params(params, "beta_interval");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("beta_interval: gamma must be in (0,1)");
  }
  CredibleInterval interval;
  interval.gamma = gamma;
  interval.lo = beta_quantile(params, gamma / 2.0);
  interval.hi = beta_quantile(params, 1.0 - gamma / 2.0);
  return interval;
}

double beta_log_likelihood(const BetaParams& params, const std::vector<double>& samples) {
  check_params(params, "beta_log_likelihood");
  ExactSum acc;
  for (double t : samples) {
    acc.add((params.alpha - 1.0) * std::log(t) + (params.beta - 1.0) * std::log1p(-t));
  }
  return acc.total() / static_cast<double>(samples.size()) - log_beta(params.alpha, params.beta);
}

BetaParams beta_moments_init(const std::vector<double>& samples) {
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double t : samples) mean += t;
  mean /= n;
  double var = 0.0;
  for (double t : samples) var += (t - mean) * (t - mean);
  var /= n;
  if (var <= 0.0 || var >= mean * (1.0 - mean)) {
    // Moments outside the Beta-feasible region; fall back to the flat prior.
    return {1.0, 1.0};
  }
  const double common = mean * (1.0 - mean) / var - 1.0;
  return {mean * common, (1.0 - mean) * common};
}

BetaParams beta_mle(const std::vector<double>& samples) {
  if (samples.size() < 2) throw std::invalid_argument("beta_mle: need at least 2 samples");
  for (double t : samples) {
    if (!(t > 0.0 && t < 1.0)) {
      throw std::invalid_argument("beta_mle: samples must lie strictly inside (0,1)");
    }
  }
  const double n = static_cast<double>(samples.size());
  ExactSum s_log, s_log1m;
  for (double t : samples) {
    s_log.add(std::log(t));
    s_log1m.add(std::log1p(-t));
  }
  const double mean_log = s_log.total() / n;
  const double mean_log1m = s_log1m.total() / n;

  BetaParams params = beta_moments_init(samples);
  double ll = beta_log_likelihood(params, samples);

  constexpr double kTol = 1e-8;
  constexpr int kMaxIter = 512;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const double psi_ab = digamma(params.alpha + params.beta);
    const double ga = mean_log - (digamma(params.alpha) - psi_ab);
    const double gb = mean_log1m - (digamma(params.beta) - psi_ab);
    // Convergence is judged on the sum-form log-likelihood gradient.
    if (n * std::hypot(ga, gb) <= kTol) return params;

    // Hessian of the mean log-likelihood.
    const double tri_ab = trigamma(params.alpha + params.beta);
    const double haa = -(trigamma(params.alpha) - tri_ab);
    const double hbb = -(trigamma(params.beta) - tri_ab);
    const double hab = tri_ab;
    const double det = haa * hbb - hab * hab;
    if (det == 0.0) throw std::runtime_error("beta_mle: singular Hessian");
    double da = -(hbb * ga - hab * gb) / det;
    double db = -(haa * gb - hab * ga) / det;

    // Damp the step until it stays in the domain and does not lose likelihood.
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      const BetaParams trial{params.alpha + step * da, params.beta + step * db};
      if (trial.alpha > 0.0 && trial.beta > 0.0) {
        const double trial_ll = beta_log_likelihood(trial, samples);
        if (trial_ll >= ll - 1e-12) {
          params = trial;
          ll = trial_ll;
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) throw std::runtime_error("beta_mle: line search failed");
  }
  throw std::runtime_error("beta_mle: no convergence after 512 iterations");
}

RobustnessEstimate robustness_mc(const MlpModel& model, const ConceptDataset& eval_set,
                                 const TriggerSpec& trigger, int y_tc,
                                 const PerturbationConfig& config) {
  if (eval_set.size() == 0) throw std::invalid_argument("robustness_mc: empty dataset");
  if (!(config.flip_rate >= 0.0 && config.flip_rate <= 1.0)) {
    throw std::invalid_argument("robustness_mc: flip rate must be in [0,1]");
  }
  if (config.n_samples == 0) throw std::invalid_argument("robustness_mc: need n_samples >= 1");
  validate_trigger(trigger, eval_set.concept_count());

  // Fixed shard layout with per-shard sub-seeds: the estimate is identical
  // whatever the worker cap is.
  constexpr std::size_t kShards = 16;
  std::vector<std::size_t> shard_hits(kShards, 0);
  run_tasks(kShards, [&](std::size_t shard) {
    const std::size_t quota =
        config.n_samples / kShards + (shard < config.n_samples % kShards ? 1 : 0);
    Rng rng(derive_seed(config.seed, "robustness_shard", shard));
    ConceptVector perturbed(eval_set.concept_count());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < quota; ++i) {
      const auto& row = eval_set.example(rng.uniform_index(eval_set.size()));
      perturbed = embed(row.concepts, trigger);
      if (config.flip_rate > 0.0) {
        for (double& v : perturbed) {
          if (rng.bernoulli(config.flip_rate)) v = 1.0 - v;
        }
      }
      if (mlp_predict(model, perturbed).label == y_tc) ++hits;
    }
    shard_hits[shard] = hits;
  });
  std::size_t hits = 0;
  for (std::size_t h : shard_hits) hits += h;
  RobustnessEstimate est;
  est.n_samples = config.n_samples;
  est.r = static_cast<double>(hits) / static_cast<double>(config.n_samples);
  const double half =
      1.96 * std::sqrt(est.r * (1.0 - est.r) / static_cast<double>(config.n_samples));
  est.ci_lo = std::fmax(0.0, est.r - half);
  est.ci_hi = std::fmin(1.0, est.r + half);
  return est;
}

double robustness_exact(const MlpModel& model, const ConceptDataset& eval_set,
                        const TriggerSpec& trigger, int y_tc, double flip_rate) {
  if (eval_set.size() == 0) throw std::invalid_argument("robustness_exact: empty dataset");
  if (!(flip_rate >= 0.0 && flip_rate <= 1.0)) {
    throw std::invalid_argument("robustness_exact: flip rate must be in [0,1]");
  }
  validate_trigger(trigger, eval_set.concept_count());
  const std::size_t width = eval_set.concept_count();

  if (flip_rate == 0.0) {
    std::size_t hits = 0;
    for (const auto& row : eval_set.examples()) {
      if (mlp_predict(model, embed(row.concepts, trigger)).label == y_tc) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(eval_set.size());
  }

  if (width > max_exhaustive_width()) {
    throw std::invalid_argument("robustness_exact: concept count exceeds enumeration limit of " +
                                std::to_string(max_exhaustive_width()));
  }
  const std::size_t n_patterns = static_cast<std::size_t>(1) << width;
  double total = 0.0;
  ConceptVector flipped(width);
  for (const auto& row : eval_set.examples()) {
    const ConceptVector base = embed(row.concepts, trigger);
    double row_prob = 0.0;
    for (std::size_t mask = 0; mask < n_patterns; ++mask) {
      double prob = 1.0;
      for (std::size_t k = 0; k < width; ++k) {
        const bool flip = (mask >> k) & 1;
        prob *= flip ? flip_rate : 1.0 - flip_rate;
        flipped[k] = flip ? 1.0 - base[k] : base[k];
      }
      if (prob == 0.0) continue;
      if (mlp_predict(model, flipped).label == y_tc) row_prob += prob;
    }
    total += row_prob;
  }
  return total / static_cast<double>(eval_set.size());
}

}  // namespace catlab
