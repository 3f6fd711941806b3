#pragma once

#include <cstdint>
#include <vector>

#include "skellamnet/discrete_dist.hpp"
#include "skellamnet/rng.hpp"
#include "skellamnet/skellam.hpp"

namespace skellamnet {

// Conway-Maxwell binomial: P(S = k) proportional to
// pi^k (1 - pi)^(n - k) binom(n, k)^nu on k = 0..n.
//
// Only the terms within 1e-18 of the largest are kept. For nu >= 0 the log
// terms are concave and one window around the mode suffices; for nu < 0 they
// are convex and the mass sits at the two ends, so windows grow from 0 and
// from n. Inside a window, log terms come from the ratio
//   t(k+1) / t(k) = (pi / (1 - pi)) ((n - k) / (k + 1))^nu,
// anchored at one lgamma evaluation.
class CombDist {
 public:
  CombDist(std::uint64_t n, double pi, double nu);
  // Parameterized by theta = logit(pi), which keeps precision for tiny pi.
  static CombDist from_logit(std::uint64_t n, double theta, double nu);

  std::uint64_t n() const { return n_; }
  double pi() const { return pi_; }
  double nu() const { return nu_; }
  double logit() const { return theta_; }
  double log_normalizer() const { return log_z_; }

  double log_pmf(std::uint64_t k) const;
  double pmf(std::uint64_t k) const;
  double mean() const { return mean_; }
  double variance() const { return variance_; }

  // Retained windows, each a closed interval of k.
  const std::vector<IntRange>& windows() const { return windows_; }
  // The retained masses as a table; requires a single window.
  DiscreteDist to_dist() const;

  std::uint64_t sample(Rng& rng) const;

 private:
  CombDist(std::uint64_t n, double pi, double theta, double nu);
  double log_term(std::uint64_t k) const;  // unnormalized, absolute
  void build();

  std::uint64_t n_;
  double pi_;
  double theta_;
  double nu_;
  double log_z_ = 0.0;
  double mean_ = 0.0;
  double variance_ = 0.0;
  std::vector<IntRange> windows_;
  std::vector<double> probs_;  // normalized masses over the windows, concatenated
  std::vector<double> cum_;
};

struct CombMoments {
  double mean;
  double variance;
};
CombMoments comb_moments(const CombDist& dist);

// pi such that the mean equals target_mean to 1e-9 relative. The mean is
// the derivative of the log normalizer in theta = logit(pi), so it is
// strictly increasing and bisection on theta is safe.
CombDist calibrate_comb(std::uint64_t n, double nu, double target_mean);

struct LogSupermodularityReport {
  bool pass = false;
  // min over pairs of log mu(x^x') + log mu(xvx') - log mu(x) - log mu(x').
  double worst_margin = 0.0;
  std::uint64_t pairs_checked = 0;
};

// Exhaustive check of mu(x) mu(x') <= mu(x ^ x') mu(x v x') over binary
// vectors of length n <= 6, mu(x) = P(S = |x|) / binom(n, |x|).
LogSupermodularityReport log_supermodularity_check(std::uint64_t n, double pi, double nu);

}  // namespace skellamnet
