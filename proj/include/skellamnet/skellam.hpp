#pragma once

#include <cstdint>
#include <vector>

#include "skellamnet/discrete_dist.hpp"

namespace skellamnet {

// Closed integer interval [lo, hi].
struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::int64_t size() const { return hi - lo + 1; }
  bool contains(std::int64_t k) const { return k >= lo && k <= hi; }
};

// Skellam(lambda1, lambda2): law of N1 - N2 for independent Poisson N1, N2.
class SkellamParams {
 public:
  SkellamParams(double lambda1, double lambda2);

  double lambda1() const { return lambda1_; }
  double lambda2() const { return lambda2_; }
  double mean() const { return lambda1_ - lambda2_; }
  double variance() const { return lambda1_ + lambda2_; }
  // Bessel argument 2 sqrt(lambda1 lambda2).
  double bessel_argument() const;
  bool symmetric(double rel_tol = 1e-12) const;

 private:
  double lambda1_;
  double lambda2_;
};

// Truncated support: |k - mean| <= 12 sqrt(lambda1 + lambda2) + 40, widened
// until the boundary masses fall below 1e-16.
IntRange skellam_support(const SkellamParams& params);

// Skellam law tabulated in log space over a window. Besides the PMF it keeps
//   log L(k) = log(P(W <= k) / P(W = k))   and
//   log H(k) = log(P(W >  k) / P(W = k)),
// built by the ratio recurrences L(k) = 1 + L(k-1) P(k-1)/P(k) and
// H(k) = (P(k+1)/P(k)) (1 + H(k+1)), so both tails stay accurate where
// 1 - CDF would cancel and where the PMF itself underflows.
class SkellamTable {
 public:
  SkellamTable(const SkellamParams& params, IntRange window);

  // Table over skellam_support(params).
  static SkellamTable truncated(const SkellamParams& params);

  const SkellamParams& params() const { return params_; }
  IntRange window() const { return window_; }

  double log_pmf(std::int64_t k) const { return lp_[idx(k)]; }
  double pmf(std::int64_t k) const;
  double log_cdf(std::int64_t k) const { return lp_[idx(k)] + log_l_[idx(k)]; }
  double cdf(std::int64_t k) const;
  double log_sf(std::int64_t k) const { return lp_[idx(k)] + log_h_[idx(k)]; }
  double sf(std::int64_t k) const;
  double log_lower_ratio(std::int64_t k) const { return log_l_[idx(k)]; }
  double log_hazard_inv(std::int64_t k) const { return log_h_[idx(k)]; }

  DiscreteDist to_dist() const;

 private:
  std::size_t idx(std::int64_t k) const;

  SkellamParams params_;
  IntRange window_;
  std::vector<double> lp_;
  std::vector<double> log_l_;
  std::vector<double> log_h_;
};

double skellam_log_pmf(const SkellamParams& params, std::int64_t k);
double skellam_pmf(const SkellamParams& params, std::int64_t k);
// P(W <= k).
double skellam_cdf(const SkellamParams& params, std::int64_t k);

// H(n) = P(W > n) / P(W = n). RangeError when P(W = n) < 1e-300.
double skellam_hazard_inv(const SkellamParams& params, std::int64_t n);

// `count` i.i.d. draws, deterministic in `seed` and independent of the
// thread count (draws are generated in fixed blocks with counter-derived seeds).
std::vector<std::int64_t> skellam_sample(const SkellamParams& params, std::size_t count,
                                         std::uint64_t seed);
// Single-threaded reference producing the identical sequence.
std::vector<std::int64_t> skellam_sample_serial(const SkellamParams& params, std::size_t count,
                                                std::uint64_t seed);

}  // namespace skellamnet
