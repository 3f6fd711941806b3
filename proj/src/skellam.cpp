#include "skellamnet/skellam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "skellamnet/bessel.hpp"
#include "skellamnet/errors.hpp"
#include "skellamnet/rng.hpp"

namespace skellamnet {
namespace {

constexpr std::size_t kSampleBlock = 1 << 16;
const double kLogTruncation = std::log(1e-16);

// log(e^a + e^b)
double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

std::vector<double> log_pmf_window(const SkellamParams& p, IntRange w) {
  const std::int64_t kmax = std::max(std::llabs(w.lo), std::llabs(w.hi));
  const auto lb = log_bessel_i_scaled_sequence(p.bessel_argument(), kmax);
  const double sa = std::sqrt(p.lambda1());
  const double sb = std::sqrt(p.lambda2());
  const double offset = -(sa - sb) * (sa - sb);
  const double half_log_ratio = 0.5 * (std::log(p.lambda1()) - std::log(p.lambda2()));
  std::vector<double> out(static_cast<std::size_t>(w.size()));
  for (std::int64_t k = w.lo; k <= w.hi; ++k) {
    out[static_cast<std::size_t>(k - w.lo)] =
        offset + static_cast<double>(k) * half_log_ratio + lb[static_cast<std::size_t>(std::llabs(k))];
  }
  return out;
}

}  // namespace

SkellamParams::SkellamParams(double lambda1, double lambda2) : lambda1_(lambda1), lambda2_(lambda2) {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0) || !std::isfinite(lambda1) || !std::isfinite(lambda2)) {
    throw DomainError("SkellamParams: intensities must be finite and positive (got " +
                      std::to_string(lambda1) + ", " + std::to_string(lambda2) + ")");
  }
}

double SkellamParams::bessel_argument() const { return 2.0 * std::sqrt(lambda1_ * lambda2_); }

bool SkellamParams::symmetric(double rel_tol) const {
  return std::fabs(lambda1_ - lambda2_) <= rel_tol * std::max(lambda1_, lambda2_);
}

IntRange skellam_support(const SkellamParams& params) {
  const double half = 12.0 * std::sqrt(params.variance()) + 40.0;
  IntRange w{static_cast<std::int64_t>(std::floor(params.mean() - half)),
             static_cast<std::int64_t>(std::ceil(params.mean() + half))};
  for (int iter = 0; iter < 64; ++iter) {
    const auto lp = log_pmf_window(params, w);
    const bool lo_ok = lp.front() < kLogTruncation;
    const bool hi_ok = lp.back() < kLogTruncation;
    if (lo_ok && hi_ok) return w;
    const std::int64_t grow = std::max<std::int64_t>(16, w.size() / 4);
    if (!lo_ok) w.lo -= grow;
    if (!hi_ok) w.hi += grow;
  }
  throw NumericalFailure("skellam_support: truncation window did not converge");
}

SkellamTable::SkellamTable(const SkellamParams& params, IntRange window)
    : params_(params), window_(window) {
  if (window.hi < window.lo) throw DomainError("SkellamTable: empty window");
  lp_ = log_pmf_window(params, window);
  const std::size_t n = lp_.size();
  log_l_.resize(n);
  log_h_.resize(n);
  const double ninf = -std::numeric_limits<double>::infinity();

  // Geometric continuation of the mass beyond each end of the window.
  double start_l = 0.0;
  double start_h = ninf;
  if (n >= 2) {
    const double rho_lo = std::exp(lp_[0] - lp_[1]);
    if (rho_lo < 1.0) start_l = -std::log1p(-rho_lo);
    const double rho_hi = std::exp(lp_[n - 1] - lp_[n - 2]);
    if (rho_hi < 1.0) start_h = std::log(rho_hi) - std::log1p(-rho_hi);
  }
  log_l_[0] = start_l;
  for (std::size_t i = 1; i < n; ++i) {
    log_l_[i] = log_add_exp(0.0, lp_[i - 1] - lp_[i] + log_l_[i - 1]);
  }
  log_h_[n - 1] = start_h;
  for (std::size_t i = n - 1; i-- > 0;) {
    log_h_[i] = lp_[i + 1] - lp_[i] + log_add_exp(0.0, log_h_[i + 1]);
  }
}

SkellamTable SkellamTable::truncated(const SkellamParams& params) {
  return SkellamTable(params, skellam_support(params));
}

std::size_t SkellamTable::idx(std::int64_t k) const {
  if (!window_.contains(k)) {
    throw DomainError("SkellamTable: index " + std::to_string(k) + " outside window [" +
                      std::to_string(window_.lo) + ", " + std::to_string(window_.hi) + "]");
  }
  return static_cast<std::size_t>(k - window_.lo);
}

double SkellamTable::pmf(std::int64_t k) const { return std::exp(log_pmf(k)); }
double SkellamTable::cdf(std::int64_t k) const { return std::min(1.0, std::exp(log_cdf(k))); }
double SkellamTable::sf(std::int64_t k) const { return std::min(1.0, std::exp(log_sf(k))); }

DiscreteDist SkellamTable::to_dist() const {
  std::vector<double> m(lp_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < lp_.size(); ++i) {
    m[i] = std::exp(lp_[i]);
    total += m[i];
  }
  // Truncated mass is below 1e-15; rescale only if rounding pushed the sum above 1.
  if (total > 1.0) {
    for (auto& v : m) v /= total;
  }
  return DiscreteDist(window_.lo, std::move(m));
}

double skellam_log_pmf(const SkellamParams& params, std::int64_t k) {
  const double sa = std::sqrt(params.lambda1());
  const double sb = std::sqrt(params.lambda2());
  return -(sa - sb) * (sa - sb) +
         0.5 * static_cast<double>(k) * (std::log(params.lambda1()) - std::log(params.lambda2())) +
         log_bessel_i_scaled(k, params.bessel_argument());
}

double skellam_pmf(const SkellamParams& params, std::int64_t k) {
  return std::exp(skellam_log_pmf(params, k));
}

double skellam_cdf(const SkellamParams& params, std::int64_t k) {
  const IntRange support = skellam_support(params);
  if (k >= support.hi) {
    // Mass beyond the window is below 1e-16.
    const SkellamTable t(params, support);
    return 1.0 - t.sf(support.hi);
  }
  IntRange w{std::min(support.lo, k - 64), std::max(k, support.lo)};
  const SkellamTable t(params, w);
  return t.cdf(k);
}

double skellam_hazard_inv(const SkellamParams& params, std::int64_t n) {
  const double lpn = skellam_log_pmf(params, n);
  if (lpn < std::log(1e-300)) {
    throw RangeError("skellam_hazard_inv: P(W = " + std::to_string(n) + ") below 1e-300");
  }
  const IntRange support = skellam_support(params);
  IntRange w{std::min(support.lo, n), std::max(support.hi, n) + 64};
  const SkellamTable t(params, w);
  return std::exp(t.log_hazard_inv(n));
}

namespace {

void fill_block(const SkellamParams& params, std::uint64_t seed, std::size_t block,
                std::vector<std::int64_t>& out) {
  Rng rng(derive_seed(seed, block));
  const std::size_t begin = block * kSampleBlock;
  const std::size_t end = std::min(out.size(), begin + kSampleBlock);
  for (std::size_t i = begin; i < end; ++i) {
    const std::int64_t a = poisson(rng, params.lambda1());
    const std::int64_t b = poisson(rng, params.lambda2());
    out[i] = a - b;
  }
}

void check_count(std::size_t count) {
  if (count == 0) throw DomainError("skellam_sample: count must be >= 1");
}

}  // namespace

std::vector<std::int64_t> skellam_sample(const SkellamParams& params, std::size_t count,
                                         std::uint64_t seed) {
  check_count(count);
  std::vector<std::int64_t> out(count);
  const auto blocks = static_cast<std::int64_t>((count + kSampleBlock - 1) / kSampleBlock);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) fill_block(params, seed, static_cast<std::size_t>(b), out);
  return out;
}

std::vector<std::int64_t> skellam_sample_serial(const SkellamParams& params, std::size_t count,
                                                std::uint64_t seed) {
  check_count(count);
  std::vector<std::int64_t> out(count);
  const std::size_t blocks = (count + kSampleBlock - 1) / kSampleBlock;
  for (std::size_t b = 0; b < blocks; ++b) fill_block(params, seed, b, out);
  return out;
}

}  // namespace skellamnet
