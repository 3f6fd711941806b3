#include "skellamnet/comb.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "skellamnet/errors.hpp"

namespace skellamnet {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Terms more than 1e-18 below the largest one are dropped.
const double kLogDrop = std::log(1e-18);

double log_binom(std::uint64_t n, std::uint64_t k) {
  const double a = static_cast<double>(n);
  const double b = static_cast<double>(k);
  return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

double logit_of(double pi) {
  if (pi == 0.0) return kNegInf;
  if (pi == 1.0) return std::numeric_limits<double>::infinity();
  return std::log(pi) - std::log1p(-pi);
}

double pi_of(double theta) {
  if (theta == kNegInf) return 0.0;
  if (theta == std::numeric_limits<double>::infinity()) return 1.0;
  return theta < 0 ? std::exp(theta) / (1.0 + std::exp(theta)) : 1.0 / (1.0 + std::exp(-theta));
}

}  // namespace

CombDist::CombDist(std::uint64_t n, double pi, double nu) : CombDist(n, pi, logit_of(pi), nu) {
  if (!(pi >= 0.0 && pi <= 1.0)) throw DomainError("CombDist: pi must lie in [0, 1]");
}

CombDist CombDist::from_logit(std::uint64_t n, double theta, double nu) {
  if (std::isnan(theta)) throw DomainError("CombDist: logit is NaN");
  return CombDist(n, pi_of(theta), theta, nu);
}

CombDist::CombDist(std::uint64_t n, double pi, double theta, double nu)
    : n_(n), pi_(pi), theta_(theta), nu_(nu) {
  if (!std::isfinite(nu)) throw DomainError("CombDist: nu must be finite");
  if (n > 100'000'000'000ULL) throw DomainError("CombDist: n too large");
  build();
}

double CombDist::log_term(std::uint64_t k) const {
  // log of pi^k (1-pi)^(n-k) binom(n,k)^nu, written as k theta + n log(1-pi) + ...;
  // the n log(1-pi) part is common to all k and folded in here.
  const double log1m = pi_ == 1.0 ? kNegInf : std::log1p(-pi_);
  if (pi_ == 0.0) return k == 0 ? 0.0 : kNegInf;
  if (pi_ == 1.0) return k == n_ ? 0.0 : kNegInf;
  return static_cast<double>(k) * theta_ + static_cast<double>(n_) * log1m + nu_ * log_binom(n_, k);
}

void CombDist::build() {
  windows_.clear();
  std::vector<std::vector<double>> segs;
  if (pi_ == 0.0 || pi_ == 1.0 || n_ == 0) {
    const std::int64_t k = pi_ == 1.0 ? static_cast<std::int64_t>(n_) : 0;
    windows_.push_back({k, k});
    segs.push_back({0.0});
  } else {
    // log t(k+1) - log t(k)
    auto step = [this](std::uint64_t k) {
      return theta_ + nu_ * (std::log(static_cast<double>(n_ - k)) - std::log(static_cast<double>(k + 1)));
    };
    auto grow = [&](std::uint64_t anchor, bool up, bool down) {
      // Walks from the anchor while terms stay within kLogDrop of the running max.
      std::vector<double> right{0.0}, left;
      double best = 0.0;
      if (up) {
        double cur = 0.0;
        for (std::uint64_t k = anchor; k < n_; ++k) {
          cur += step(k);
          best = std::max(best, cur);
          if (cur < best + kLogDrop) break;
          right.push_back(cur);
        }
      }
      if (down) {
        double cur = 0.0;
        for (std::uint64_t k = anchor; k > 0; --k) {
          cur -= step(k - 1);
          best = std::max(best, cur);
          if (cur < best + kLogDrop) break;
          left.push_back(cur);
        }
      }
      std::vector<double> seg(left.rbegin(), left.rend());
      seg.insert(seg.end(), right.begin(), right.end());
      const IntRange w{static_cast<std::int64_t>(anchor) - static_cast<std::int64_t>(left.size()),
                       static_cast<std::int64_t>(anchor + right.size() - 1)};
      const double base = log_term(anchor);
      for (auto& v : seg) v += base;
      return std::make_pair(w, seg);
    };

    if (nu_ >= 0.0) {
      // Unimodal: the mode is the first k whose forward step is negative.
      std::uint64_t lo = 0, hi = n_;
      while (lo < hi) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (step(mid) > 0.0) lo = mid + 1; else hi = mid;
      }
      auto [w, seg] = grow(lo, true, true);
      windows_.push_back(w);
      segs.push_back(std::move(seg));
    } else {
      auto [w0, s0] = grow(0, true, false);
      auto [w1, s1] = grow(n_, false, true);
      if (w1.lo <= w0.hi + 1) {
        // Windows meet: the whole range is kept.
        IntRange w{0, static_cast<std::int64_t>(n_)};
        std::vector<double> seg(static_cast<std::size_t>(w.size()));
        double cur = log_term(0);
        seg[0] = cur;
        for (std::uint64_t k = 0; k < n_; ++k) seg[k + 1] = (cur += step(k));
        windows_.push_back(w);
        segs.push_back(std::move(seg));
      } else {
        // Drop a window whose terms are all negligible against the other.
        const double m0 = *std::max_element(s0.begin(), s0.end());
        const double m1 = *std::max_element(s1.begin(), s1.end());
        const double top = std::max(m0, m1);
        if (m0 >= top + kLogDrop) {
          windows_.push_back(w0);
          segs.push_back(std::move(s0));
        }
        if (m1 >= top + kLogDrop) {
          windows_.push_back(w1);
          segs.push_back(std::move(s1));
        }
      }
    }
  }

  double top = kNegInf;
  for (const auto& s : segs) top = std::max(top, *std::max_element(s.begin(), s.end()));
  double z = 0.0;
  for (const auto& s : segs)
    for (double v : s) z += std::exp(v - top);
  log_z_ = top + std::log(z);

  probs_.clear();
  for (const auto& s : segs)
    for (double v : s) probs_.push_back(std::exp(v - log_z_));
  cum_.resize(probs_.size());
  double acc = 0.0, m = 0.0;
  std::size_t i = 0;
  for (const auto& w : windows_) {
    for (std::int64_t k = w.lo; k <= w.hi; ++k, ++i) {
      acc += probs_[i];
      cum_[i] = acc;
      m += static_cast<double>(k) * probs_[i];
    }
  }
  mean_ = m;
  double v = 0.0;
  i = 0;
  for (const auto& w : windows_) {
    for (std::int64_t k = w.lo; k <= w.hi; ++k, ++i) {
      const double d = static_cast<double>(k) - m;
      v += d * d * probs_[i];
    }
  }
  variance_ = v;
}

double CombDist::log_pmf(std::uint64_t k) const {
  if (k > n_) return kNegInf;
  std::size_t off = 0;
  for (const auto& w : windows_) {
    if (w.contains(static_cast<std::int64_t>(k))) return std::log(probs_[off + static_cast<std::size_t>(static_cast<std::int64_t>(k) - w.lo)]);
    off += static_cast<std::size_t>(w.size());
  }
  return log_term(k) - log_z_;
}

double CombDist::pmf(std::uint64_t k) const {
  if (k > n_) return 0.0;
  std::size_t off = 0;
  for (const auto& w : windows_) {
    if (w.contains(static_cast<std::int64_t>(k))) return probs_[off + static_cast<std::size_t>(static_cast<std::int64_t>(k) - w.lo)];
    off += static_cast<std::size_t>(w.size());
  }
  return std::exp(log_term(k) - log_z_);
}

DiscreteDist CombDist::to_dist() const {
  if (windows_.size() != 1) throw DomainError("CombDist::to_dist: mass is split across two windows");
  std::vector<double> m(probs_.begin(), probs_.end());
  double total = 0.0;
  for (double v : m) total += v;
  if (total > 1.0) for (auto& v : m) v /= total;
  return DiscreteDist(windows_.front().lo, std::move(m));
}

std::uint64_t CombDist::sample(Rng& rng) const {
  const double u = rng.uniform() * cum_.back();
  const auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cum_.begin());
  if (i >= cum_.size()) i = cum_.size() - 1;
  for (const auto& w : windows_) {
    if (i < static_cast<std::size_t>(w.size())) return static_cast<std::uint64_t>(w.lo + static_cast<std::int64_t>(i));
    i -= static_cast<std::size_t>(w.size());
  }
  return static_cast<std::uint64_t>(windows_.back().hi);
}

CombMoments comb_moments(const CombDist& dist) { return {dist.mean(), dist.variance()}; }

CombDist calibrate_comb(std::uint64_t n, double nu, double target_mean) {
  if (!(target_mean > 0.0 && target_mean < static_cast<double>(n))) {
    throw DomainError("calibrate_comb: target mean must lie in (0, n)");
  }
  auto mean_at = [&](double theta) { return CombDist::from_logit(n, theta, nu).mean(); };
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 64 && mean_at(lo) > target_mean; ++i) lo *= 2.0;
  for (int i = 0; i < 64 && mean_at(hi) < target_mean; ++i) hi *= 2.0;
  const double mlo = mean_at(lo), mhi = mean_at(hi);
  if (!(mlo <= target_mean && target_mean <= mhi)) {
    throw NumericalFailure("calibrate_comb: no bracket for n=" + std::to_string(n) + " nu=" + std::to_string(nu) +
                           " target=" + std::to_string(target_mean) + " (mean range [" + std::to_string(mlo) +
                           ", " + std::to_string(mhi) + "])");
  }
  const double tol = 1e-10 * target_mean;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(lo < mid && mid < hi)) break;
    const double m = mean_at(mid);
    if (std::fabs(m - target_mean) <= tol) return CombDist::from_logit(n, mid, nu);
    if (m < target_mean) lo = mid; else hi = mid;
  }
  const CombDist a = CombDist::from_logit(n, lo, nu), b = CombDist::from_logit(n, hi, nu);
  const CombDist& best = std::fabs(a.mean() - target_mean) <= std::fabs(b.mean() - target_mean) ? a : b;
  if (std::fabs(best.mean() - target_mean) <= 1e-9 * target_mean) return best;
  throw NumericalFailure("calibrate_comb: bisection stalled at mean " + std::to_string(best.mean()) +
                         " for target " + std::to_string(target_mean));
}

LogSupermodularityReport log_supermodularity_check(std::uint64_t n, double pi, double nu) {
  if (n > 6) throw DomainError("log_supermodularity_check: n must be <= 6");
  if (!(pi > 0.0 && pi < 1.0)) throw DomainError("log_supermodularity_check: pi must lie in (0, 1)");
  const CombDist d(n, pi, nu);
  std::vector<double> log_mu(n + 1);
  for (std::uint64_t k = 0; k <= n; ++k) log_mu[k] = d.log_pmf(k) - log_binom(n, k);
  LogSupermodularityReport r;
  r.worst_margin = std::numeric_limits<double>::infinity();
  const unsigned full = 1u << n;
  for (unsigned x = 0; x < full; ++x) {
    for (unsigned y = 0; y < full; ++y) {
      const double margin = log_mu[std::popcount(x & y)] + log_mu[std::popcount(x | y)] -
                            log_mu[std::popcount(x)] - log_mu[std::popcount(y)];
      r.worst_margin = std::min(r.worst_margin, margin);
      ++r.pairs_checked;
    }
  }
  r.pass = r.worst_margin >= -1e-12;
  return r;
}

}  // namespace skellamnet
