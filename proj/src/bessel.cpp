#include "skellamnet/bessel.hpp"

#include <cfloat>
#include <cmath>
#include <cstdlib>
#include <string>

#include "skellamnet/errors.hpp"

namespace skellamnet {
namespace {

constexpr double kSeriesMaxX = 30.0;
constexpr std::int64_t kSeriesMaxOrder = 100;
constexpr double kRescale = 1e200;

void check_argument(double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError("bessel: argument must be finite and positive, got " + std::to_string(x));
  }
  if (x > kBesselMaxArgument) {
    throw DomainError("bessel: argument " + std::to_string(x) + " exceeds supported maximum");
  }
}

std::int64_t fold_order(std::int64_t k) {
  const std::int64_t a = k < 0 ? -k : k;
  if (a > kBesselMaxOrder) {
    throw DomainError("bessel: order " + std::to_string(k) + " exceeds supported maximum");
  }
  return a;
}

// Neumaier compensated accumulator.
template <class T>
struct Accumulator {
  T sum = 0;
  T c = 0;
  void add(T v) {
    const T t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      c += (sum - t) + v;
    } else {
      c += (v - t) + sum;
    }
    sum = t;
  }
  void scale(T s) {
    sum *= s;
    c *= s;
  }
  T value() const { return sum + c; }
};

// Power series; all terms positive. Used for x <= 30, k <= 100.
double log_scaled_series(std::int64_t k, double x) {
  const double q = 0.25 * x * x;
  double lead = 1.0;
  for (std::int64_t j = 1; j <= k; ++j) lead *= 0.5 * x / static_cast<double>(j);
  Accumulator<double> acc;
  double term = 1.0;
  acc.add(term);
  for (int m = 1; m < 10000; ++m) {
    term *= q / (static_cast<double>(m) * static_cast<double>(m + k));
    acc.add(term);
    if (term < 1e-18 * acc.value()) break;
  }
  return std::log(lead) + std::log(acc.value()) - x;
}

// Tiny argument, large order: the series converges in a handful of terms but
// the leading power underflows, so it is assembled in log space.
double log_scaled_small_x(std::int64_t k, double x) {
  const double q = 0.25 * x * x;
  double s = 1.0;
  double term = 1.0;
  for (int m = 1; m < 200; ++m) {
    term *= q / (static_cast<double>(m) * static_cast<double>(m + k));
    s += term;
    if (term < 1e-18 * s) break;
  }
  const double kd = static_cast<double>(k);
  return kd * std::log(0.5 * x) - std::lgamma(kd + 1.0) + std::log(s) - x;
}

std::int64_t normalization_depth(double x) {
  return static_cast<std::int64_t>(std::ceil(x + 9.0 * std::sqrt(x) + 30.0));
}

// Backward recurrence I_{n-1} = I_{n+1} + (2n/x) I_n, started from the exact
// continued-fraction ratio at n = N and normalized by
// e^{-x} [I_0 + 2 sum_{n>=1} I_n] = 1. Fills out[0..k_max] with log-scaled values.
// Runs in long double: for large x the recurrence is ~x steps long.
void miller(double x, std::int64_t k_max, std::vector<double>& out) {
  const std::int64_t top = std::max(k_max + 1, normalization_depth(x));
  out.assign(static_cast<std::size_t>(k_max) + 1, 0.0);

  using Real = long double;
  const Real kRescaleL = kRescale;
  Real next = bessel_ratio(top, x);  // I_{top+1}, relative to I_top = 1
  Real cur = 1.0L;
  int scale = 0;  // true value = stored * kRescale^scale
  std::vector<int> scale_at(static_cast<std::size_t>(k_max) + 1, 0);
  std::vector<Real> stored(static_cast<std::size_t>(k_max) + 1, 0.0L);
  Accumulator<Real> sum;
  sum.add(2.0L * next);

  for (std::int64_t n = top; n >= 1; --n) {
    if (n <= k_max) {
      stored[static_cast<std::size_t>(n)] = cur;
      scale_at[static_cast<std::size_t>(n)] = scale;
    }
    sum.add(2.0L * cur);
    const Real prev = next + (2.0L * static_cast<Real>(n) / static_cast<Real>(x)) * cur;
    next = cur;
    cur = prev;
    if (cur > kRescaleL) {
      cur /= kRescaleL;
      next /= kRescaleL;
      sum.scale(1.0L / kRescaleL);
      ++scale;
    }
  }
  stored[0] = cur;
  scale_at[0] = scale;
  sum.add(cur);

  const Real log_rescale = std::log(kRescaleL);
  const Real log_norm = std::log(sum.value()) + scale * log_rescale;
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = static_cast<double>(std::log(stored[n]) + scale_at[n] * log_rescale - log_norm);
  }
}

double log_scaled_single(std::int64_t k, double x) {
  if (x <= kSeriesMaxX && k <= kSeriesMaxOrder) return log_scaled_series(k, x);
  if (x < 1.0) return log_scaled_small_x(k, x);
  std::vector<double> seq;
  miller(x, k, seq);
  return seq.back();
}

}  // namespace

double log_bessel_i_scaled(std::int64_t k, double x) {
  check_argument(x);
  return log_scaled_single(fold_order(k), x);
}

double bessel_i(std::int64_t k, double x, bool scaled) {
  const double ls = log_bessel_i_scaled(k, x);
  if (scaled) return std::exp(ls);
  const double lv = ls + x;
  if (lv > std::log(DBL_MAX)) {
    throw RangeError("bessel_i: unscaled I_" + std::to_string(k) + "(" + std::to_string(x) +
                     ") overflows; request the scaled form");
  }
  return std::exp(lv);
}

std::vector<double> log_bessel_i_scaled_sequence(double x, std::int64_t k_max) {
  check_argument(x);
  fold_order(k_max);
  if (k_max < 0) throw DomainError("log_bessel_i_scaled_sequence: k_max must be >= 0");
  std::vector<double> out;
  if (x < 1.0) {
    out.resize(static_cast<std::size_t>(k_max) + 1);
    for (std::int64_t k = 0; k <= k_max; ++k) {
      out[static_cast<std::size_t>(k)] =
          k <= kSeriesMaxOrder ? log_scaled_series(k, x) : log_scaled_small_x(k, x);
    }
    return out;
  }
  miller(x, k_max, out);
  return out;
}

double bessel_ratio(std::int64_t k, double x) {
  check_argument(x);
  if (k < 0) throw DomainError("bessel_ratio: order must be nonnegative");
  // Modified Lentz evaluation of 1 / (b1 + 1 / (b2 + ...)), b_j = 2(k + j) / x.
  constexpr double tiny = 1e-300;
  double f = tiny;
  double c = f;
  double d = 0.0;
  const double kd = static_cast<double>(k);
  const auto max_iter = static_cast<long>(20.0 * x) + 10000;
  for (long j = 1; j <= max_iter; ++j) {
    const double b = 2.0 * (kd + static_cast<double>(j)) / x;
    d = b + d;
    if (d == 0.0) d = tiny;
    c = b + 1.0 / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) return f;
  }
  throw NumericalFailure("bessel_ratio: continued fraction did not converge");
}

}  // namespace skellamnet
