#pragma once

// Slow, independent reference computations used only by the tests.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

// I_k(x) from the power series sum_m (x/2)^(2m+k) / (m! (m+k)!) in 50 digits.
inline Big bessel_series(std::int64_t k, double xd) {
  k = k < 0 ? -k : k;
  const Big x = xd;
  const Big h = x / 2;
  Big term = 1;
  for (std::int64_t i = 1; i <= k; ++i) term *= h / i;
  Big sum = term;
  const Big h2 = h * h;
  for (std::int64_t m = 1;; ++m) {
    term *= h2 / (Big(m) * Big(m + k));
    sum += term;
    if (term < sum * Big("1e-45") && Big(m) > h) break;
  }
  return sum;
}

inline double bessel_scaled(std::int64_t k, double x) {
  return static_cast<double>(bessel_series(k, x) * boost::multiprecision::exp(Big(-x)));
}

inline long double poisson_pmf(double mean, std::int64_t k) {
  if (k < 0) return 0.0L;
  return std::exp(static_cast<long double>(k) * std::log(static_cast<long double>(mean)) - mean -
                  std::lgamma(static_cast<long double>(k) + 1.0L));
}

// Skellam law as the difference of two Poisson variables, by direct
// convolution in long double over [lo, hi].
struct SkellamByConvolution {
  std::int64_t lo, hi;
  std::vector<long double> pmf;  // pmf[k - lo]
  std::vector<long double> cdf;  // P(W <= k)
  std::vector<long double> sf;   // P(W > k), summed from the top

  SkellamByConvolution(double l1, double l2, std::int64_t lo_, std::int64_t hi_) : lo(lo_), hi(hi_) {
    const auto jmax = static_cast<std::int64_t>(std::max(l1, l2) + 20.0 * std::sqrt(std::max(l1, l2)) + 60.0) +
                      std::max(std::llabs(lo), std::llabs(hi));
    std::vector<long double> p1(jmax + 1), p2(jmax + 1);
    for (std::int64_t j = 0; j <= jmax; ++j) {
      p1[j] = poisson_pmf(l1, j);
      p2[j] = poisson_pmf(l2, j);
    }
    pmf.assign(hi - lo + 1, 0.0L);
    for (std::int64_t k = lo; k <= hi; ++k) {
      long double s = 0.0L;
      for (std::int64_t j = std::max<std::int64_t>(0, -k); j <= jmax && j + k <= jmax; ++j) s += p1[j + k] * p2[j];
      pmf[k - lo] = s;
    }
    cdf.resize(pmf.size());
    sf.resize(pmf.size());
    long double acc = 0.0L;
    for (std::size_t i = 0; i < pmf.size(); ++i) cdf[i] = (acc += pmf[i]);
    acc = 0.0L;
    for (std::size_t i = pmf.size(); i-- > 0;) {
      sf[i] = acc;
      acc += pmf[i];
    }
  }
  long double at(std::int64_t k) const { return k < lo || k > hi ? 0.0L : pmf[k - lo]; }
  long double F(std::int64_t k) const { return k < lo ? 0.0L : k > hi ? 1.0L : cdf[k - lo]; }
  long double S(std::int64_t k) const { return k < lo ? 1.0L : k > hi ? 0.0L : sf[k - lo]; }
};

// f_x(0) from its closed form e^{2 lambda} / (2 lambda (I_0 + I_1)) [Q(0) + Q(-1)],
// Q(n) = P(W <= min(n, x)) P(W > max(n, x)), with series Bessel values.
inline long double stein_f0(double lambda, std::int64_t x, const SkellamByConvolution& w) {
  auto q = [&](std::int64_t n) { return w.F(std::min(n, x)) * w.S(std::max(n, x)); };
  const Big i0 = bessel_series(0, 2 * lambda), i1 = bessel_series(1, 2 * lambda);
  const Big pre = boost::multiprecision::exp(Big(2 * lambda)) / (Big(2 * lambda) * (i0 + i1));
  return static_cast<long double>(pre) * (q(0) + q(-1));
}

// Symmetric Stein equation lambda f(j+1) - j f(j) - lambda f(j-1) = g_x(j) as
// two boundary-value problems, on [0, J] and [-J, 0], with f(0) pinned to the
// closed form and f(+-J) = 0. The matrices do not depend on x, so each side is
// factored once (dense LU, long double) and reused for every threshold.
class SteinBvp {
 public:
  using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

  SteinBvp(double lambda, std::int64_t J)
      : lambda_(lambda), J_(J), w_(lambda, lambda, -J - 5, J + 5), pos_(build(+1)), neg_(build(-1)) {}

  // f_x(j) for j in [-J, J].
  std::vector<long double> solve(std::int64_t x) const {
    const long double fx = w_.F(x);
    auto g = [&](std::int64_t j) { return (j <= x ? 1.0L : 0.0L) - fx; };
    const long double f0 = stein_f0(lambda_, x, w_);
    std::vector<long double> f(2 * J_ + 1, 0.0L);
    f[J_] = f0;
    for (int side : {+1, -1}) {
      // Unknowns f(side * 1 .. side * (J-1)); equations at the same points.
      const std::int64_t n = J_ - 1;
      Vec rhs(n);
      for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t j = side * (i + 1);
        rhs(i) = g(j);
      }
      // Move the pinned f(0) to the right-hand side of the first equation.
      rhs(0) -= (side > 0 ? -lambda_ : lambda_) * f0;
      const Vec sol = (side > 0 ? pos_ : neg_).solve(rhs);
      for (std::int64_t i = 0; i < n; ++i) f[J_ + side * (i + 1)] = sol(i);
    }
    return f;
  }

  const SkellamByConvolution& law() const { return w_; }

 private:
  Eigen::PartialPivLU<Mat> build(int side) const {
    const std::int64_t n = J_ - 1;
    Mat a = Mat::Zero(n, n);
    for (std::int64_t i = 0; i < n; ++i) {
      const std::int64_t j = side * (i + 1);
      // Coefficients of f(j+1), f(j), f(j-1) mapped to unknown slots.
      a(i, i) = -static_cast<long double>(j);
      const std::int64_t up = side > 0 ? i + 1 : i - 1;  // slot of f(j+1)
      const std::int64_t dn = side > 0 ? i - 1 : i + 1;  // slot of f(j-1)
      if (up >= 0 && up < n) a(i, up) += lambda_;
      if (dn >= 0 && dn < n) a(i, dn) -= lambda_;
    }
    return Eigen::PartialPivLU<Mat>(a);
  }

  double lambda_;
  std::int64_t J_;
  SkellamByConvolution w_;
  Eigen::PartialPivLU<Mat> pos_, neg_;
};

}  // namespace oracle
