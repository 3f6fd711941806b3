#pragma once

#include <functional>

#include "skellamnet/discrete_dist.hpp"

namespace skellamnet {

// Standard normal CDF.
double normal_cdf(double z);

// sup_t |F_a(t) - F_b(t)| for two integer-supported laws.
double ks_distance(const DiscreteDist& a, const DiscreteDist& b);

// sup_t |F_a(t) - G(t)| for continuous G. At each atom k both one-sided gaps
// |F_a(k) - G(k)| and |F_a(k-1) - G(k)| are taken.
double ks_distance(const DiscreteDist& a, const std::function<double(double)>& continuous_cdf);

struct KsSubadditivityReport {
  double lhs = 0.0;   // d(X - Y, Z - W)
  double d_xz = 0.0;  // d(X, Z)
  double d_yw = 0.0;  // d(Y, W)
  double rhs() const { return d_xz + d_yw; }
  bool holds = false;
};

// Checks d(X - Y, Z - W) <= d(X, Z) + d(Y, W) by exact convolution.
KsSubadditivityReport ks_subadditivity_check(const DiscreteDist& x, const DiscreteDist& y,
                                             const DiscreteDist& z, const DiscreteDist& w);

}  // namespace skellamnet
