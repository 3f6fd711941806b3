#include "skellamnet/ks.hpp"

#include <algorithm>
#include <cmath>

namespace skellamnet {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ks_distance(const DiscreteDist& a, const DiscreteDist& b) {
  const std::int64_t lo = std::min(a.support_min(), b.support_min());
  const std::int64_t hi = std::max(a.support_max(), b.support_max());
  double d = 0.0;
  for (std::int64_t k = lo; k <= hi; ++k) d = std::max(d, std::fabs(a.cdf(k) - b.cdf(k)));
  // Rounded partial sums can overshoot 1 by an ulp.
  return std::min(d, 1.0);
}

double ks_distance(const DiscreteDist& a, const std::function<double(double)>& continuous_cdf) {
  double d = 0.0;
  for (std::int64_t k = a.support_min(); k <= a.support_max(); ++k) {
    const double g = continuous_cdf(static_cast<double>(k));
    d = std::max({d, std::fabs(a.cdf(k) - g), std::fabs(a.cdf(k - 1) - g)});
  }
  return std::min(d, 1.0);
}

KsSubadditivityReport ks_subadditivity_check(const DiscreteDist& x, const DiscreteDist& y,
                                             const DiscreteDist& z, const DiscreteDist& w) {
  KsSubadditivityReport r;
  r.lhs = ks_distance(difference(x, y), difference(z, w));
  r.d_xz = ks_distance(x, z);
  r.d_yw = ks_distance(y, w);
  r.holds = r.lhs <= r.rhs() + 1e-12;
  return r;
}

}  // namespace skellamnet
