#include "skellamnet/discrete_dist.hpp"

#include <cmath>
#include <string>

#include "skellamnet/errors.hpp"

namespace skellamnet {

DiscreteDist::DiscreteDist(std::int64_t support_min, std::vector<double> masses)
    : min_(support_min), masses_(std::move(masses)) {
  if (masses_.empty()) throw DomainError("DiscreteDist: empty support");
  lower_.resize(masses_.size());
  upper_.resize(masses_.size());
  // Kahan-compensated prefix sums.
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    const double m = masses_[i];
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw DomainError("DiscreteDist: masses must be finite and nonnegative");
    }
    const double y = m - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
    lower_[i] = s;
  }
  total_ = s;
  s = 0.0;
  c = 0.0;
  for (std::size_t i = masses_.size(); i-- > 0;) {
    upper_[i] = s;
    const double y = masses_[i] - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  if (total_ < 1.0 - 1e-9 || total_ > 1.0 + 1e-12) {
    throw DomainError("DiscreteDist: total mass " + std::to_string(total_) + " outside [1-1e-9, 1]");
  }
}

DiscreteDist DiscreteDist::point_mass(std::int64_t k) { return DiscreteDist(k, {1.0}); }

DiscreteDist DiscreteDist::from_counts(const std::map<std::int64_t, std::uint64_t>& counts) {
  if (counts.empty()) throw DomainError("DiscreteDist::from_counts: no observations");
  std::uint64_t n = 0;
  for (const auto& [k, c] : counts) n += c;
  const std::int64_t lo = counts.begin()->first;
  const std::int64_t hi = counts.rbegin()->first;
  std::vector<double> m(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (const auto& [k, c] : counts) {
    m[static_cast<std::size_t>(k - lo)] = static_cast<double>(c) / static_cast<double>(n);
  }
  return DiscreteDist(lo, std::move(m));
}

DiscreteDist DiscreteDist::from_samples(std::span<const std::int64_t> samples) {
  std::map<std::int64_t, std::uint64_t> counts;
  for (auto v : samples) ++counts[v];
  return from_counts(counts);
}

double DiscreteDist::pmf(std::int64_t k) const {
  if (k < min_ || k > support_max()) return 0.0;
  return masses_[static_cast<std::size_t>(k - min_)];
}

double DiscreteDist::cdf(std::int64_t k) const {
  if (k < min_) return 0.0;
  if (k >= support_max()) return total_;
  return lower_[static_cast<std::size_t>(k - min_)];
}

double DiscreteDist::sf(std::int64_t k) const {
  if (k < min_) return total_;
  if (k >= support_max()) return 0.0;
  return upper_[static_cast<std::size_t>(k - min_)];
}

double DiscreteDist::mean() const {
  // Centered at support_min to limit cancellation for far-offset supports.
  double s = 0.0;
  for (std::size_t i = 0; i < masses_.size(); ++i) s += static_cast<double>(i) * masses_[i];
  return static_cast<double>(min_) * total_ + s;
}

double DiscreteDist::variance() const {
  const double mu = mean();
  const double shift = mu - static_cast<double>(min_);
  double s = 0.0;
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    const double d = static_cast<double>(i) - shift;
    s += d * d * masses_[i];
  }
  return s;
}

DiscreteDist DiscreteDist::negated() const {
  std::vector<double> m(masses_.rbegin(), masses_.rend());
  return DiscreteDist(-support_max(), std::move(m));
}

DiscreteDist convolve(const DiscreteDist& a, const DiscreteDist& b) {
  const auto ma = a.masses();
  const auto mb = b.masses();
  std::vector<double> out(ma.size() + mb.size() - 1, 0.0);
  for (std::size_t i = 0; i < ma.size(); ++i) {
    const double ai = ma[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < mb.size(); ++j) out[i + j] += ai * mb[j];
  }
  return DiscreteDist(a.support_min() + b.support_min(), std::move(out));
}

DiscreteDist difference(const DiscreteDist& x, const DiscreteDist& y) {
  return convolve(x, y.negated());
}

}  // namespace skellamnet
