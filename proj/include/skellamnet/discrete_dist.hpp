#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace skellamnet {

// Finite-support probability mass table over consecutive integers
// [support_min, support_min + size). Masses are nonnegative and sum to 1 up
// to a truncation shave of at most 1e-9.
class DiscreteDist {
 public:
  DiscreteDist(std::int64_t support_min, std::vector<double> masses);

  static DiscreteDist point_mass(std::int64_t k);
  // Normalized histogram of integer observations.
  static DiscreteDist from_counts(const std::map<std::int64_t, std::uint64_t>& counts);
  static DiscreteDist from_samples(std::span<const std::int64_t> samples);

  std::int64_t support_min() const { return min_; }
  std::int64_t support_max() const { return min_ + static_cast<std::int64_t>(masses_.size()) - 1; }
  std::span<const double> masses() const { return masses_; }
  double total() const { return total_; }

  double pmf(std::int64_t k) const;
  // P(X <= k).
  double cdf(std::int64_t k) const;
  // P(X > k), summed from the upper end so far-right tails keep precision.
  double sf(std::int64_t k) const;

  double mean() const;
  double variance() const;

  // Distribution of -X.
  DiscreteDist negated() const;

 private:
  std::int64_t min_;
  std::vector<double> masses_;
  std::vector<double> lower_;  // lower_[i] = sum masses_[0..i]
  std::vector<double> upper_;  // upper_[i] = sum masses_[i+1..]
  double total_ = 0.0;
};

// Distribution of X + Y for independent X, Y.
DiscreteDist convolve(const DiscreteDist& a, const DiscreteDist& b);

// Distribution of X - Y for independent X, Y.
DiscreteDist difference(const DiscreteDist& x, const DiscreteDist& y);

}  // namespace skellamnet
