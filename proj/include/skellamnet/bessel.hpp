#pragma once

#include <cstdint>
#include <vector>

namespace skellamnet {

// Integer-order modified Bessel functions of the first kind, I_k(x).
//
// Negative orders are folded by I_{-k} = I_k. The scaled form e^{-x} I_k(x)
// is computed throughout; the unscaled value is formed only on request and
// raises RangeError when it would overflow.
//
// Accepted domain: 0 < x <= 1e5, |k| <= 1e6. Relative accuracy ~1e-13.

inline constexpr double kBesselMaxArgument = 1e5;
inline constexpr std::int64_t kBesselMaxOrder = 1'000'000;

// I_k(x), or e^{-x} I_k(x) when `scaled`.
double bessel_i(std::int64_t k, double x, bool scaled = false);

// log(e^{-x} I_k(x)). Finite even where the scaled value underflows.
double log_bessel_i_scaled(std::int64_t k, double x);

// log(e^{-x} I_k(x)) for k = 0..k_max from a single backward-recurrence pass.
std::vector<double> log_bessel_i_scaled_sequence(double x, std::int64_t k_max);

// I_{k+1}(x) / I_k(x) for k >= 0, from the Gauss continued fraction.
double bessel_ratio(std::int64_t k, double x);

}  // namespace skellamnet
