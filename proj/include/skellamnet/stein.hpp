#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "skellamnet/skellam.hpp"

namespace skellamnet {

// A[f](k) = lambda1 f(k+1) - k f(k) - lambda2 f(k-1); E[A f(W)] = 0 exactly
// when W ~ Skellam(lambda1, lambda2).
template <class Fn>
double stein_operator(const SkellamParams& params, Fn&& f, std::int64_t k) {
  return params.lambda1() * f(k + 1) - static_cast<double>(k) * f(k) - params.lambda2() * f(k - 1);
}

// E[A f(W)] by exact summation over the truncated Skellam support.
template <class Fn>
double stein_expectation(const SkellamParams& params, Fn&& f) {
  const auto table = SkellamTable::truncated(params);
  const IntRange w = table.window();
  double s = 0.0;
  for (std::int64_t k = w.lo; k <= w.hi; ++k) s += table.pmf(k) * stein_operator(params, f, k);
  return s;
}

enum class SteinMode {
  // lambda1 == lambda2, anchor c = 0 and the closed-form f(0).
  Canonical,
  // lambda1 != lambda2 allowed; c = round(lambda2 - lambda1), f(c) chosen so
  // the second difference vanishes at c. No bound is known for this branch.
  Exploratory,
};

// Tabulated solution f_x of A[f](k) = g_x(k), g_x(k) = 1{k <= x} - P(W <= x).
struct SteinSolution {
  SkellamParams params;
  std::int64_t x;  // floor of the requested threshold; f_x depends on nothing else
  std::int64_t j_min;
  std::int64_t j_max;
  std::int64_t anchor;
  double cdf_x;  // P(W <= x)
  double sf_x;   // P(W > x)
  bool exploratory;
  std::vector<double> values;  // f_x(j_min..j_max)

  double at(std::int64_t j) const { return values.at(static_cast<std::size_t>(j - j_min)); }
  double g(std::int64_t k) const { return k <= x ? sf_x : -cdf_x; }
  // sup over j_min < j < j_max of |A[f](j) - g(j)|.
  double residual_sup() const;
};

SteinSolution solve_stein(const SkellamParams& params, double x, std::int64_t j_min,
                          std::int64_t j_max, SteinMode mode = SteinMode::Canonical);

// Same, reusing a table whose window covers [j_min - 1, j_max + 1], the
// anchor neighbourhood and x.
SteinSolution solve_stein(const SkellamTable& table, std::int64_t x, std::int64_t j_min,
                          std::int64_t j_max, SteinMode mode = SteinMode::Canonical);

// Default x and j search interval: [-h, h], h = L + 12 sqrt(L) + 40 with
// L = max(lambda1, lambda2), widened to include the anchor.
IntRange default_stein_range(const SkellamParams& params);

struct DeltaFResult {
  double value = 0.0;
  std::int64_t argmax_x = 0;
  std::int64_t argmax_j = 0;
  // Maximizer sits on an edge of the searched ranges: they may be too small.
  bool boundary_maximizer = false;
  bool exploratory = false;
};

// max |f_x(j+1) - f_x(j)| over integer x in x_range and j in j_range.
// Restricting x to integers is exact since g_x only depends on floor(x).
// The x sweep runs in parallel; the reduction is order independent.
DeltaFResult delta_f_sup(const SkellamParams& params, IntRange x_range, IntRange j_range,
                         SteinMode mode = SteinMode::Canonical);
DeltaFResult delta_f_sup(const SkellamParams& params, SteinMode mode = SteinMode::Canonical);
// Serial reference for the sweep above.
DeltaFResult delta_f_sup_serial(const SkellamParams& params, IntRange x_range, IntRange j_range,
                                SteinMode mode = SteinMode::Canonical);

// Indicator summaries for U = sum L_k - sum M_k.
struct BoundInputs {
  std::vector<double> p;  // E[L_k]
  std::vector<double> q;  // E[M_k]
  std::optional<double> cov_ll;  // sum_{j<k} Cov(L_j, L_k)
  std::optional<double> cov_mm;  // sum_{l<k} Cov(M_l, M_k)
  std::optional<double> cov_lm;  // sum_{j,l} Cov(L_j, M_l)
  std::optional<double> var_total;  // Var(T1 + T2)
};

// ||Delta f|| (sum p^2 + sum q^2); indicators independent of the rest.
double bound_independent(const BoundInputs& inputs, double delta_f);

// ||Delta f|| { sum p^2 + sum q^2 + 2[cov_ll + cov_mm + cov_lm]
//              + 2[sum_{j<k} p_j p_k + sum_{l<k} q_l q_k + sum_{j,l} p_j q_l] }.
double bound_covariance(const BoundInputs& inputs, double delta_f);

// ||Delta f|| (E[T1 + T2] - Var(T1 + T2)) for negatively associated indicators.
double bound_neg_assoc(double mean_total, double var_total, double delta_f);

}  // namespace skellamnet
