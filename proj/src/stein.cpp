#include "skellamnet/stein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "skellamnet/errors.hpp"

namespace skellamnet {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

IntRange hull(IntRange a, IntRange b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

std::int64_t anchor_of(const SkellamParams& p, SteinMode mode) {
  if (mode == SteinMode::Canonical) return 0;
  return static_cast<std::int64_t>(std::llround(p.lambda2() - p.lambda1()));
}

void check_mode(const SkellamParams& p, SteinMode mode) {
  if (mode == SteinMode::Canonical && !p.symmetric(1e-12)) {
    throw UnsupportedParameters(
        "Stein solution: lambda1 != lambda2 needs the exploratory mode (no bound is known there)");
  }
}

std::int64_t floor_threshold(double x) {
  if (std::isnan(x)) throw DomainError("Stein solution: threshold is NaN");
  constexpr double kLimit = 9.0e15;
  return static_cast<std::int64_t>(std::floor(std::clamp(x, -kLimit, kLimit)));
}

// Q(n) = P(W <= min(n, x)) P(W > max(n, x)). Summing the Stein equation
// against the PMF gives the first order relation
//   lambda1 P(n) f(n+1) + lambda2 P(n+1) f(n) = Q(n),
// which is marched forward for n >= c and backward for n < c. c sits where
// the homogeneous factor lambda2 P(n+1) / (lambda1 P(n)) crosses 1, so both
// marches are contracting.
class Marcher {
 public:
  Marcher(const SkellamTable& t, std::int64_t x) : t_(t), x_(x) {
    const IntRange w = t.window();
    if (x < w.lo) {
      x_ = w.lo - 1;
      log_fx_ = kNegInf;
      log_sx_ = 0.0;
    } else if (x >= w.hi) {
      // Beyond the window the right tail is below the truncation level.
      x_ = w.hi;
      log_fx_ = 0.0;
      log_sx_ = kNegInf;
    } else {
      log_fx_ = t.log_cdf(x);
      log_sx_ = t.log_sf(x);
    }
  }

  std::int64_t x() const { return x_; }
  double cdf_x() const { return std::exp(log_fx_); }
  double sf_x() const { return std::exp(log_sx_); }

  double log_q(std::int64_t n) const {
    return n <= x_ ? t_.log_cdf(n) + log_sx_ : log_fx_ + t_.log_sf(n);
  }
  // log(Q(n) / P(n)) without forming either factor.
  double log_q_over_p(std::int64_t n) const {
    return n <= x_ ? t_.log_lower_ratio(n) + log_sx_ : log_fx_ + t_.log_hazard_inv(n);
  }

  double anchor_value(std::int64_t c, SteinMode mode) const {
    const double l1 = t_.params().lambda1();
    const double l2 = t_.params().lambda2();
    if (mode == SteinMode::Canonical) {
      // f(0) = [Q(0) + Q(-1)] / (2 lambda (P(0) + P(-1))), the ratio form of
      // e^{2 lambda} / (2 lambda (I_0 + I_1)) [Q(0) + Q(-1)].
      const double log_den = log_add_exp(t_.log_pmf(0), t_.log_pmf(-1));
      return (std::exp(log_q(0) - log_den) + std::exp(log_q(-1) - log_den)) / (2.0 * l1);
    }
    // Zero second difference at c: f(c+1) + f(c-1) = 2 f(c).
    const double lpc = t_.log_pmf(c);
    const double num = std::exp(log_q(c) - lpc) / l1 + std::exp(log_q(c - 1) - lpc) / l2;
    const double den = 2.0 + (l2 / l1) * std::exp(t_.log_pmf(c + 1) - lpc) +
                       (l1 / l2) * std::exp(t_.log_pmf(c - 1) - lpc);
    return num / den;
  }

  // Fills out[j - lo] = f(j) for j in [lo, hi]; requires lo <= c <= hi.
  void march(std::int64_t c, double fc, std::int64_t lo, std::int64_t hi, std::vector<double>& out) const {
    const double l1 = t_.params().lambda1();
    const double l2 = t_.params().lambda2();
    out.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    out[static_cast<std::size_t>(c - lo)] = fc;
    for (std::int64_t n = c; n < hi; ++n) {
      const double fn = out[static_cast<std::size_t>(n - lo)];
      const double up = std::exp(t_.log_pmf(n + 1) - t_.log_pmf(n));
      out[static_cast<std::size_t>(n + 1 - lo)] = (std::exp(log_q_over_p(n)) - l2 * up * fn) / l1;
    }
    for (std::int64_t n = c - 1; n >= lo; --n) {
      const double fn1 = out[static_cast<std::size_t>(n + 1 - lo)];
      const double lp1 = t_.log_pmf(n + 1);
      const double down = std::exp(t_.log_pmf(n) - lp1);
      out[static_cast<std::size_t>(n - lo)] = (std::exp(log_q(n) - lp1) - l1 * down * fn1) / l2;
    }
  }

 private:
  const SkellamTable& t_;
  std::int64_t x_;
  double log_fx_ = 0.0;
  double log_sx_ = 0.0;
};

IntRange table_window(const SkellamParams& p, std::int64_t c, IntRange x_range, IntRange j_range) {
  IntRange w = skellam_support(p);
  w = hull(w, {c - 1, c + 1});
  w = hull(w, {j_range.lo - 1, j_range.hi + 2});
  // Thresholds outside the window are clamped by the marcher.
  const IntRange xs{std::max(x_range.lo, w.lo - 1), std::min(x_range.hi, w.hi)};
  if (xs.lo <= xs.hi) w = hull(w, xs);
  return w;
}

struct SweepCell {
  double value = -1.0;
  std::int64_t j = 0;
};

SweepCell sweep_one(const SkellamTable& table, std::int64_t x, IntRange j_range, SteinMode mode) {
  const SteinSolution s = solve_stein(table, x, j_range.lo, j_range.hi + 1, mode);
  SweepCell cell;
  for (std::int64_t j = j_range.lo; j <= j_range.hi; ++j) {
    const double d = std::fabs(s.at(j + 1) - s.at(j));
    if (d > cell.value) {
      cell.value = d;
      cell.j = j;
    }
  }
  return cell;
}

void check_ranges(IntRange x_range, IntRange j_range) {
  if (x_range.hi < x_range.lo || j_range.hi < j_range.lo) {
    throw DomainError("delta_f_sup: empty search range");
  }
}

DeltaFResult reduce(const std::vector<SweepCell>& cells, IntRange x_range, IntRange j_range,
                    SteinMode mode) {
  DeltaFResult r;
  r.value = -1.0;
  r.exploratory = mode == SteinMode::Exploratory;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].value > r.value) {
      r.value = cells[i].value;
      r.argmax_x = x_range.lo + static_cast<std::int64_t>(i);
      r.argmax_j = cells[i].j;
    }
  }
  r.boundary_maximizer = (x_range.size() > 1 && (r.argmax_x == x_range.lo || r.argmax_x == x_range.hi)) ||
                         r.argmax_j == j_range.lo || r.argmax_j == j_range.hi;
  return r;
}

}  // namespace

double SteinSolution::residual_sup() const {
  double worst = 0.0;
  for (std::int64_t j = j_min + 1; j < j_max; ++j) {
    const double a = params.lambda1() * at(j + 1) - static_cast<double>(j) * at(j) - params.lambda2() * at(j - 1);
    worst = std::max(worst, std::fabs(a - g(j)));
  }
  return worst;
}

SteinSolution solve_stein(const SkellamTable& table, std::int64_t x, std::int64_t j_min,
                          std::int64_t j_max, SteinMode mode) {
  const SkellamParams& p = table.params();
  check_mode(p, mode);
  if (j_max < j_min) throw DomainError("solve_stein: j_max < j_min");
  const std::int64_t c = anchor_of(p, mode);
  const Marcher m(table, x);
  const std::int64_t lo = std::min(j_min, c);
  const std::int64_t hi = std::max(j_max, c);

  std::vector<double> all;
  m.march(c, m.anchor_value(c, mode), lo, hi, all);

  SteinSolution s{p, x, j_min, j_max, c, m.cdf_x(), m.sf_x(), mode == SteinMode::Exploratory, {}};
  s.values.assign(all.begin() + (j_min - lo), all.begin() + (j_max - lo) + 1);
  return s;
}

SteinSolution solve_stein(const SkellamParams& params, double x, std::int64_t j_min,
                          std::int64_t j_max, SteinMode mode) {
  check_mode(params, mode);
  if (j_max < j_min) throw DomainError("solve_stein: j_max < j_min");
  const std::int64_t xi = floor_threshold(x);
  const SkellamTable table(params, table_window(params, anchor_of(params, mode), {xi, xi}, {j_min, j_max}));
  return solve_stein(table, xi, j_min, j_max, mode);
}

IntRange default_stein_range(const SkellamParams& params) {
  const double l = std::max(params.lambda1(), params.lambda2());
  const auto h = static_cast<std::int64_t>(std::ceil(l + 12.0 * std::sqrt(l) + 40.0));
  return {-h, h};
}

DeltaFResult delta_f_sup(const SkellamParams& params, IntRange x_range, IntRange j_range, SteinMode mode) {
  check_mode(params, mode);
  check_ranges(x_range, j_range);
  const SkellamTable table(params, table_window(params, anchor_of(params, mode), x_range, j_range));
  std::vector<SweepCell> cells(static_cast<std::size_t>(x_range.size()));
  const std::int64_t count = x_range.size();
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < count; ++i) {
    cells[static_cast<std::size_t>(i)] = sweep_one(table, x_range.lo + i, j_range, mode);
  }
  return reduce(cells, x_range, j_range, mode);
}

DeltaFResult delta_f_sup(const SkellamParams& params, SteinMode mode) {
  const IntRange r = default_stein_range(params);
  return delta_f_sup(params, r, r, mode);
}

DeltaFResult delta_f_sup_serial(const SkellamParams& params, IntRange x_range, IntRange j_range,
                                SteinMode mode) {
  check_mode(params, mode);
  check_ranges(x_range, j_range);
  const SkellamTable table(params, table_window(params, anchor_of(params, mode), x_range, j_range));
  std::vector<SweepCell> cells;
  cells.reserve(static_cast<std::size_t>(x_range.size()));
  for (std::int64_t x = x_range.lo; x <= x_range.hi; ++x) cells.push_back(sweep_one(table, x, j_range, mode));
  return reduce(cells, x_range, j_range, mode);
}

namespace {

double sum_sq(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return s;
}

void validate(const BoundInputs& in) {
  for (const auto* v : {&in.p, &in.q}) {
    for (double a : *v) {
      if (!(a >= 0.0 && a <= 1.0)) throw DomainError("BoundInputs: probabilities must lie in [0, 1]");
    }
  }
}

}  // namespace

double bound_independent(const BoundInputs& inputs, double delta_f) {
  validate(inputs);
  return delta_f * (sum_sq(inputs.p) + sum_sq(inputs.q));
}

double bound_covariance(const BoundInputs& inputs, double delta_f) {
  validate(inputs);
  const double sp = std::accumulate(inputs.p.begin(), inputs.p.end(), 0.0);
  const double sq = std::accumulate(inputs.q.begin(), inputs.q.end(), 0.0);
  const double pp = sum_sq(inputs.p);
  const double qq = sum_sq(inputs.q);
  // sum_{j<k} p_j p_k = ((sum p)^2 - sum p^2) / 2, likewise for q.
  const double products = 0.5 * (sp * sp - pp) + 0.5 * (sq * sq - qq) + sp * sq;
  const double covs = inputs.cov_ll.value_or(0.0) + inputs.cov_mm.value_or(0.0) + inputs.cov_lm.value_or(0.0);
  return delta_f * (pp + qq + 2.0 * covs + 2.0 * products);
}

double bound_neg_assoc(double mean_total, double var_total, double delta_f) {
  if (!(var_total <= mean_total)) {
    throw DomainError("bound_neg_assoc: Var(T1 + T2) = " + std::to_string(var_total) +
                      " exceeds E(T1 + T2) = " + std::to_string(mean_total) +
                      "; inputs are not from a negatively associated family");
  }
  return delta_f * (mean_total - var_total);
}

}  // namespace skellamnet
