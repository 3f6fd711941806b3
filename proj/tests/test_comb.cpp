#include <doctest.h>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <cmath>
#include <vector>

#include "skellamnet/comb.hpp"
#include "skellamnet/errors.hpp"
#include "skellamnet/rng.hpp"

using namespace skellamnet;

namespace {

// Direct normalization of pi^k (1 - pi)^(n - k) binom(n, k)^nu in long double.
std::vector<long double> comb_by_enumeration(unsigned n, double pi, double nu) {
  std::vector<long double> t(n + 1);
  long double z = 0.0L;
  for (unsigned k = 0; k <= n; ++k) {
    const long double b = boost::math::binomial_coefficient<long double>(n, k);
    t[k] = std::pow(static_cast<long double>(pi), k) * std::pow(1.0L - pi, n - k) * std::pow(b, nu);
    z += t[k];
  }
  for (auto& v : t) v /= z;
  return t;
}

std::pair<double, double> moments(const std::vector<long double>& p) {
  long double m = 0.0L, s = 0.0L;
  for (std::size_t k = 0; k < p.size(); ++k) m += k * p[k];
  for (std::size_t k = 0; k < p.size(); ++k) s += (k - m) * (k - m) * p[k];
  return {static_cast<double>(m), static_cast<double>(s)};
}

}  // namespace

TEST_SUITE("comb") {
  TEST_CASE("pmf examples") {
    CHECK(CombDist(2, 0.5, 1.0).pmf(1) == doctest::Approx(0.5).epsilon(1e-14));
    for (double nu : {-3.0, 0.0, 0.5, 1.0, 2.0}) CHECK(CombDist(1, 0.37, nu).pmf(1) == doctest::Approx(0.37).epsilon(1e-14));
    const CombDist d(4, 0.3, 0.0);
    const auto want = comb_by_enumeration(4, 0.3, 0.0);
    double s = 0.0;
    for (unsigned k = 0; k <= 4; ++k) {
      CHECK(d.pmf(k) == doctest::Approx(static_cast<double>(want[k])).epsilon(1e-13));
      s += d.pmf(k);
    }
    CHECK(std::fabs(s - 1.0) < 1e-12);
  }

  TEST_CASE("masses sum to one") {
    for (unsigned n : {1u, 6u, 50u, 1000u}) {
      for (double pi : {0.01, 0.3, 0.5, 0.9}) {
        for (double nu : {-5.0, -1.0, 0.0, 0.5, 1.0, 1.5}) {
          const CombDist d(n, pi, nu);
          double s = 0.0;
          for (const auto& w : d.windows())
            for (auto k = w.lo; k <= w.hi; ++k) s += d.pmf(static_cast<std::uint64_t>(k));
          CHECK(std::fabs(s - 1.0) < 1e-12);
        }
      }
    }
  }

  TEST_CASE("nu = 1 is the binomial law") {
    for (unsigned n : {1u, 5u, 40u, 300u}) {
      for (double pi : {0.05, 0.3, 0.5, 0.77}) {
        const CombDist d(n, pi, 1.0);
        const boost::math::binomial_distribution<double> b(n, pi);
        double worst = 0.0;
        for (unsigned k = 0; k <= n; ++k) worst = std::max(worst, std::fabs(d.pmf(k) - boost::math::pdf(b, k)));
        CHECK(worst < 1e-12);
        const auto m = comb_moments(d);
        CHECK(m.mean == doctest::Approx(n * pi).epsilon(1e-12));
        CHECK(m.variance == doctest::Approx(n * pi * (1 - pi)).epsilon(1e-11));
      }
    }
  }

  TEST_CASE("moments against enumeration") {
    const auto m1 = comb_moments(CombDist(1, 0.2, -2.0));
    CHECK(m1.mean == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(m1.variance == doctest::Approx(0.16).epsilon(1e-13));
    for (double nu : {-1.0, 0.0, 0.5, 1.5}) {
      const auto want = moments(comb_by_enumeration(6, 0.4, nu));
      const auto got = comb_moments(CombDist(6, 0.4, nu));
      CHECK(got.mean == doctest::Approx(want.first).epsilon(1e-12));
      CHECK(got.variance == doctest::Approx(want.second).epsilon(1e-12));
    }
  }

  TEST_CASE("calibration examples") {
    CHECK(calibrate_comb(100, 1.0, 5.0).pi() == doctest::Approx(0.05).epsilon(1e-9));
    const auto d = calibrate_comb(10, 0.0, 5.0);
    CHECK(moments(comb_by_enumeration(10, d.pi(), 0.0)).first == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(d.pi() == doctest::Approx(0.5).epsilon(1e-9));
    for (unsigned n : {6u, 100u, 100000u}) {
      for (double nu : {-1.0, 0.0, 0.5, 1.0}) {
        for (double target : {0.5, 2.0, 5.0}) {
          const auto c = calibrate_comb(n, nu, target);
          CHECK(std::fabs(comb_moments(c).mean - target) <= 1e-9 * target);
        }
      }
    }
    CHECK_THROWS(calibrate_comb(5, 1.0, 6.0));
    CHECK_THROWS(calibrate_comb(5, 1.0, 0.0));
  }

  TEST_CASE("large n with tiny pi keeps precision") {
    const auto d = CombDist::from_logit(10'000'000, std::log(3e-7 / (1 - 3e-7)), 1.0);
    CHECK(d.mean() == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(d.variance() == doctest::Approx(3.0 * (1 - 3e-7)).epsilon(1e-9));
  }

  TEST_CASE("negative nu keeps mass at both ends") {
    const CombDist d(200, 0.5, -1.0);
    CHECK(d.windows().size() == 2);
    CHECK(d.pmf(0) == doctest::Approx(d.pmf(200)).epsilon(1e-12));
    CHECK_THROWS(d.to_dist());
  }

  TEST_CASE("log-supermodularity holds for nu <= 1") {
    for (unsigned n = 1; n <= 6; ++n)
      for (double pi : {0.1, 0.3, 0.5, 0.9})
        for (double nu : {1.0, 0.5, 0.0, -1.0, -5.0}) {
          const auto r = log_supermodularity_check(n, pi, nu);
          CHECK(r.pass);
          CHECK(r.pairs_checked > 0);
        }
    const auto eq = log_supermodularity_check(5, 0.3, 1.0);
    CHECK(std::fabs(eq.worst_margin) < 1e-12);
    CHECK(log_supermodularity_check(4, 0.3, 0.0).pass);
  }

  TEST_CASE("log-supermodularity fails for nu > 1") {
    const auto r = log_supermodularity_check(4, 0.3, 1.5);
    CHECK_FALSE(r.pass);
    CHECK(r.worst_margin < -1e-3);
    CHECK_THROWS(log_supermodularity_check(7, 0.3, 0.0));
  }

  TEST_CASE("dispersion relative to the binomial") {
    // nu > 1 contracts the count toward its mode, nu < 1 spreads it.
    for (unsigned n : {6u, 100u, 1000u}) {
      const double target = 2.0;
      const double p = target / n;
      const double binom_var = n * p * (1 - p);
      const auto one = comb_moments(calibrate_comb(n, 1.0, target));
      CHECK(one.variance <= target);
      CHECK(comb_moments(calibrate_comb(n, 1.5, target)).variance < binom_var);
      for (double nu : {0.5, 0.0, -1.0}) CHECK(comb_moments(calibrate_comb(n, nu, target)).variance > binom_var);
    }
  }

  TEST_CASE("sampling follows the pmf") {
    for (double nu : {1.0, 0.0, -1.0, 2.0}) {
      const CombDist d(12, 0.35, nu);
      Rng rng(31);
      const int draws = 200000;
      std::vector<double> hits(13, 0.0);
      for (int i = 0; i < draws; ++i) hits[d.sample(rng)] += 1.0;
      for (unsigned k = 0; k <= 12; ++k) {
        const double e = draws * d.pmf(k);
        CHECK(std::fabs(hits[k] - e) <= 5 * std::sqrt(e + 1.0));
      }
    }
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(CombDist(5, 1.5, 1.0), DomainError);
    CHECK_THROWS_AS(CombDist(5, 0.5, NAN), DomainError);
  }
}
