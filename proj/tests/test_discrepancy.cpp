#include <doctest.h>

#include <omp.h>

#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <vector>

#include "skellamnet/discrepancy.hpp"
#include "skellamnet/errors.hpp"
#include "skellamnet/experiments.hpp"
#include "skellamnet/ks.hpp"
#include "skellamnet/rng.hpp"
#include "skellamnet/stein.hpp"

using namespace skellamnet;

namespace {

bool is_chain(bool a, bool b, bool c) { return a + b + c == 2; }

// Sum over triples of P(non-chain becomes chain) and P(chain stops being one),
// by enumerating the 8 flip patterns on the three pairs.
ChainLambdas lambdas_by_triples(const SparseGraph& g, double alpha, double beta) {
  const auto n = static_cast<Vertex>(g.n_vertices());
  long double l1 = 0.0L, l2 = 0.0L;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j)
      for (Vertex k = j + 1; k < n; ++k) {
        const bool e[3] = {g.has_edge(i, j), g.has_edge(i, k), g.has_edge(j, k)};
        const bool before = is_chain(e[0], e[1], e[2]);
        for (int mask = 0; mask < 8; ++mask) {
          long double pr = 1.0L;
          bool after[3];
          for (int b = 0; b < 3; ++b) {
            const bool flip = (mask >> b) & 1;
            const double rate = e[b] ? beta : alpha;
            pr *= flip ? rate : 1.0 - rate;
            after[b] = e[b] != flip;
          }
          const bool now = is_chain(after[0], after[1], after[2]);
          if (!before && now) l1 += pr;
          if (before && !now) l2 += pr;
        }
      }
  return {static_cast<double>(l1), static_cast<double>(l2)};
}

// Cov of the two "chain lost" indicators of triples t1, t2 on a 4-vertex
// base graph, by enumerating all 2^6 flip patterns.
double cov_by_enumeration(const std::vector<Edge>& base, std::array<Vertex, 3> t1, std::array<Vertex, 3> t2,
                          double alpha, double beta) {
  const SparseGraph g(4, base);
  double e1 = 0.0, e2 = 0.0, e12 = 0.0;
  for (int mask = 0; mask < 64; ++mask) {
    bool present[6];
    double pr = 1.0;
    for (std::uint64_t p = 0; p < 6; ++p) {
      const auto [u, v] = pair_from_index(p, 4);
      const bool was = g.has_edge(u, v);
      const bool flip = (mask >> p) & 1;
      const double rate = was ? beta : alpha;
      pr *= flip ? rate : 1.0 - rate;
      present[p] = was != flip;
    }
    auto lost = [&](std::array<Vertex, 3> t) {
      return !is_chain(present[pair_index(t[0], t[1], 4)], present[pair_index(t[0], t[2], 4)],
                       present[pair_index(t[1], t[2], 4)]);
    };
    const bool a = lost(t1), b = lost(t2);
    e1 += pr * a;
    e2 += pr * b;
    e12 += pr * (a && b);
  }
  return e12 - e1 * e2;
}

// Exact law of c2(G_hat) - c2(G) when only edges are removed (alpha = 0),
// by enumerating every subset of the edges of a graph on at most 16 vertices.
DiscreteDist removal_law_exhaustive(const SparseGraph& g, double beta) {
  const auto m = g.n_edges();
  const auto n = g.n_vertices();
  auto c2_of = [&](std::uint32_t keep) {
    std::vector<std::uint16_t> adj(n, 0);
    for (std::uint64_t e = 0; e < m; ++e)
      if ((keep >> e) & 1) {
        const auto [u, v] = g.edges()[e];
        adj[u] |= static_cast<std::uint16_t>(1u << v);
        adj[v] |= static_cast<std::uint16_t>(1u << u);
      }
    std::int64_t w = 0, t3 = 0;
    for (std::size_t v = 0; v < n; ++v) {
      const int d = std::popcount(adj[v]);
      w += d * (d - 1) / 2;
      for (std::size_t u = v + 1; u < n; ++u)
        if ((adj[v] >> u) & 1) t3 += std::popcount(static_cast<std::uint16_t>(adj[v] & adj[u]));
    }
    return w - t3;  // each triangle seen three times above, so w - 3t = w - t3
  };
  const std::int64_t base = c2_of((1u << m) - 1);
  std::map<std::int64_t, double> mass;
  for (std::uint32_t keep = 0; keep < (1u << m); ++keep) {
    const int removed = static_cast<int>(m) - std::popcount(keep);
    mass[c2_of(keep) - base] += std::pow(beta, removed) * std::pow(1 - beta, static_cast<int>(m) - removed);
  }
  std::vector<double> v;
  const std::int64_t lo = mass.begin()->first;
  for (std::int64_t k = lo; k <= mass.rbegin()->first; ++k) v.push_back(mass.count(k) ? mass[k] : 0.0);
  return DiscreteDist(lo, v);
}

SparseGraph sparse_er(std::uint64_t n, std::uint64_t seed) {
  return erdos_renyi(n, std::log(static_cast<double>(n)) / static_cast<double>(n), seed);
}

std::uint64_t edges_for(std::uint64_t n) {
  return static_cast<std::uint64_t>(std::llround(static_cast<double>(n) * std::log(static_cast<double>(n))));
}

}  // namespace

TEST_SUITE("discrepancy") {
  TEST_CASE("exact edge discrepancy: small cases") {
    const auto d = edge_discrepancy_exact(1, 1, 0.5, 0.5);
    CHECK(d.support_min() == -1);
    CHECK(d.support_max() == 1);
    CHECK(d.pmf(-1) == 0.25);
    CHECK(d.pmf(0) == 0.5);
    CHECK(d.pmf(1) == 0.25);
    const auto z = edge_discrepancy_exact(30, 7, 0.0, 0.0);
    CHECK(z.pmf(0) == 1.0);
    CHECK(z.support_min() == 0);
    CHECK(z.support_max() == 0);
  }

  TEST_CASE("exact edge discrepancy: binomial moments") {
    const double lambda = 7.0;
    const std::uint64_t n0 = 1'000'000, n1 = 1000;
    const double a = lambda / n0, b = lambda / n1;
    const auto d = edge_discrepancy_exact(n0, n1, a, b);
    CHECK(std::fabs(d.mean()) < 1e-9);
    const double var = a * (1 - a) * n0 + b * (1 - b) * n1;
    CHECK(std::fabs(d.variance() - var) <= 1e-9 * var);
    const auto p = poisson_dist(4.0);
    CHECK(p.mean() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(p.variance() == doctest::Approx(4.0).epsilon(1e-12));
    const auto bn = binomial_dist(50, 0.2);
    CHECK(bn.mean() == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(bn.variance() == doctest::Approx(8.0).epsilon(1e-12));
  }

  TEST_CASE("Skellam reference with vanishing intensities") {
    CHECK(skellam_reference(0.0, 0.0).pmf(0) == 1.0);
    const auto r = skellam_reference(2.0, 0.0);
    CHECK(r.mean() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.pmf(-1) == 0.0);
    const auto s = skellam_reference(2.0, 3.0);
    CHECK(s.variance() == doctest::Approx(5.0).epsilon(1e-9));
  }

  TEST_CASE("Skellam and normal approximations across regimes at n_v = 1000") {
    const std::uint64_t n = 1000, e = edges_for(n), n0 = pair_count(n) - e;
    const auto cst = edge_ks_pair(n0, e, lambda_for_law("constant", n));
    const auto lg = edge_ks_pair(n0, e, lambda_for_law("log", n));
    const auto sq = edge_ks_pair(n0, e, lambda_for_law("sqrt", n));
    const auto lin = edge_ks_pair(n0, e, lambda_for_law("linear", n));
    CHECK(cst.ks_skellam < cst.ks_normal);
    CHECK(lg.ks_skellam < lg.ks_normal);
    CHECK(sq.ks_skellam < sq.ks_normal / 10);
    CHECK(lin.ks_normal < lin.ks_skellam);
    // log n_v and the constant law land close together at this size.
    CHECK(lg.ks_skellam / cst.ks_skellam > 0.5);
    CHECK(lg.ks_skellam / cst.ks_skellam < 2.0);
    CHECK_THROWS_AS(edge_ks_pair(10, 10, 11.0), InfeasibleError);
  }

  TEST_CASE("closed-form bounds") {
    CHECK(skellam_upper_bound_edges(10, 10, 0.0) == 0.0);
    CHECK(skellam_upper_bound_edges(10, 10, 2.0) == doctest::Approx(9.0 / 35).epsilon(1e-14));
    CHECK(normal_upper_bound_edges(0.5, 0.5, 8) == doctest::Approx(3.5).epsilon(1e-14));
    const double lambda = 3.0;
    const std::uint64_t n0 = 1'000'000'000;
    CHECK(normal_upper_bound_edges(lambda / n0, 0.0, n0) == doctest::Approx(7.0 / std::sqrt(2 * lambda)).epsilon(1e-8));
  }

  TEST_CASE("bounds dominate the exact distances on 50 configurations") {
    const char* laws[] = {"constant", "log", "sqrt", "linear"};
    const std::uint64_t sizes[] = {100, 1000, 10000};
    Rng rng(50);
    for (int c = 0; c < 50; ++c) {
      const std::uint64_t n = sizes[c % 3];
      const char* law = laws[(c / 3) % 4];
      const double edge_scale = 0.5 + rng.uniform();
      const std::uint64_t e = static_cast<std::uint64_t>(std::llround(edge_scale * n * std::log(double(n))));
      const std::uint64_t n0 = pair_count(n) - e;
      const double lambda = std::min(lambda_for_law(law, n) * (0.5 + rng.uniform()), 0.9 * static_cast<double>(e));
      const auto r = edge_ks_pair(n0, e, lambda);
      CAPTURE(n);
      CAPTURE(law);
      CHECK(r.ks_skellam <= skellam_upper_bound_edges(n, e, lambda));
      CHECK(r.ks_normal <= normal_upper_bound_edges(r.alpha, r.beta, n0));
    }
  }

  TEST_CASE("Skellam bound decays like 1 / (n_v log n_v) at constant lambda") {
    std::vector<double> scaled;
    for (std::uint64_t n : {100u, 1000u, 10000u}) {
      const double b = skellam_upper_bound_edges(n, edges_for(n), lambda_for_law("constant", n));
      scaled.push_back(b * n * std::log(static_cast<double>(n)));
    }
    const double ref = scaled[1];
    for (double s : scaled) CHECK(std::fabs(s / ref - 1.0) <= 0.2);
  }

  TEST_CASE("Monte Carlo with no noise is a point mass") {
    const auto g = sparse_er(100, 1);
    for (Motif m : {Motif::Edge, Motif::TwoChain}) {
      const auto s = mc_discrepancy(g, NoiseSpec{}, m, 500, 3);
      CHECK(s.dist.pmf(0) == 1.0);
      CHECK(s.mean == 0.0);
      CHECK(s.variance == 0.0);
    }
  }

  TEST_CASE("Monte Carlo edge discrepancy is centred") {
    const auto g = sparse_er(200, 7);
    const auto spec = calibrate_independent(g, 3.0);
    const auto s = mc_discrepancy(g, spec, Motif::Edge, 100000, 21);
    CHECK(std::fabs(s.mean) <= 4 * s.sigma / std::sqrt(1e5));
    CHECK(s.sigma == doctest::Approx(std::sqrt(spec.alpha * (1 - spec.alpha) * g.n_nonedges() +
                                              spec.beta * (1 - spec.beta) * g.n_edges())));
    CHECK(s.variance == doctest::Approx(s.sigma * s.sigma).epsilon(0.03));
  }

  TEST_CASE("Monte Carlo two-chain mean matches lambda1 - lambda2") {
    const auto g = sparse_er(200, 7);
    const auto spec = calibrate_independent(g, 3.0);
    const auto s = mc_discrepancy(g, spec, Motif::TwoChain, 100000, 22);
    const auto l = chain_lambdas(g, spec.alpha, spec.beta);
    CHECK(s.lambda1 == l.lambda1);
    CHECK(s.lambda2 == l.lambda2);
    CHECK(std::fabs(s.mean - (l.lambda1 - l.lambda2)) <= 4 * std::sqrt(s.variance / 1e5));
    CHECK(std::isnan(s.sigma));
  }

  TEST_CASE("parallel Monte Carlo equals the serial recount") {
    const auto g = sparse_er(150, 4);
    const auto spec = calibrate_independent(g, 4.0);
    for (Motif m : {Motif::Edge, Motif::TwoChain}) {
      const auto a = mc_discrepancy(g, spec, m, 3000, 5);
      const auto b = mc_discrepancy_serial(g, spec, m, 3000, 5);
      CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-13));
      CHECK(a.variance == doctest::Approx(b.variance).epsilon(1e-12));
      CHECK(ks_distance(a.dist, b.dist) == 0.0);
    }
  }

  TEST_CASE("Monte Carlo does not depend on the thread count") {
    const auto g = sparse_er(300, 9);
    const auto spec = calibrate_independent(g, 3.0);
    const int saved = omp_get_max_threads();
    std::vector<DiscrepancySummary> runs;
    for (int t : {1, 4, 8}) {
      omp_set_num_threads(t);
      runs.push_back(mc_discrepancy(g, spec, Motif::TwoChain, 20000, 77));
    }
    omp_set_num_threads(saved);
    for (const auto& r : runs) {
      CHECK(r.mean == runs[0].mean);
      CHECK(r.variance == runs[0].variance);
      CHECK(std::equal(r.dist.masses().begin(), r.dist.masses().end(), runs[0].dist.masses().begin(),
                       runs[0].dist.masses().end()));
      CHECK(r.dist.support_min() == runs[0].dist.support_min());
    }
  }

  TEST_CASE("two-chain law with removals only matches exhaustive enumeration") {
    SparseGraph g;
    for (std::uint64_t seed = 0;; ++seed) {
      g = erdos_renyi(12, 0.25, seed);
      if (g.n_edges() >= 14 && g.n_edges() <= 18) break;
    }
    NoiseSpec spec;
    spec.beta = 0.3;
    const auto exact = removal_law_exhaustive(g, spec.beta);
    const auto mc = mc_discrepancy(g, spec, Motif::TwoChain, 1'000'000, 12);
    CHECK(ks_distance(mc.dist, exact) < 0.01);
    CHECK(mc.lambda1 - mc.lambda2 == doctest::Approx(exact.mean()).epsilon(1e-10));
  }

  TEST_CASE("chain lambdas on tiny graphs") {
    const double a = 0.1, b = 0.2;
    const SparseGraph path(3, {{0, 1}, {1, 2}});
    const auto lp = chain_lambdas_leading(triple_census(path), a, b);
    CHECK(lp.lambda1 == 0.0);
    CHECK(lp.lambda2 == doctest::Approx(1 - (1 - b) * (1 - b)));
    const SparseGraph one(3, {{0, 1}});
    const auto lo = chain_lambdas_leading(triple_census(one), a, b);
    CHECK(lo.lambda1 == doctest::Approx((1 - b) * a));
    CHECK(lo.lambda2 == 0.0);
    // Exact forms include every route into and out of a chain.
    const auto ep = chain_lambdas(path, a, b);
    const auto bp = lambdas_by_triples(path, a, b);
    CHECK(ep.lambda1 == doctest::Approx(bp.lambda1).epsilon(1e-14));
    CHECK(ep.lambda2 == doctest::Approx(bp.lambda2).epsilon(1e-14));
    const auto pr = chain_probabilities(a, b);
    CHECK(pr.p0 == doctest::Approx(3 * a * a * (1 - a)));
    CHECK(pr.p3 == doctest::Approx(3 * b * (1 - b) * (1 - b)));
  }

  TEST_CASE("chain lambdas against per-triple enumeration") {
    Rng rng(8);
    for (int t = 0; t < 60; ++t) {
      const std::uint64_t n = 3 + rng.below(28);
      const auto g = erdos_renyi(n, rng.uniform() * 0.7, 500 + t);
      const double a = rng.uniform() * 0.3, b = rng.uniform() * 0.5;
      const auto got = chain_lambdas(g, a, b);
      const auto want = lambdas_by_triples(g, a, b);
      CHECK(std::fabs(got.lambda1 - want.lambda1) <= 1e-12 * std::max(1.0, want.lambda1));
      CHECK(std::fabs(got.lambda2 - want.lambda2) <= 1e-12 * std::max(1.0, want.lambda2));
    }
  }

  TEST_CASE("intensity ratio in the sparse regime") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto g = sparse_er(4096, seed);
      const auto spec = calibrate_independent(g, 3.0);
      const auto l = chain_lambdas(g, spec.alpha, spec.beta);
      const double ratio = l.lambda1 / l.lambda2;
      CHECK(ratio >= 0.8);
      CHECK(ratio <= 1.25);
    }
  }

  TEST_CASE("quoted chain covariance") {
    CHECK(chain_cov_mm(0.0) == 0.0);
    CHECK(chain_cov_mm(1.0) == 0.0);
    CHECK(chain_cov_mm(0.1) == doctest::Approx(0.23490).epsilon(1e-12));
  }

  TEST_CASE("exact pair covariances against four-vertex enumeration") {
    for (auto [a, b] : {std::pair{0.0, 0.1}, {0.05, 0.3}, {0.2, 0.6}}) {
      // Path 0-1-2-3: chains {0,1,2} and {1,2,3} share the edge 12.
      const double shared_edge = cov_by_enumeration({{0, 1}, {1, 2}, {2, 3}}, {0, 1, 2}, {1, 2, 3}, a, b);
      CHECK(chain_cov_mm_shared_edge(a, b) == doctest::Approx(shared_edge).epsilon(1e-13));
      // Edges 01, 12, 03, 23: chains {0,1,2} and {0,2,3} share the nonedge 02.
      const double shared_non =
          cov_by_enumeration({{0, 1}, {1, 2}, {0, 3}, {2, 3}}, {0, 1, 2}, {0, 2, 3}, a, b);
      CHECK(chain_cov_mm_shared_nonedge(a, b) == doctest::Approx(shared_non).epsilon(1e-13));
    }
    CHECK(chain_cov_mm_shared_edge(0.0, 0.1) == doctest::Approx(0.1 * std::pow(0.9, 3)).epsilon(1e-13));
  }

  TEST_CASE("bound report: degenerate inputs") {
    const auto g = sparse_er(100, 2);
    const auto r = chain_bound_report(g, 0.0, 0.0, 0.5);
    CHECK(r.sum_p2 == 0.0);
    CHECK(r.sum_q2 == 0.0);
    CHECK(r.cov_mm_term == 0.0);
    CHECK(r.cov_mm_exact_term == 0.0);
    CHECK(r.product_term == 0.0);
    CHECK(r.total == 0.0);
    const auto e = chain_bound_report(SparseGraph(30, {}), 0.01, 0.2, 0.5);
    CHECK(e.sum_q2 == 0.0);
    CHECK(e.cov_mm_term == 0.0);
    CHECK(e.cov_mm_exact_term == 0.0);
    CHECK(e.sum_p2 > 0.0);
  }

  TEST_CASE("bound report: term bookkeeping") {
    const auto g = sparse_er(200, 3);
    const auto spec = calibrate_independent(g, 3.0);
    const double df = delta_f_sup(SkellamParams(3, 3)).value;
    const auto r = chain_bound_report(g, spec.alpha, spec.beta, df);
    CHECK(r.census == triple_census(g));
    CHECK(r.three_paths == count_three_paths(g));
    CHECK(r.cov_mm_term == doctest::Approx(2.0 * r.three_paths * chain_cov_mm(spec.beta)));
    const auto pr = chain_probabilities(spec.alpha, spec.beta);
    CHECK(r.sum_q2 == doctest::Approx(r.census.c2 * pr.q2 * pr.q2));
    CHECK(r.total == doctest::Approx(df * (r.sum_p2 + r.sum_q2 + r.cov_mm_term)));
    CHECK(r.total_exact_cov == doctest::Approx(df * (r.sum_p2 + r.sum_q2 + r.cov_mm_exact_term)));
    CHECK_FALSE(r.caveat.empty());
  }

  TEST_CASE("exact covariance term matches a Monte Carlo estimate") {
    // 2 sum Cov(M_k, M_l) = Var(T2) - sum q(1 - q), T2 = number of lost chains.
    const auto g = sparse_er(200, 3);
    const auto spec = calibrate_independent(g, 3.0);
    const auto r = chain_bound_report(g, spec.alpha, spec.beta, 1.0);
    std::vector<std::array<Vertex, 3>> chains;
    const auto n = static_cast<Vertex>(g.n_vertices());
    for (Vertex v = 0; v < n; ++v) {
      const auto nb = g.neighbors(v);
      for (std::size_t i = 0; i < nb.size(); ++i)
        for (std::size_t j = i + 1; j < nb.size(); ++j)
          if (!g.has_edge(nb[i], nb[j])) chains.push_back({nb[i], v, nb[j]});
    }
    REQUIRE(chains.size() == r.census.c2);
    const NoiseModel model(g, spec);
    const int trials = 20000;
    std::vector<double> t2(trials);
    for (int t = 0; t < trials; ++t) {
      Rng rng(derive_seed(404, t));
      const auto h = apply_flips(g, model.sample(rng));
      int lost = 0;
      for (const auto& c : chains) lost += !is_chain(h.has_edge(c[0], c[1]), h.has_edge(c[1], c[2]), h.has_edge(c[0], c[2]));
      t2[t] = lost;
    }
    double m = 0.0;
    for (double x : t2) m += x;
    m /= trials;
    double m2 = 0.0, m4 = 0.0;
    for (double x : t2) {
      m2 += (x - m) * (x - m);
      m4 += std::pow(x - m, 4);
    }
    m2 /= trials;
    m4 /= trials;
    const double var = m2 * trials / (trials - 1);
    const double se = std::sqrt((m4 - m2 * m2) / trials);
    const double q = chain_probabilities(spec.alpha, spec.beta).q2;
    const double mc_term = var - r.census.c2 * q * (1 - q);
    CHECK(std::fabs(mc_term - r.cov_mm_exact_term) <= 3 * se);
  }
}
