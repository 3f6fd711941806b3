#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "skellamnet/discrete_dist.hpp"
#include "skellamnet/graph.hpp"
#include "skellamnet/noise.hpp"

namespace skellamnet {

// Binomial(n, p) masses over the window where they exceed 1e-18 of the mode.
DiscreteDist binomial_dist(std::uint64_t n, double p);
// Poisson(mean) masses over [0, mean + 12 sqrt(mean) + 40]; mean 0 is a point mass.
DiscreteDist poisson_dist(double mean);

// Law of Binomial(N0, alpha) - Binomial(N1, beta), exactly. Refuses windows
// beyond 1e6 points.
DiscreteDist edge_discrepancy_exact(std::uint64_t n0, std::uint64_t n1, double alpha, double beta);

// Skellam(lambda1, lambda2) table; a zero intensity degenerates to a Poisson
// difference (both zero: point mass at 0).
DiscreteDist skellam_reference(double lambda1, double lambda2);

struct EdgeKsPair {
  double alpha = 0.0;
  double beta = 0.0;
  double sigma = 0.0;
  double ks_skellam = 0.0;  // KS(D_E, Skellam(lambda, lambda))
  double ks_normal = 0.0;   // KS(D_E / sigma, N(0, 1))
};

// Exact D_E for alpha = lambda / N0, beta = lambda / N1, compared with both
// approximations. InfeasibleError when lambda > N0 or lambda > N1.
EdgeKsPair edge_ks_pair(std::uint64_t n0, std::uint64_t n1, double lambda);

// binom(n_v, 2) alpha / |E| with alpha = lambda / |E^c|.
double skellam_upper_bound_edges(std::uint64_t n_v, std::uint64_t e_size, double lambda);

// 7 / (sqrt(2 - alpha - beta) sqrt(alpha N0)).
double normal_upper_bound_edges(double alpha, double beta, std::uint64_t n0);

enum class Motif { Edge, TwoChain };

struct DiscrepancySummary {
  Motif motif = Motif::Edge;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  // sqrt(Var D_E) under independent noise; NaN for two-chains.
  double sigma = 0.0;
  DiscreteDist dist = DiscreteDist::point_mass(0);
  std::uint64_t trials = 0;
  double mean = 0.0;      // sample mean
  double variance = 0.0;  // unbiased sample variance
};

// Monte Carlo law of eta(G_hat) - eta(G), eta = |E| or c2 (induced two-edge
// triples). Trial t draws its flips from Rng(derive_seed(seed, t)); trials run
// in parallel, two-chain changes are accumulated flip by flip on an overlay of
// g, and per-thread histograms are merged, so the result does not depend on
// the thread count.
DiscrepancySummary mc_discrepancy(const SparseGraph& g, const NoiseSpec& spec, Motif motif,
                                  std::uint64_t trials, std::uint64_t seed);
// Serial reference: materializes every G_hat and recounts from scratch.
DiscrepancySummary mc_discrepancy_serial(const SparseGraph& g, const NoiseSpec& spec, Motif motif,
                                         std::uint64_t trials, std::uint64_t seed);

// Per-triple probabilities of the two-chain indicators under independent
// errors: L (a non-chain becomes a chain) and M (a chain stops being one).
struct ChainProbabilities {
  double p0;  // triple with no edges
  double p1;  // triple with one edge
  double p3;  // triangle
  double q2;  // two-edge triple
};
ChainProbabilities chain_probabilities(double alpha, double beta);

struct ChainLambdas {
  double lambda1;
  double lambda2;
};

// lambda1 = c0 p0 + c1 p1 + c3 p3 and lambda2 = c2 q2, so that
// lambda1 - lambda2 = E[c2(G_hat) - c2(G)] exactly.
ChainLambdas chain_lambdas(const SparseGraph& g, double alpha, double beta);
ChainLambdas chain_lambdas(const TripleCensus& census, double alpha, double beta);
// First-order form c0 alpha^2 + c1 (1 - beta) alpha and c2 [1 - (1 - beta)^2].
ChainLambdas chain_lambdas_leading(const TripleCensus& census, double alpha, double beta);

// Closed form beta (3 - beta) (1 - beta)^2 quoted for Cov(M_ijk, M_jkl).
double chain_cov_mm(double beta);

// Exact Cov(M, M') for two chains sharing one vertex pair, by enumerating
// the 2^5 error patterns on the five pairs involved.
double chain_cov_mm_shared_edge(double alpha, double beta);
double chain_cov_mm_shared_nonedge(double alpha, double beta);

struct ChainBoundReport {
  TripleCensus census;
  std::uint64_t three_paths = 0;
  std::uint64_t pairs_shared_edge = 0;     // chain pairs overlapping in an edge
  std::uint64_t pairs_shared_nonedge = 0;  // chain pairs overlapping in a nonedge
  double sum_p2 = 0.0;
  double sum_q2 = 0.0;
  double cov_mm_term = 0.0;        // 2 * three_paths * chain_cov_mm(beta)
  double cov_mm_exact_term = 0.0;  // 2 * sum of exact Cov(M, M') over overlapping chains
  double product_term = 0.0;       // 2[sum_{j<k} p_j p_k + sum_{l<k} q_l q_k + sum_{j,l} p_j q_l]
  double delta_f = 0.0;
  // delta_f (sum_p2 + sum_q2 + cov_mm_term); Cov(L, L) and Cov(L, M) are not included.
  double total = 0.0;
  double total_exact_cov = 0.0;  // same with cov_mm_exact_term
  std::string caveat;
};

ChainBoundReport chain_bound_report(const SparseGraph& g, double alpha, double beta, double delta_f);

}  // namespace skellamnet
