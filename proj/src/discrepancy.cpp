#include "skellamnet/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "skellamnet/comb.hpp"
#include "skellamnet/errors.hpp"
#include "skellamnet/ks.hpp"
#include "skellamnet/rng.hpp"
#include "skellamnet/skellam.hpp"

namespace skellamnet {
namespace {

constexpr std::int64_t kMaxPoints = 1'000'000;

void check_prob(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

DiscreteDist binomial_dist(std::uint64_t n, double p) {
  check_prob(p, "binomial_dist: p");
  const CombDist d(n, p, 1.0);
  if (d.windows().front().size() > kMaxPoints) {
    throw DomainError("binomial_dist: support window exceeds 1e6 points");
  }
  return d.to_dist();
}

DiscreteDist poisson_dist(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("poisson_dist: mean must be >= 0");
  if (mean == 0.0) return DiscreteDist::point_mass(0);
  const auto hi = static_cast<std::int64_t>(std::ceil(mean + 12.0 * std::sqrt(mean) + 40.0));
  std::vector<double> m(static_cast<std::size_t>(hi + 1));
  const double lm = std::log(mean);
  double total = 0.0;
  for (std::int64_t k = 0; k <= hi; ++k) {
    m[static_cast<std::size_t>(k)] = std::exp(static_cast<double>(k) * lm - mean - std::lgamma(static_cast<double>(k) + 1.0));
    total += m[static_cast<std::size_t>(k)];
  }
  if (total > 1.0) for (auto& v : m) v /= total;
  return DiscreteDist(0, std::move(m));
}

DiscreteDist edge_discrepancy_exact(std::uint64_t n0, std::uint64_t n1, double alpha, double beta) {
  check_prob(alpha, "edge_discrepancy_exact: alpha");
  check_prob(beta, "edge_discrepancy_exact: beta");
  const DiscreteDist x = binomial_dist(n0, alpha);
  const DiscreteDist y = binomial_dist(n1, beta);
  const std::int64_t points = (x.support_max() - x.support_min()) + (y.support_max() - y.support_min()) + 1;
  if (points > kMaxPoints) throw DomainError("edge_discrepancy_exact: support exceeds 1e6 points");
  return difference(x, y);
}

DiscreteDist skellam_reference(double lambda1, double lambda2) {
  if (lambda1 > 0.0 && lambda2 > 0.0) return SkellamTable::truncated(SkellamParams(lambda1, lambda2)).to_dist();
  return difference(poisson_dist(lambda1), poisson_dist(lambda2));
}

EdgeKsPair edge_ks_pair(std::uint64_t n0, std::uint64_t n1, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("edge_ks_pair: lambda must be positive");
  if (lambda > static_cast<double>(n0) || lambda > static_cast<double>(n1)) {
    throw InfeasibleError("edge_ks_pair: lambda = " + std::to_string(lambda) + " exceeds N0 = " +
                          std::to_string(n0) + " or N1 = " + std::to_string(n1));
  }
  EdgeKsPair r;
  r.alpha = lambda / static_cast<double>(n0);
  r.beta = lambda / static_cast<double>(n1);
  r.sigma = std::sqrt(r.alpha * (1.0 - r.alpha) * static_cast<double>(n0) +
                      r.beta * (1.0 - r.beta) * static_cast<double>(n1));
  const DiscreteDist d = edge_discrepancy_exact(n0, n1, r.alpha, r.beta);
  r.ks_skellam = ks_distance(d, skellam_reference(lambda, lambda));
  const double s = r.sigma;
  r.ks_normal = ks_distance(d, [s](double k) { return normal_cdf(k / s); });
  return r;
}

double skellam_upper_bound_edges(std::uint64_t n_v, std::uint64_t e_size, double lambda) {
  if (lambda == 0.0) return 0.0;
  const std::uint64_t pairs = pair_count(n_v);
  if (e_size == 0 || e_size >= pairs) throw DomainError("skellam_upper_bound_edges: need 0 < |E| < binom(n_v, 2)");
  const double alpha = lambda / static_cast<double>(pairs - e_size);
  return static_cast<double>(pairs) * alpha / static_cast<double>(e_size);
}

double normal_upper_bound_edges(double alpha, double beta, std::uint64_t n0) {
  if (!(alpha + beta < 2.0)) throw DomainError("normal_upper_bound_edges: need alpha + beta < 2");
  return 7.0 / (std::sqrt(2.0 - (alpha + beta)) * std::sqrt(alpha * static_cast<double>(n0)));
}

ChainProbabilities chain_probabilities(double alpha, double beta) {
  const double a = alpha, b = beta;
  return {3.0 * a * a * (1.0 - a),
          2.0 * a * (1.0 - a) * (1.0 - b) + b * a * a,
          3.0 * b * (1.0 - b) * (1.0 - b),
          1.0 - (1.0 - b) * (1.0 - b) * (1.0 - a) - 2.0 * a * b * (1.0 - b)};
}

ChainLambdas chain_lambdas(const TripleCensus& c, double alpha, double beta) {
  check_prob(alpha, "chain_lambdas: alpha");
  check_prob(beta, "chain_lambdas: beta");
  const ChainProbabilities p = chain_probabilities(alpha, beta);
  return {static_cast<double>(c.c0) * p.p0 + static_cast<double>(c.c1) * p.p1 + static_cast<double>(c.c3) * p.p3,
          static_cast<double>(c.c2) * p.q2};
}

ChainLambdas chain_lambdas(const SparseGraph& g, double alpha, double beta) {
  return chain_lambdas(triple_census(g), alpha, beta);
}

ChainLambdas chain_lambdas_leading(const TripleCensus& c, double alpha, double beta) {
  return {static_cast<double>(c.c0) * alpha * alpha + static_cast<double>(c.c1) * (1.0 - beta) * alpha,
          static_cast<double>(c.c2) * (1.0 - (1.0 - beta) * (1.0 - beta))};
}

double chain_cov_mm(double beta) {
  check_prob(beta, "chain_cov_mm: beta");
  return beta * (3.0 - beta) * (1.0 - beta) * (1.0 - beta);
}

namespace {

// Pairs 0..4: shared pair, then two more for each chain.
double overlap_cov(const int (&present)[5], double alpha, double beta) {
  double e1 = 0.0, e2 = 0.0, e12 = 0.0;
  for (int mask = 0; mask < 32; ++mask) {
    double pr = 1.0;
    int after[5];
    for (int i = 0; i < 5; ++i) {
      const bool flip = (mask >> i) & 1;
      const double r = present[i] ? beta : alpha;
      pr *= flip ? r : 1.0 - r;
      after[i] = present[i] ^ static_cast<int>(flip);
    }
    const bool m1 = after[0] + after[1] + after[2] != 2;
    const bool m2 = after[0] + after[3] + after[4] != 2;
    e1 += m1 ? pr : 0.0;
    e2 += m2 ? pr : 0.0;
    e12 += (m1 && m2) ? pr : 0.0;
  }
  return e12 - e1 * e2;
}

}  // namespace

double chain_cov_mm_shared_edge(double alpha, double beta) {
  static constexpr int kPresent[5] = {1, 1, 0, 1, 0};
  return overlap_cov(kPresent, alpha, beta);
}

double chain_cov_mm_shared_nonedge(double alpha, double beta) {
  static constexpr int kPresent[5] = {0, 1, 1, 1, 1};
  return overlap_cov(kPresent, alpha, beta);
}

namespace {

std::uint64_t common_neighbors(const SparseGraph& g, Vertex u, Vertex v) {
  const auto a = g.neighbors(u), b = g.neighbors(v);
  std::uint64_t c = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else { ++c; ++i; ++j; }
  }
  return c;
}

std::uint64_t choose2(std::uint64_t m) { return m < 2 ? 0 : m * (m - 1) / 2; }

}  // namespace

ChainBoundReport chain_bound_report(const SparseGraph& g, double alpha, double beta, double delta_f) {
  check_prob(alpha, "chain_bound_report: alpha");
  check_prob(beta, "chain_bound_report: beta");
  ChainBoundReport r;
  r.census = triple_census(g);
  r.three_paths = count_three_paths(g);
  r.delta_f = delta_f;

  for (const auto& [u, v] : g.edges()) {
    const std::uint64_t cn = common_neighbors(g, u, v);
    r.pairs_shared_edge += choose2((g.degree(u) - 1 - cn) + (g.degree(v) - 1 - cn));
  }
  std::unordered_map<std::uint64_t, std::uint64_t> wedge_ends;
  for (Vertex w = 0; w < g.n_vertices(); ++w) {
    const auto nb = g.neighbors(w);
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j)
        if (!g.has_edge(nb[i], nb[j])) ++wedge_ends[pair_index(nb[i], nb[j], g.n_vertices())];
  }
  for (const auto& [p, cnt] : wedge_ends) r.pairs_shared_nonedge += choose2(cnt);

  const ChainProbabilities pr = chain_probabilities(alpha, beta);
  const auto& c = r.census;
  r.sum_p2 = static_cast<double>(c.c0) * pr.p0 * pr.p0 + static_cast<double>(c.c1) * pr.p1 * pr.p1 +
             static_cast<double>(c.c3) * pr.p3 * pr.p3;
  r.sum_q2 = static_cast<double>(c.c2) * pr.q2 * pr.q2;
  const ChainLambdas lam = chain_lambdas(c, alpha, beta);
  r.product_term = (lam.lambda1 * lam.lambda1 - r.sum_p2) + (lam.lambda2 * lam.lambda2 - r.sum_q2) +
                   2.0 * lam.lambda1 * lam.lambda2;
  r.cov_mm_term = 2.0 * static_cast<double>(r.three_paths) * chain_cov_mm(beta);
  r.cov_mm_exact_term = 2.0 * (static_cast<double>(r.pairs_shared_edge) * chain_cov_mm_shared_edge(alpha, beta) +
                               static_cast<double>(r.pairs_shared_nonedge) * chain_cov_mm_shared_nonedge(alpha, beta));
  r.total = delta_f * (r.sum_p2 + r.sum_q2 + r.cov_mm_term);
  r.total_exact_cov = delta_f * (r.sum_p2 + r.sum_q2 + r.cov_mm_exact_term);
  r.caveat =
      "covariance-type bound assembled from sum p^2, sum q^2 and the Cov(M, M) term only; Cov(L, L), Cov(L, M) "
      "and the product terms are left out, and the bound is not expected to be tight for two-chain counts";
  return r;
}

namespace {

// g with a set of flipped pairs on top; answers the queries needed to
// update c2 one flip at a time.
class Overlay {
 public:
  explicit Overlay(const SparseGraph& g) : g_(g), n_(g.n_vertices()) {}

  void reset() {
    flipped_.clear();
    added_.clear();
    ddeg_.clear();
  }

  // Change in c2 caused by toggling pair p, which is then applied.
  std::int64_t flip(std::uint64_t p) {
    const auto [u, v] = pair_from_index(p, n_);
    const bool present = adjacent(u, v);
    const std::int64_t cn = common(u, v);
    const std::int64_t du = degree(u), dv = degree(v);
    const std::int64_t delta = present ? 3 * cn - du - dv + 2 : du + dv - 3 * cn;
    flipped_.insert(p);
    if (!g_.has_edge(u, v)) {
      added_[u].push_back(v);
      added_[v].push_back(u);
    }
    ddeg_[u] += present ? -1 : 1;
    ddeg_[v] += present ? -1 : 1;
    return delta;
  }

 private:
  bool adjacent(Vertex a, Vertex b) const {
    if (a == b) return false;
    return g_.has_edge(a, b) != (flipped_.count(pair_index(a, b, n_)) > 0);
  }
  std::int64_t degree(Vertex v) const {
    const auto it = ddeg_.find(v);
    return static_cast<std::int64_t>(g_.degree(v)) + (it == ddeg_.end() ? 0 : it->second);
  }
  std::int64_t common(Vertex u, Vertex v) const {
    if (degree(u) > degree(v)) std::swap(u, v);
    std::int64_t c = 0;
    for (Vertex w : g_.neighbors(u)) {
      if (w == v || flipped_.count(pair_index(u, w, n_))) continue;
      c += adjacent(v, w);
    }
    const auto it = added_.find(u);
    if (it != added_.end()) {
      for (Vertex w : it->second) {
        if (w != v) c += adjacent(v, w);
      }
    }
    return c;
  }

  const SparseGraph& g_;
  std::uint64_t n_;
  std::unordered_set<std::uint64_t> flipped_;
  std::unordered_map<Vertex, std::vector<Vertex>> added_;
  std::unordered_map<Vertex, std::int64_t> ddeg_;
};

void fill_summary(DiscrepancySummary& s, const NoiseModel& model, Motif motif,
                  const std::map<std::int64_t, std::uint64_t>& hist, std::uint64_t trials) {
  s.motif = motif;
  s.trials = trials;
  s.dist = DiscreteDist::from_counts(hist);
  double sum = 0.0;
  for (const auto& [k, c] : hist) sum += static_cast<double>(k) * static_cast<double>(c);
  s.mean = sum / static_cast<double>(trials);
  double ss = 0.0;
  for (const auto& [k, c] : hist) {
    const double d = static_cast<double>(k) - s.mean;
    ss += d * d * static_cast<double>(c);
  }
  s.variance = trials > 1 ? ss / static_cast<double>(trials - 1) : 0.0;

  const SparseGraph& g = model.graph();
  const NoiseSpec& spec = model.spec();
  if (motif == Motif::Edge) {
    s.lambda1 = model.expected_additions();
    s.lambda2 = model.expected_removals();
    double var = 0.0;
    if (spec.kind == NoiseKind::Comb) {
      var = CombDist(g.n_nonedges(), spec.comb->pi1, spec.comb->nu1).variance() +
            CombDist(g.n_edges(), spec.comb->pi2, spec.comb->nu2).variance();
    } else {
      auto pv = [](double p) { return p * (1.0 - p); };
      var = pv(spec.alpha) * static_cast<double>(g.n_nonedges() - spec.alpha_overrides.size()) +
            pv(spec.beta) * static_cast<double>(g.n_edges() - spec.beta_overrides.size());
      for (const auto& [p, a] : spec.alpha_overrides) var += pv(a);
      for (const auto& [p, b] : spec.beta_overrides) var += pv(b);
    }
    s.sigma = std::sqrt(var);
  } else {
    // Comb noise uses the marginal per-pair rates E[T1]/|E^c| and E[T2]/|E|.
    double a = spec.alpha, b = spec.beta;
    if (spec.kind == NoiseKind::Comb) {
      a = g.n_nonedges() ? model.expected_additions() / static_cast<double>(g.n_nonedges()) : 0.0;
      b = g.n_edges() ? model.expected_removals() / static_cast<double>(g.n_edges()) : 0.0;
    }
    const ChainLambdas lam = chain_lambdas(g, a, b);
    s.lambda1 = lam.lambda1;
    s.lambda2 = lam.lambda2;
    s.sigma = std::numeric_limits<double>::quiet_NaN();
  }
}

void check_trials(std::uint64_t trials) {
  if (trials == 0) throw DomainError("mc_discrepancy: trials must be >= 1");
}

}  // namespace

DiscrepancySummary mc_discrepancy(const SparseGraph& g, const NoiseSpec& spec, Motif motif,
                                  std::uint64_t trials, std::uint64_t seed) {
  check_trials(trials);
  const NoiseModel model(g, spec);
  std::map<std::int64_t, std::uint64_t> hist;
  const auto count = static_cast<std::int64_t>(trials);
#pragma omp parallel
  {
    std::map<std::int64_t, std::uint64_t> local;
    Overlay overlay(g);
#pragma omp for schedule(dynamic, 256) nowait
    for (std::int64_t t = 0; t < count; ++t) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
      const Flips f = model.sample(rng);
      std::int64_t d = 0;
      if (motif == Motif::Edge) {
        d = static_cast<std::int64_t>(f.added.size()) - static_cast<std::int64_t>(f.removed.size());
      } else {
        overlay.reset();
        for (std::uint64_t p : f.added) d += overlay.flip(p);
        for (std::uint64_t p : f.removed) d += overlay.flip(p);
      }
      ++local[d];
    }
#pragma omp critical(skellamnet_mc_merge)
    for (const auto& [k, c] : local) hist[k] += c;
  }
  DiscrepancySummary s;
  fill_summary(s, model, motif, hist, trials);
  return s;
}

DiscrepancySummary mc_discrepancy_serial(const SparseGraph& g, const NoiseSpec& spec, Motif motif,
                                         std::uint64_t trials, std::uint64_t seed) {
  check_trials(trials);
  const NoiseModel model(g, spec);
  auto c2_of = [](const SparseGraph& h) {
    return static_cast<std::int64_t>(count_two_paths(h)) - 3 * static_cast<std::int64_t>(count_triangles_serial(h));
  };
  const std::int64_t base = motif == Motif::Edge ? static_cast<std::int64_t>(g.n_edges()) : c2_of(g);
  std::map<std::int64_t, std::uint64_t> hist;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    const SparseGraph h = apply_flips(g, model.sample(rng));
    const std::int64_t eta = motif == Motif::Edge ? static_cast<std::int64_t>(h.n_edges()) : c2_of(h);
    ++hist[eta - base];
  }
  DiscrepancySummary s;
  fill_summary(s, model, motif, hist, trials);
  return s;
}

}  // namespace skellamnet
