#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "skellamnet/comb.hpp"
#include "skellamnet/graph.hpp"
#include "skellamnet/rng.hpp"

namespace skellamnet {

enum class NoiseKind { Independent, Comb };

struct CombParams {
  double pi1 = 0.0;  // Type-I (additions over nonedges)
  double nu1 = 1.0;
  double pi2 = 0.0;  // Type-II (deletions over edges)
  double nu2 = 1.0;
};

// lambda = Theta(n_v^gamma log^kappa n_v).
struct RateLaw {
  double lambda = 0.0;
  double gamma = 0.0;
  double kappa = 0.0;
};

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Independent;
  double alpha = 0.0;  // per nonedge
  double beta = 0.0;   // per edge
  std::optional<CombParams> comb;
  RateLaw rate;
  // Per-pair rates (keyed by pair_index) replacing alpha / beta; Independent only.
  std::map<std::uint64_t, double> alpha_overrides;
  std::map<std::uint64_t, double> beta_overrides;
};

void to_json(nlohmann::json& j, const NoiseSpec& spec);
void from_json(const nlohmann::json& j, NoiseSpec& spec);

// alpha = lambda / |E^c|, beta = lambda / |E|. lambda = 0 gives the
// noiseless spec. InfeasibleError when lambda > |E| or lambda > |E^c|.
NoiseSpec calibrate_independent(const SparseGraph& g, double lambda);

// Comb kind with E[T1] = E[T2] = lambda.
NoiseSpec calibrate_comb_noise(const SparseGraph& g, double lambda, double nu1, double nu2);

// Pairs flipped by one draw of the error model, as pair indices, ascending.
struct Flips {
  std::vector<std::uint64_t> added;    // nonedges declared present
  std::vector<std::uint64_t> removed;  // edges declared absent
};

// Error model bound to one graph, with its lookups precomputed so repeated
// draws cost O(number of flips).
class NoiseModel {
 public:
  NoiseModel(const SparseGraph& g, const NoiseSpec& spec);

  Flips sample(Rng& rng) const;
  const SparseGraph& graph() const { return *g_; }
  const NoiseSpec& spec() const { return spec_; }

  // E[T1] and E[T2].
  double expected_additions() const;
  double expected_removals() const;

  // Pair index of the r-th nonedge in lexicographic order.
  std::uint64_t nonedge_at(std::uint64_t rank) const;

 private:
  void sample_independent(Rng& rng, Flips& out) const;
  void sample_comb(Rng& rng, Flips& out) const;

  const SparseGraph* g_;
  NoiseSpec spec_;
  std::vector<std::uint64_t> edge_idx_;
  std::vector<std::uint64_t> shifted_;  // edge_idx_[i] - i, nondecreasing
  std::optional<CombDist> t1_;
  std::optional<CombDist> t2_;
};

// Uniform k-subset of [0, n), partial Fisher-Yates on a sparse swap map.
std::vector<std::uint64_t> sample_subset(Rng& rng, std::uint64_t n, std::uint64_t k);

SparseGraph apply_flips(const SparseGraph& g, const Flips& flips);
SparseGraph apply_noise(const SparseGraph& g, const NoiseSpec& spec, std::uint64_t seed);

}  // namespace skellamnet
