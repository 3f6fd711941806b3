#include "skellamnet/noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "skellamnet/errors.hpp"

namespace skellamnet {

void to_json(nlohmann::json& j, const NoiseSpec& spec) {
  j = nlohmann::json{{"kind", spec.kind == NoiseKind::Independent ? "independent" : "comb"},
                     {"alpha", spec.alpha},
                     {"beta", spec.beta},
                     {"rate_law", {{"lambda", spec.rate.lambda}, {"gamma", spec.rate.gamma}, {"kappa", spec.rate.kappa}}}};
  if (spec.comb) {
    j["comb"] = {{"pi1", spec.comb->pi1}, {"nu1", spec.comb->nu1}, {"pi2", spec.comb->pi2}, {"nu2", spec.comb->nu2}};
  }
  auto dump = [](const std::map<std::uint64_t, double>& m) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& [k, v] : m) a.push_back({k, v});
    return a;
  };
  if (!spec.alpha_overrides.empty()) j["alpha_overrides"] = dump(spec.alpha_overrides);
  if (!spec.beta_overrides.empty()) j["beta_overrides"] = dump(spec.beta_overrides);
}

void from_json(const nlohmann::json& j, NoiseSpec& spec) {
  spec = NoiseSpec{};
  const std::string kind = j.value("kind", "independent");
  if (kind == "independent") {
    spec.kind = NoiseKind::Independent;
  } else if (kind == "comb") {
    spec.kind = NoiseKind::Comb;
  } else {
    throw DomainError("noise spec: unknown kind '" + kind + "'");
  }
  spec.alpha = j.value("alpha", 0.0);
  spec.beta = j.value("beta", 0.0);
  if (j.contains("rate_law")) {
    const auto& r = j.at("rate_law");
    spec.rate = {r.value("lambda", 0.0), r.value("gamma", 0.0), r.value("kappa", 0.0)};
  }
  if (j.contains("comb")) {
    const auto& c = j.at("comb");
    spec.comb = CombParams{c.at("pi1").get<double>(), c.at("nu1").get<double>(), c.at("pi2").get<double>(),
                           c.at("nu2").get<double>()};
  }
  auto load = [](const nlohmann::json& a, std::map<std::uint64_t, double>& m) {
    for (const auto& e : a) m[e.at(0).get<std::uint64_t>()] = e.at(1).get<double>();
  };
  if (j.contains("alpha_overrides")) load(j.at("alpha_overrides"), spec.alpha_overrides);
  if (j.contains("beta_overrides")) load(j.at("beta_overrides"), spec.beta_overrides);
}

NoiseSpec calibrate_independent(const SparseGraph& g, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("calibrate_independent: lambda must be >= 0");
  const auto e = static_cast<double>(g.n_edges());
  const auto ec = static_cast<double>(g.n_nonedges());
  if (lambda > e || lambda > ec) {
    throw InfeasibleError("calibrate_independent: lambda = " + std::to_string(lambda) + " exceeds |E| = " +
                          std::to_string(g.n_edges()) + " or |E^c| = " + std::to_string(g.n_nonedges()));
  }
  NoiseSpec s;
  s.kind = NoiseKind::Independent;
  s.alpha = lambda == 0.0 ? 0.0 : lambda / ec;
  s.beta = lambda == 0.0 ? 0.0 : lambda / e;
  s.rate.lambda = lambda;
  return s;
}

NoiseSpec calibrate_comb_noise(const SparseGraph& g, double lambda, double nu1, double nu2) {
  const NoiseSpec ind = calibrate_independent(g, lambda);
  NoiseSpec s = ind;
  s.kind = NoiseKind::Comb;
  CombParams c{0.0, nu1, 0.0, nu2};
  if (lambda > 0.0) {
    if (lambda >= static_cast<double>(g.n_nonedges()) || lambda >= static_cast<double>(g.n_edges())) {
      throw InfeasibleError("calibrate_comb_noise: lambda must be below |E| and |E^c|");
    }
    c.pi1 = calibrate_comb(g.n_nonedges(), nu1, lambda).pi();
    c.pi2 = calibrate_comb(g.n_edges(), nu2, lambda).pi();
  }
  s.comb = c;
  return s;
}

std::vector<std::uint64_t> sample_subset(Rng& rng, std::uint64_t n, std::uint64_t k) {
  if (k > n) throw DomainError("sample_subset: k > n");
  std::unordered_map<std::uint64_t, std::uint64_t> swapped;
  swapped.reserve(static_cast<std::size_t>(2 * k));
  auto value_at = [&](std::uint64_t i) {
    const auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  std::vector<std::uint64_t> out(static_cast<std::size_t>(k));
  for (std::uint64_t i = 0; i < k; ++i) {
    const std::uint64_t j = i + rng.below(n - i);
    const std::uint64_t vi = value_at(i);
    const std::uint64_t vj = value_at(j);
    out[static_cast<std::size_t>(i)] = vj;
    swapped[j] = vi;
  }
  std::sort(out.begin(), out.end());
  return out;
}

NoiseModel::NoiseModel(const SparseGraph& g, const NoiseSpec& spec) : g_(&g), spec_(spec) {
  if (!(spec.alpha >= 0.0 && spec.alpha <= 1.0 && spec.beta >= 0.0 && spec.beta <= 1.0)) {
    throw DomainError("NoiseModel: alpha and beta must lie in [0, 1]");
  }
  edge_idx_ = g.edge_pair_indices();
  shifted_.resize(edge_idx_.size());
  for (std::size_t i = 0; i < edge_idx_.size(); ++i) shifted_[i] = edge_idx_[i] - i;
  for (const auto& [p, a] : spec.alpha_overrides) {
    if (std::binary_search(edge_idx_.begin(), edge_idx_.end(), p) || p >= pair_count(g.n_vertices()) ||
        !(a >= 0.0 && a <= 1.0)) {
      throw DomainError("NoiseModel: alpha override must name a nonedge with rate in [0, 1]");
    }
  }
  for (const auto& [p, b] : spec.beta_overrides) {
    if (!std::binary_search(edge_idx_.begin(), edge_idx_.end(), p) || !(b >= 0.0 && b <= 1.0)) {
      throw DomainError("NoiseModel: beta override must name an edge with rate in [0, 1]");
    }
  }
  if (spec.kind == NoiseKind::Comb) {
    if (!spec.comb) throw DomainError("NoiseModel: comb kind needs comb parameters");
    if (!spec.alpha_overrides.empty() || !spec.beta_overrides.empty()) {
      throw DomainError("NoiseModel: per-pair overrides apply to the independent kind only");
    }
    t1_.emplace(g.n_nonedges(), spec.comb->pi1, spec.comb->nu1);
    t2_.emplace(g.n_edges(), spec.comb->pi2, spec.comb->nu2);
  }
}

std::uint64_t NoiseModel::nonedge_at(std::uint64_t rank) const {
  // The r-th nonedge is r + (number of edges e_i with e_i - i <= r).
  const auto k = static_cast<std::uint64_t>(std::upper_bound(shifted_.begin(), shifted_.end(), rank) - shifted_.begin());
  return rank + k;
}

double NoiseModel::expected_additions() const {
  if (spec_.kind == NoiseKind::Comb) return t1_->mean();
  double s = spec_.alpha * static_cast<double>(g_->n_nonedges() - spec_.alpha_overrides.size());
  for (const auto& [p, a] : spec_.alpha_overrides) s += a;
  return s;
}

double NoiseModel::expected_removals() const {
  if (spec_.kind == NoiseKind::Comb) return t2_->mean();
  double s = spec_.beta * static_cast<double>(g_->n_edges() - spec_.beta_overrides.size());
  for (const auto& [p, b] : spec_.beta_overrides) s += b;
  return s;
}

namespace {

// Indices in [0, n) kept by independent Bernoulli(p) trials.
template <class Emit>
void bernoulli_scan(Rng& rng, std::uint64_t n, double p, Emit&& emit) {
  if (p <= 0.0 || n == 0) return;
  const double log1m_p = p >= 1.0 ? -std::numeric_limits<double>::infinity() : std::log1p(-p);
  std::uint64_t i = 0;
  while (true) {
    const std::uint64_t skip = geometric_skip(rng, log1m_p);
    if (skip >= n - i) return;
    i += skip;
    emit(i);
    if (++i >= n) return;
  }
}

}  // namespace

void NoiseModel::sample_independent(Rng& rng, Flips& out) const {
  bernoulli_scan(rng, g_->n_nonedges(), spec_.alpha, [&](std::uint64_t r) {
    const std::uint64_t p = nonedge_at(r);
    if (!spec_.alpha_overrides.count(p)) out.added.push_back(p);
  });
  for (const auto& [p, a] : spec_.alpha_overrides) {
    if (rng.uniform() < a) out.added.push_back(p);
  }
  bernoulli_scan(rng, edge_idx_.size(), spec_.beta, [&](std::uint64_t r) {
    const std::uint64_t p = edge_idx_[static_cast<std::size_t>(r)];
    if (!spec_.beta_overrides.count(p)) out.removed.push_back(p);
  });
  for (const auto& [p, b] : spec_.beta_overrides) {
    if (rng.uniform() < b) out.removed.push_back(p);
  }
  std::sort(out.added.begin(), out.added.end());
  std::sort(out.removed.begin(), out.removed.end());
}

void NoiseModel::sample_comb(Rng& rng, Flips& out) const {
  const std::uint64_t k1 = t1_->sample(rng);
  for (std::uint64_t r : sample_subset(rng, g_->n_nonedges(), k1)) out.added.push_back(nonedge_at(r));
  const std::uint64_t k2 = t2_->sample(rng);
  for (std::uint64_t r : sample_subset(rng, edge_idx_.size(), k2)) out.removed.push_back(edge_idx_[static_cast<std::size_t>(r)]);
  // Rank order equals pair-index order, so both lists are already sorted.
}

Flips NoiseModel::sample(Rng& rng) const {
  Flips f;
  if (spec_.kind == NoiseKind::Independent) {
    sample_independent(rng, f);
  } else {
    sample_comb(rng, f);
  }
  return f;
}

SparseGraph apply_flips(const SparseGraph& g, const Flips& flips) {
  const std::uint64_t n = g.n_vertices();
  std::vector<Edge> edges;
  edges.reserve(g.n_edges() + flips.added.size());
  const auto& removed = flips.removed;
  for (const auto& e : g.edges()) {
    if (!std::binary_search(removed.begin(), removed.end(), pair_index(e.first, e.second, n))) edges.push_back(e);
  }
  for (std::uint64_t p : flips.added) edges.push_back(pair_from_index(p, n));
  return SparseGraph(n, std::move(edges));
}

SparseGraph apply_noise(const SparseGraph& g, const NoiseSpec& spec, std::uint64_t seed) {
  const NoiseModel model(g, spec);
  Rng rng(seed);
  return apply_flips(g, model.sample(rng));
}

}  // namespace skellamnet
