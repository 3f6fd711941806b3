#include "skellamnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "skellamnet/errors.hpp"
#include "skellamnet/rng.hpp"

namespace skellamnet {

std::uint64_t pair_count(std::uint64_t n_v) { return n_v < 2 ? 0 : n_v * (n_v - 1) / 2; }

std::uint64_t pair_index(Vertex i, Vertex j, std::uint64_t n_v) {
  if (i > j) std::swap(i, j);
  const std::uint64_t a = i;
  return a * n_v - a * (a + 1) / 2 + (j - a - 1);
}

Edge pair_from_index(std::uint64_t index, std::uint64_t n_v) {
  if (index >= pair_count(n_v)) throw DomainError("pair_from_index: index out of range");
  // Row i starts at s(i) = i n - i(i+1)/2; invert the quadratic, then fix rounding.
  const double n = static_cast<double>(n_v);
  const double disc = (2.0 * n - 1.0) * (2.0 * n - 1.0) - 8.0 * static_cast<double>(index);
  auto i = static_cast<std::uint64_t>(std::max(0.0, std::floor(((2.0 * n - 1.0) - std::sqrt(std::max(0.0, disc))) / 2.0)));
  auto row_start = [n_v](std::uint64_t r) { return r * n_v - r * (r + 1) / 2; };
  while (i > 0 && row_start(i) > index) --i;
  while (i + 1 < n_v && row_start(i + 1) <= index) ++i;
  const std::uint64_t j = index - row_start(i) + i + 1;
  return {static_cast<Vertex>(i), static_cast<Vertex>(j)};
}

SparseGraph::SparseGraph(std::uint64_t n_v, std::vector<Edge> edges) : n_v_(n_v) {
  if (n_v > static_cast<std::uint64_t>(UINT32_MAX)) throw DomainError("SparseGraph: too many vertices");
  for (auto& e : edges) {
    if (e.first == e.second) throw DomainError("SparseGraph: self-loop at " + std::to_string(e.first));
    if (e.first > e.second) std::swap(e.first, e.second);
    if (e.second >= n_v) throw DomainError("SparseGraph: vertex " + std::to_string(e.second) + " out of range");
  }
  std::sort(edges.begin(), edges.end());
  const auto dup = std::adjacent_find(edges.begin(), edges.end());
  if (dup != edges.end()) {
    throw DomainError("SparseGraph: duplicate edge " + std::to_string(dup->first) + " " + std::to_string(dup->second));
  }
  edges_ = std::move(edges);

  offsets_.assign(n_v + 1, 0);
  for (const auto& [a, b] : edges_) {
    ++offsets_[a + 1];
    ++offsets_[b + 1];
  }
  for (std::uint64_t v = 0; v < n_v; ++v) offsets_[v + 1] += offsets_[v];
  adj_.resize(offsets_[n_v]);
  std::vector<std::uint64_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [a, b] : edges_) {
    adj_[fill[a]++] = b;
    adj_[fill[b]++] = a;
  }
  for (std::uint64_t v = 0; v < n_v; ++v) {
    std::sort(adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
              adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
  }
}

bool SparseGraph::has_edge(Vertex u, Vertex v) const {
  if (u >= n_v_ || v >= n_v_ || u == v) return false;
  if (degree(u) > degree(v)) std::swap(u, v);
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<std::uint64_t> SparseGraph::edge_pair_indices() const {
  std::vector<std::uint64_t> out;
  out.reserve(edges_.size());
  for (const auto& [a, b] : edges_) out.push_back(pair_index(a, b, n_v_));
  return out;
}

SparseGraph erdos_renyi(std::uint64_t n_v, double p, std::uint64_t seed) {
  if (n_v < 2) throw DomainError("erdos_renyi: n_v must be >= 2");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("erdos_renyi: p must lie in [0, 1]");
  std::vector<Edge> edges;
  const std::uint64_t total = pair_count(n_v);
  if (p == 1.0) {
    edges.reserve(total);
    for (Vertex i = 0; i < n_v; ++i)
      for (Vertex j = i + 1; j < n_v; ++j) edges.emplace_back(i, j);
    return SparseGraph(n_v, std::move(edges));
  }
  if (p > 0.0) {
    Rng rng(seed);
    const double log1m_p = std::log1p(-p);
    std::uint64_t idx = 0;
    Vertex row = 0;
    std::uint64_t row_start = 0;
    while (true) {
      const std::uint64_t skip = geometric_skip(rng, log1m_p);
      if (skip >= total - idx) break;
      idx += skip;
      while (idx >= row_start + (n_v - 1 - row)) {
        row_start += n_v - 1 - row;
        ++row;
      }
      edges.emplace_back(row, static_cast<Vertex>(row + 1 + (idx - row_start)));
      if (++idx >= total) break;
    }
  }
  return SparseGraph(n_v, std::move(edges));
}

namespace {

// Triangles through u with u < v < w, found by merging the upper parts of
// two sorted neighbour lists.
std::uint64_t triangles_at(const SparseGraph& g, Vertex u) {
  std::uint64_t t = 0;
  const auto nu = g.neighbors(u);
  const auto upper_u = std::upper_bound(nu.begin(), nu.end(), u);
  for (auto it = upper_u; it != nu.end(); ++it) {
    const Vertex v = *it;
    const auto nv = g.neighbors(v);
    auto a = std::next(it);
    auto b = std::upper_bound(nv.begin(), nv.end(), v);
    while (a != nu.end() && b != nv.end()) {
      if (*a < *b) {
        ++a;
      } else if (*b < *a) {
        ++b;
      } else {
        ++t;
        ++a;
        ++b;
      }
    }
  }
  return t;
}

std::uint64_t binom3(std::uint64_t n) { return n < 3 ? 0 : n * (n - 1) / 2 * (n - 2) / 3; }

}  // namespace

std::uint64_t count_triangles(const SparseGraph& g) {
  std::uint64_t t = 0;
  const auto n = static_cast<std::int64_t>(g.n_vertices());
#pragma omp parallel for reduction(+ : t) schedule(dynamic, 64)
  for (std::int64_t u = 0; u < n; ++u) t += triangles_at(g, static_cast<Vertex>(u));
  return t;
}

std::uint64_t count_triangles_serial(const SparseGraph& g) {
  std::uint64_t t = 0;
  for (Vertex u = 0; u < g.n_vertices(); ++u) t += triangles_at(g, u);
  return t;
}

std::uint64_t count_two_paths(const SparseGraph& g) {
  std::uint64_t w = 0;
  for (Vertex v = 0; v < g.n_vertices(); ++v) {
    const std::uint64_t d = g.degree(v);
    w += d * (d - (d > 0 ? 1 : 0)) / 2;
  }
  return w;
}

std::uint64_t count_three_paths(const SparseGraph& g) {
  std::uint64_t s = 0;
  for (const auto& [a, b] : g.edges()) s += (g.degree(a) - 1) * (g.degree(b) - 1);
  return s - 3 * count_triangles(g);
}

std::uint64_t count_three_stars(const SparseGraph& g) {
  std::uint64_t s = 0;
  for (Vertex v = 0; v < g.n_vertices(); ++v) s += binom3(g.degree(v));
  return s;
}

TripleCensus triple_census(const SparseGraph& g) {
  const std::uint64_t n = g.n_vertices();
  const std::uint64_t t = count_triangles(g);
  const std::uint64_t w = count_two_paths(g);
  TripleCensus c;
  c.c3 = t;
  c.c2 = w - 3 * t;
  c.c1 = g.n_edges() * (n >= 2 ? n - 2 : 0) + 3 * t - 2 * w;
  c.c0 = binom3(n) - c.c1 - c.c2 - c.c3;
  return c;
}

TripleCensus brute_force_census(const SparseGraph& g) {
  const std::uint64_t n = g.n_vertices();
  if (n > 200) throw DomainError("brute_force_census: n_v > 200");
  std::vector<char> m(n * n, 0);
  for (const auto& [a, b] : g.edges()) m[a * n + b] = m[b * n + a] = 1;
  TripleCensus c;
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = i + 1; j < n; ++j)
      for (std::uint64_t k = j + 1; k < n; ++k) {
        const int e = m[i * n + j] + m[i * n + k] + m[j * n + k];
        (e == 0 ? c.c0 : e == 1 ? c.c1 : e == 2 ? c.c2 : c.c3) += 1;
      }
  return c;
}

SparseGraph read_edge_list(std::istream& in) {
  std::string line;
  auto next_line = [&](std::istringstream& ls) {
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ls.clear();
      ls.str(line);
      return true;
    }
    return false;
  };
  std::istringstream ls;
  std::uint64_t n_v = 0, m = 0;
  if (!next_line(ls) || !(ls >> n_v >> m)) throw DomainError("edge list: missing 'n_v m' header");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::uint64_t e = 0; e < m; ++e) {
    std::uint64_t i = 0, j = 0;
    if (!next_line(ls) || !(ls >> i >> j)) {
      throw DomainError("edge list: expected " + std::to_string(m) + " edges, got " + std::to_string(e));
    }
    if (i >= j) throw DomainError("edge list: line '" + line + "' must have i < j");
    if (j >= n_v) throw DomainError("edge list: vertex out of range in '" + line + "'");
    edges.emplace_back(static_cast<Vertex>(i), static_cast<Vertex>(j));
  }
  return SparseGraph(n_v, std::move(edges));
}

void write_edge_list(std::ostream& out, const SparseGraph& g) {
  out << g.n_vertices() << ' ' << g.n_edges() << '\n';
  for (const auto& [a, b] : g.edges()) out << a << ' ' << b << '\n';
}

SparseGraph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open edge list '" + path + "'");
  return read_edge_list(in);
}

void write_edge_list_file(const std::string& path, const SparseGraph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write edge list '" + path + "'");
  write_edge_list(out, g);
}

}  // namespace skellamnet
