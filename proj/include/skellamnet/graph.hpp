#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace skellamnet {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

// Number of unordered pairs binom(n, 2).
std::uint64_t pair_count(std::uint64_t n_v);

// Lexicographic rank of {i, j}, i < j, among the binom(n_v, 2) pairs.
std::uint64_t pair_index(Vertex i, Vertex j, std::uint64_t n_v);
Edge pair_from_index(std::uint64_t index, std::uint64_t n_v);

// Undirected simple graph in CSR form with sorted neighbour lists.
// Immutable after construction.
class SparseGraph {
 public:
  SparseGraph() = default;
  // Edges may be given in either orientation; self-loops and duplicates throw.
  SparseGraph(std::uint64_t n_v, std::vector<Edge> edges);

  std::uint64_t n_vertices() const { return n_v_; }
  std::uint64_t n_edges() const { return edges_.size(); }
  std::uint64_t n_nonedges() const { return pair_count(n_v_) - n_edges(); }

  std::uint64_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  std::span<const Vertex> neighbors(Vertex v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  bool has_edge(Vertex u, Vertex v) const;

  // Edges as (i, j), i < j, in lexicographic order.
  const std::vector<Edge>& edges() const { return edges_; }
  // pair_index of each edge, ascending.
  std::vector<std::uint64_t> edge_pair_indices() const;

  bool operator==(const SparseGraph& other) const {
    return n_v_ == other.n_v_ && edges_ == other.edges_;
  }

 private:
  std::uint64_t n_v_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint64_t> offsets_{0};
  std::vector<Vertex> adj_;
};

// Each pair present independently with probability p; geometric skipping
// over the pair sequence, so the cost is O(n_v + |E|).
SparseGraph erdos_renyi(std::uint64_t n_v, double p, std::uint64_t seed);

struct TripleCensus {
  std::uint64_t c0 = 0, c1 = 0, c2 = 0, c3 = 0;
  std::uint64_t total() const { return c0 + c1 + c2 + c3; }
  bool operator==(const TripleCensus&) const = default;
};

std::uint64_t count_triangles(const SparseGraph& g);
std::uint64_t count_triangles_serial(const SparseGraph& g);

// Non-induced paths with 2 edges: sum_v binom(deg v, 2).
std::uint64_t count_two_paths(const SparseGraph& g);
// Paths with 3 edges on 4 distinct vertices:
// sum over edges uv of (deg u - 1)(deg v - 1), minus 3 per triangle.
std::uint64_t count_three_paths(const SparseGraph& g);
// sum_v binom(deg v, 3).
std::uint64_t count_three_stars(const SparseGraph& g);

// Counts from degrees and triangles:
//   c3 = t, c2 = w - 3t, c1 = |E|(n_v - 2) - 2w + 3t, c0 = binom(n_v, 3) - rest,
// with w = count_two_paths(g).
TripleCensus triple_census(const SparseGraph& g);

// O(n_v^3) enumeration; refuses n_v > 200.
TripleCensus brute_force_census(const SparseGraph& g);

// Edge-list text: "n_v m" then m lines "i j" with i < j.
SparseGraph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const SparseGraph& g);
SparseGraph read_edge_list_file(const std::string& path);
void write_edge_list_file(const std::string& path, const SparseGraph& g);

}  // namespace skellamnet
