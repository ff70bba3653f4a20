#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "risknet/similarity.hpp"

namespace risknet {

struct Edge {
  int source = 0;  ///< always < target
  int target = 0;
  double weight = 0.0;

  bool operator==(const Edge&) const = default;
};

struct Neighbor {
  int node = 0;
  double weight = 0.0;
};

/// Undirected weighted simple graph over nodes 0..n-1 (register row order).
/// Edges are stored once with source < target and sorted; weights lie in
/// (0, 1]. Adjacency lists are sorted by neighbor id.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  /// Accepts edges in either orientation; throws Error on self-loops,
  /// duplicates, out-of-range endpoints or weights outside (0, 1].
  WeightedGraph(std::size_t n, std::vector<Edge> edges);

  std::size_t node_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const Neighbor> neighbors(std::size_t node) const {
    return {adjacency_.data() + offsets_[node], adjacency_.data() + offsets_[node + 1]};
  }
  /// Sum of incident edge weights.
  double weighted_degree(std::size_t node) const { return degree_[node]; }
  /// Sum of edge weights (half the adjacency-matrix sum).
  double total_weight() const { return total_weight_; }

  bool operator==(const WeightedGraph& other) const {
    return n_ == other.n_ && edges_ == other.edges_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  std::vector<double> degree_;
  double total_weight_ = 0.0;
};

/// Each unordered pair (i, j) becomes an edge with probability sim(i, j)
/// and weight sim(i, j). Pairs are visited in (i < j) lexicographic order
/// from a single stream seeded by `seed`.
WeightedGraph sample_graph(const SimilarityMatrix& sim, std::uint64_t seed);

/// Every positive similarity as an edge; used for fixed-graph cascades.
WeightedGraph similarity_graph(const SimilarityMatrix& sim);

struct GraphEnsemble {
  std::vector<WeightedGraph> graphs;
  Measure measure = Measure::Cosine;
  std::uint64_t base_seed = 0;
};

/// Seed used for ensemble member `index`.
std::uint64_t member_seed(std::uint64_t base_seed, std::size_t index);

GraphEnsemble sample_ensemble(const SimilarityMatrix& sim, std::size_t size,
                              std::uint64_t base_seed, unsigned threads = 1);

struct GraphStats {
  std::size_t links = 0;     ///< L, stored undirected edges
  double max_degree = 0.0;   ///< k_max, largest weighted degree
  double total_weight = 0.0; ///< m
};

GraphStats graph_stats(const WeightedGraph& g);

void write_edge_list_csv(std::ostream& out, const WeightedGraph& g, std::span<const int> risk_ids);

/// Per-node attributes attached to GraphML exports.
struct NodeAttributes {
  int risk_id = 0;
  std::string title;
  std::string firm_id;
  std::optional<int> module;  ///< 1-based
  std::string independent_impact;
  std::string systemic_class;
};

void write_graphml(std::ostream& out, const WeightedGraph& g, std::span<const NodeAttributes> nodes);

/// Dense n x n CSV of E[A(i,j)] = P(edge) * weight = sim(i,j)^2.
void write_expected_weight_csv(std::ostream& out, const SimilarityMatrix& sim,
                               std::span<const int> risk_ids);

}  // namespace risknet
