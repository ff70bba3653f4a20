#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "risknet/netgen.hpp"

namespace risknet {

/// Module label per node. Labels are 0-based in memory; exported files
/// use 1-based module ids.
using Assignment = std::vector<int>;

struct Partition {
  Assignment assignment;
  double q = 0.0;

  std::size_t module_count() const;
  std::vector<std::size_t> module_sizes() const;
};

/// Weighted Newman-Girvan modularity. Throws Error when the graph has no
/// edge weight (m = 0) or the assignment does not cover every node.
double modularity(const WeightedGraph& g, std::span<const int> assignment);

/// Labels renumbered 0..k-1 in order of first appearance by node index.
Assignment canonical_labels(std::span<const int> assignment);

/// Labels renumbered 0..k-1 by descending module size, ties by smallest
/// member node.
Assignment relabel_by_size(std::span<const int> assignment);

/// Number of edges (unweighted) inside each module, indexed by label.
std::vector<std::size_t> module_internal_links(const WeightedGraph& g, std::span<const int> assignment);

/// Best of `restarts` randomized Louvain runs. Modules are relabeled by
/// descending size. A graph without edges yields singleton modules, q = 0.
Partition detect_modules(const WeightedGraph& g, std::uint64_t seed, int restarts = 10);

/// Maps the labels of `assignment` into the label space of `reference` by
/// greedy maximum-overlap matching. Modules left unmatched receive fresh
/// labels starting at `first_fresh` (default: one past the largest
/// reference label), in order of their smallest member node.
Assignment align_labels(std::span<const int> assignment, std::span<const int> reference,
                        std::optional<int> first_fresh = std::nullopt);

/// Fraction of nodes whose aligned label equals the reference label.
double match_fraction(std::span<const int> assignment, std::span<const int> reference);

struct Consensus {
  Partition partition;
  /// Share of ensemble members that put each node in its consensus module.
  std::vector<double> confidence;
  /// The per-member partitions the consensus was built from.
  std::vector<Partition> members;
};

/// Aligns every member to the highest-Q member and gives each node its most
/// frequent aligned module. partition.q is left at 0.
Consensus consensus_from_partitions(std::vector<Partition> members);

/// Runs detect_modules on every ensemble member (member k seeded from
/// (seed, k)) and builds the consensus. partition.q is the mean modularity
/// of the consensus assignment over members with at least one edge.
Consensus consensus_partition(const GraphEnsemble& ensemble, std::uint64_t seed, int restarts = 10,
                              unsigned threads = 1);

/// Normalized mutual information, 2 I(X;Y) / (H(X) + H(Y)). Two
/// single-module partitions score 1.
double nmi(std::span<const int> a, std::span<const int> b);

/// Planted-partition random graph with the reference's module count and
/// sizes. Nodes are assigned to planted modules by a random permutation.
/// Intra/inter-module edge probabilities equal the observed densities of g
/// under the reference, and edge weights are drawn uniformly from g's
/// edge weights.
WeightedGraph random_modular_baseline(const Partition& reference, const WeightedGraph& g,
                                      std::uint64_t seed);

struct NmiSummary {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t samples = 0;
};

/// For each (graph, partition) pair: build a random modular baseline,
/// detect its modules and score NMI against the partition.
NmiSummary nmi_vs_random(std::span<const WeightedGraph> graphs, std::span<const Partition> partitions,
                         std::uint64_t seed, int restarts = 10, unsigned threads = 1);

struct ModuleResolution {
  int module = 0;  ///< 0-based label
  std::size_t internal_links = 0;
  bool self_consistent = false;
};

struct ValidationReport {
  double k_max = 0.0;
  double sqrt_2l = 0.0;
  bool suitable = false;  ///< k_max < sqrt(2L)
  std::size_t links = 0;
  std::size_t inter_module_links = 0;
  std::vector<ModuleResolution> resolution;
  std::optional<NmiSummary> nmi_vs_random;
};

/// Null-model suitability (k_max < sqrt(2L)) and resolution-limit check
/// (module s is self-consistent iff l^s >= sqrt(2L)).
ValidationReport validate(const WeightedGraph& g, const Partition& p);

nlohmann::json to_json(const ValidationReport& report);

/// risk_id,module_id,confidence with 1-based module ids.
void write_partition_csv(std::ostream& out, const Partition& p, std::span<const double> confidence,
                         std::span<const int> risk_ids);

}  // namespace risknet
