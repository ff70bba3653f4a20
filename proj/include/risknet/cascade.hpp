#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "risknet/netgen.hpp"
#include "risknet/random.hpp"
#include "risknet/register.hpp"

namespace risknet {

/// One direct triggering: `source` materialized `target`.
struct TriggerEvent {
  int source = 0;
  int target = 0;
};

/// Susceptible-Infected cascade from `seed_node`. Newly materialized risks
/// try each still-susceptible neighbor once, succeeding with probability
/// equal to the edge weight. Frontiers are processed in ascending node
/// order. Returns the number of materialized risks, excluding the seed.
/// Throws Error for an unknown node.
std::size_t run_cascade(const WeightedGraph& g, std::size_t seed_node, Rng& rng,
                        std::vector<TriggerEvent>* trace = nullptr);

/// Random stream for the cascade seeded at `node` in Monte Carlo run `run`.
inline Rng cascade_stream(std::uint64_t base_seed, std::size_t node, std::size_t run) {
  return make_rng(base_seed, {0x5349, node, run});
}

enum class EnsembleMode : std::uint8_t {
  /// Run r draws network r of the ensemble (fresh sample per run) and
  /// cascades every seed risk on it.
  Resample,
  /// Every run cascades on the same graph.
  Fixed,
};

std::string_view to_string(EnsembleMode mode);

struct CascadeConfig {
  std::size_t runs = 1000;
  std::uint64_t base_seed = 0;
  EnsembleMode mode = EnsembleMode::Resample;
  unsigned threads = 1;
};

/// Raw Monte Carlo totals, summed over runs.
struct CascadeTotals {
  std::size_t node_count = 0;
  std::size_t runs = 0;
  /// Materialized risks per seed risk, summed over runs.
  std::vector<std::uint64_t> materialized;
  /// Direct triggering events u -> v (row-major n x n), summed over runs.
  std::vector<std::uint64_t> triggers;

  double mean_impact(std::size_t node) const {
    return static_cast<double>(materialized[node]) / static_cast<double>(runs);
  }
};

/// Resample mode: run r uses sample_graph(sim, member_seed(base_seed, r)),
/// i.e. ensemble member r.
CascadeTotals simulate_cascades(const SimilarityMatrix& sim, const CascadeConfig& config);
/// Fixed mode on a given graph.
CascadeTotals simulate_cascades(const WeightedGraph& g, const CascadeConfig& config);

struct CascadeSummary {
  std::vector<double> mean_impact;
  std::vector<int> rank;  ///< 1 = largest mean impact
  std::vector<Impact> systemic_class;
  CascadeConfig config;
};

/// Ranks by descending mean; equal means are ordered by ascending risk_id.
/// Ties are detected on exact integer totals.
std::vector<int> rank_by_impact(const CascadeTotals& totals, std::span<const int> risk_ids);

/// Labels the best-ranked count.high risks High, the next count.medium
/// Medium and the rest Low. Throws Error when counts do not sum to n or the
/// ranks are not a permutation of 1..n.
std::vector<Impact> classify(std::span<const int> ranks, const ImpactCounts& counts);

CascadeSummary summarize(const CascadeTotals& totals, const RiskRegister& reg, const CascadeConfig& config);

struct MismatchCounts {
  std::size_t systemic_at_least_independent = 0;
  std::size_t systemic_below_independent = 0;

  bool operator==(const MismatchCounts&) const = default;
};

enum class Mismatch : std::uint8_t { Greater, Equal, Less };
std::string_view to_string(Mismatch m);
Mismatch compare_impacts(Impact systemic, Impact independent);

MismatchCounts mismatch_table(std::span<const Impact> systemic, const RiskRegister& reg);

/// risk_id,title,firm_id,mean_systemic_impact,rank,systemic_class,independent_impact,mismatch
void write_cascade_csv(std::ostream& out, const CascadeSummary& summary, const RiskRegister& reg);

}  // namespace risknet
