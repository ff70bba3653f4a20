#include "risknet/cascade.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "risknet/csv.hpp"
#include "risknet/diagnostics.hpp"
#include "risknet/parallel.hpp"

namespace risknet {

std::size_t run_cascade(const WeightedGraph& g, std::size_t seed_node, Rng& rng,
                        std::vector<TriggerEvent>* trace) {
  const std::size_t n = g.node_count();
  if (seed_node >= n) {
    throw Error("run_cascade: unknown node " + std::to_string(seed_node) + " (graph has " +
                std::to_string(n) + " nodes)");
  }
  std::vector<std::uint8_t> materialized(n, 0);
  materialized[seed_node] = 1;
  std::vector<std::size_t> frontier{seed_node};
  std::vector<std::size_t> next;
  std::size_t count = 0;
  while (!frontier.empty()) {
    std::sort(frontier.begin(), frontier.end());
    next.clear();
    for (std::size_t u : frontier) {
      for (const auto& nb : g.neighbors(u)) {
        const auto v = static_cast<std::size_t>(nb.node);
        if (materialized[v]) continue;
        if (uniform01(rng) < nb.weight) {
          materialized[v] = 1;
          next.push_back(v);
          ++count;
          if (trace) trace->push_back({static_cast<int>(u), nb.node});
        }
      }
    }
    frontier.swap(next);
  }
  return count;
}

std::string_view to_string(EnsembleMode mode) {
  return mode == EnsembleMode::Resample ? "resample" : "fixed";
}

namespace {

// Per-worker accumulators; integer sums keep the result independent of how
// runs are spread over workers.
struct Accumulator {
  std::vector<std::uint64_t> materialized;
  std::vector<std::uint64_t> triggers;
  std::vector<TriggerEvent> trace;
};

template <class GraphForRun>
CascadeTotals simulate(std::size_t n, const CascadeConfig& config, GraphForRun&& graph_for_run) {
  if (config.runs < 1) throw Error("cascade: runs must be at least 1");
  const unsigned workers = worker_count(config.threads, config.runs);
  std::vector<Accumulator> acc(workers);
  for (auto& a : acc) {
    a.materialized.assign(n, 0);
    a.triggers.assign(n * n, 0);
  }
  parallel_for(config.runs, workers, [&](std::size_t run, unsigned worker) {
    auto& a = acc[worker];
    const WeightedGraph& g = graph_for_run(run, worker);
    for (std::size_t node = 0; node < n; ++node) {
      Rng rng = cascade_stream(config.base_seed, node, run);
      a.trace.clear();
      a.materialized[node] += run_cascade(g, node, rng, &a.trace);
      for (const auto& ev : a.trace) {
        ++a.triggers[static_cast<std::size_t>(ev.source) * n + static_cast<std::size_t>(ev.target)];
      }
    }
  });
  CascadeTotals totals;
  totals.node_count = n;
  totals.runs = config.runs;
  totals.materialized.assign(n, 0);
  totals.triggers.assign(n * n, 0);
  for (const auto& a : acc) {
    for (std::size_t i = 0; i < n; ++i) totals.materialized[i] += a.materialized[i];
    for (std::size_t i = 0; i < n * n; ++i) totals.triggers[i] += a.triggers[i];
  }
  return totals;
}

}  // namespace

CascadeTotals simulate_cascades(const SimilarityMatrix& sim, const CascadeConfig& config) {
  if (config.mode == EnsembleMode::Fixed) {
    return simulate_cascades(similarity_graph(sim), config);
  }
  std::vector<WeightedGraph> current(worker_count(config.threads, config.runs));
  return simulate(sim.size(), config, [&](std::size_t run, unsigned worker) -> const WeightedGraph& {
    current[worker] = sample_graph(sim, member_seed(config.base_seed, run));
    return current[worker];
  });
}

CascadeTotals simulate_cascades(const WeightedGraph& g, const CascadeConfig& config) {
  return simulate(g.node_count(), config, [&](std::size_t, unsigned) -> const WeightedGraph& {
    return g;
  });
}

std::vector<int> rank_by_impact(const CascadeTotals& totals, std::span<const int> risk_ids) {
  const std::size_t n = totals.node_count;
  if (risk_ids.size() != n) throw Error("rank_by_impact: risk id count mismatch");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (totals.materialized[x] != totals.materialized[y]) {
      return totals.materialized[x] > totals.materialized[y];
    }
    return risk_ids[x] < risk_ids[y];
  });
  std::vector<int> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = static_cast<int>(r + 1);
  return rank;
}

std::vector<Impact> classify(std::span<const int> ranks, const ImpactCounts& counts) {
  const std::size_t n = ranks.size();
  if (counts.total() != n) {
    throw Error("classify: impact counts sum to " + std::to_string(counts.total()) + " but there are " +
                std::to_string(n) + " risks");
  }
  std::vector<bool> seen(n, false);
  for (int r : ranks) {
    if (r < 1 || static_cast<std::size_t>(r) > n || seen[static_cast<std::size_t>(r - 1)]) {
      throw Error("classify: ranks are not a permutation of 1..n");
    }
    seen[static_cast<std::size_t>(r - 1)] = true;
  }
  std::vector<Impact> classes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(ranks[i]);
    if (r <= counts.high) classes[i] = Impact::High;
    else if (r <= counts.high + counts.medium) classes[i] = Impact::Medium;
    else classes[i] = Impact::Low;
  }
  return classes;
}

CascadeSummary summarize(const CascadeTotals& totals, const RiskRegister& reg, const CascadeConfig& config) {
  CascadeSummary summary;
  summary.config = config;
  summary.mean_impact.resize(totals.node_count);
  for (std::size_t i = 0; i < totals.node_count; ++i) summary.mean_impact[i] = totals.mean_impact(i);
  summary.rank = rank_by_impact(totals, reg.risk_ids());
  summary.systemic_class = classify(summary.rank, impact_counts(reg));
  return summary;
}

std::string_view to_string(Mismatch m) {
  switch (m) {
    case Mismatch::Greater: return "greater";
    case Mismatch::Equal: return "equal";
    case Mismatch::Less: return "less";
  }
  return "equal";
}

Mismatch compare_impacts(Impact systemic, Impact independent) {
  if (systemic == independent) return Mismatch::Equal;
  return static_cast<int>(systemic) > static_cast<int>(independent) ? Mismatch::Greater : Mismatch::Less;
}

MismatchCounts mismatch_table(std::span<const Impact> systemic, const RiskRegister& reg) {
  if (systemic.size() != reg.size()) throw Error("mismatch_table: class count does not match register");
  MismatchCounts counts;
  for (std::size_t i = 0; i < systemic.size(); ++i) {
    if (compare_impacts(systemic[i], reg[i].independent_impact) == Mismatch::Less) {
      ++counts.systemic_below_independent;
    } else {
      ++counts.systemic_at_least_independent;
    }
  }
  return counts;
}

void write_cascade_csv(std::ostream& out, const CascadeSummary& summary, const RiskRegister& reg) {
  csv::write_row(out, {"risk_id", "title", "firm_id", "mean_systemic_impact", "rank", "systemic_class",
                       "independent_impact", "mismatch"});
  for (std::size_t i = 0; i < reg.size(); ++i) {
    const auto& risk = reg[i];
    csv::write_row(out, {std::to_string(risk.risk_id), risk.title, risk.firm_id,
                         csv::format_double(summary.mean_impact[i]), std::to_string(summary.rank[i]),
                         std::string(to_string(summary.systemic_class[i])),
                         std::string(to_string(risk.independent_impact)),
                         std::string(to_string(compare_impacts(summary.systemic_class[i],
                                                               risk.independent_impact)))});
  }
}

}  // namespace risknet
