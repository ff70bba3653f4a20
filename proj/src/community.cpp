#include "risknet/community.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include "risknet/csv.hpp"
#include "risknet/diagnostics.hpp"
#include "risknet/parallel.hpp"
#include "risknet/random.hpp"

namespace risknet {

std::size_t Partition::module_count() const {
  if (assignment.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(assignment.begin(), assignment.end())) + 1;
}

std::vector<std::size_t> Partition::module_sizes() const {
  std::vector<std::size_t> sizes(module_count(), 0);
  for (int c : assignment) ++sizes[static_cast<std::size_t>(c)];
  return sizes;
}

double modularity(const WeightedGraph& g, std::span<const int> assignment) {
  if (assignment.size() != g.node_count()) {
    throw Error("modularity: assignment covers " + std::to_string(assignment.size()) +
                " nodes, graph has " + std::to_string(g.node_count()));
  }
  const double m = g.total_weight();
  if (!(m > 0.0)) throw Error("modularity undefined: graph has no edge weight (m = 0)");

  std::map<int, double> internal;  // sum of A(i,j) over ordered pairs inside each module
  std::map<int, double> degree_sum;
  for (const auto& e : g.edges()) {
    const int cs = assignment[static_cast<std::size_t>(e.source)];
    if (cs == assignment[static_cast<std::size_t>(e.target)]) internal[cs] += 2.0 * e.weight;
  }
  for (std::size_t i = 0; i < g.node_count(); ++i) degree_sum[assignment[i]] += g.weighted_degree(i);

  const double two_m = 2.0 * m;
  double q = 0.0;
  for (const auto& [module, tot] : degree_sum) {
    auto it = internal.find(module);
    const double in = it == internal.end() ? 0.0 : it->second;
    q += in / two_m - (tot / two_m) * (tot / two_m);
  }
  return q;
}

Assignment canonical_labels(std::span<const int> assignment) {
  std::map<int, int> remap;
  Assignment out(assignment.size());
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    auto [it, inserted] = remap.try_emplace(assignment[i], static_cast<int>(remap.size()));
    out[i] = it->second;
  }
  return out;
}

Assignment relabel_by_size(std::span<const int> assignment) {
  Assignment canon = canonical_labels(assignment);
  const std::size_t k = canon.empty() ? 0 : static_cast<std::size_t>(*std::max_element(canon.begin(), canon.end())) + 1;
  std::vector<std::size_t> sizes(k, 0);
  for (int c : canon) ++sizes[static_cast<std::size_t>(c)];
  // canonical label order is already smallest-member order
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return sizes[static_cast<std::size_t>(x)] > sizes[static_cast<std::size_t>(y)];
  });
  std::vector<int> rank(k);
  for (std::size_t r = 0; r < k; ++r) rank[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
  for (int& c : canon) c = rank[static_cast<std::size_t>(c)];
  return canon;
}

std::vector<std::size_t> module_internal_links(const WeightedGraph& g, std::span<const int> assignment) {
  std::size_t k = 0;
  for (int c : assignment) k = std::max(k, static_cast<std::size_t>(c) + 1);
  std::vector<std::size_t> links(k, 0);
  for (const auto& e : g.edges()) {
    const int cs = assignment[static_cast<std::size_t>(e.source)];
    if (cs == assignment[static_cast<std::size_t>(e.target)]) ++links[static_cast<std::size_t>(cs)];
  }
  return links;
}

namespace {

// Graph at one Louvain level. Self-loop weight holds the sum of A(i,j) over
// ordered pairs of original nodes merged into the super-node.
struct LevelGraph {
  std::size_t n = 0;
  std::vector<std::size_t> offsets;
  std::vector<Neighbor> adjacency;
  std::vector<double> loops;
  std::vector<double> degree;

  std::span<const Neighbor> neighbors(std::size_t i) const {
    return {adjacency.data() + offsets[i], adjacency.data() + offsets[i + 1]};
  }
};

LevelGraph from_graph(const WeightedGraph& g) {
  LevelGraph lg;
  lg.n = g.node_count();
  lg.offsets.assign(lg.n + 1, 0);
  lg.loops.assign(lg.n, 0.0);
  lg.degree.assign(lg.n, 0.0);
  for (std::size_t i = 0; i < lg.n; ++i) {
    auto nb = g.neighbors(i);
    lg.adjacency.insert(lg.adjacency.end(), nb.begin(), nb.end());
    lg.offsets[i + 1] = lg.adjacency.size();
    lg.degree[i] = g.weighted_degree(i);
  }
  return lg;
}

constexpr double kGainTolerance = 1e-12;

// One local-moving phase. Returns true if any node changed module.
bool move_nodes(const LevelGraph& lg, double two_m, std::vector<int>& community, Rng& rng) {
  const std::size_t n = lg.n;
  std::vector<double> tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) tot[static_cast<std::size_t>(community[i])] += lg.degree[i];

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(std::span(order), rng);

  std::vector<double> link_to(n, 0.0);
  std::vector<int> touched;
  bool any_move = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::size_t node : order) {
      const double k_i = lg.degree[node];
      const int old = community[node];
      touched.clear();
      for (const auto& nb : lg.neighbors(node)) {
        const int c = community[static_cast<std::size_t>(nb.node)];
        if (link_to[static_cast<std::size_t>(c)] == 0.0) touched.push_back(c);
        link_to[static_cast<std::size_t>(c)] += nb.weight;
      }
      tot[static_cast<std::size_t>(old)] -= k_i;
      const double stay_gain = link_to[static_cast<std::size_t>(old)] -
                               tot[static_cast<std::size_t>(old)] * k_i / two_m;
      int best = -1;
      double best_gain = 0.0;
      for (int c : touched) {
        if (c == old) continue;
        const double gain = link_to[static_cast<std::size_t>(c)] - tot[static_cast<std::size_t>(c)] * k_i / two_m;
        if (best < 0 || gain > best_gain + kGainTolerance ||
            (std::abs(gain - best_gain) <= kGainTolerance && c < best)) {
          best = c;
          best_gain = gain;
        }
      }
      int target = old;
      if (best >= 0 && best_gain > stay_gain + kGainTolerance) target = best;
      tot[static_cast<std::size_t>(target)] += k_i;
      if (target != old) {
        community[node] = target;
        moved = true;
        any_move = true;
      }
      for (int c : touched) link_to[static_cast<std::size_t>(c)] = 0.0;
    }
  }
  return any_move;
}

// Collapses communities into super-nodes; community labels are renumbered
// in place to 0..k-1.
LevelGraph aggregate(const LevelGraph& lg, std::vector<int>& community) {
  Assignment canon = canonical_labels(community);
  community = canon;
  const std::size_t k = canon.empty() ? 0 : static_cast<std::size_t>(*std::max_element(canon.begin(), canon.end())) + 1;

  LevelGraph next;
  next.n = k;
  next.loops.assign(k, 0.0);
  next.degree.assign(k, 0.0);
  std::vector<std::map<int, double>> links(k);
  for (std::size_t i = 0; i < lg.n; ++i) {
    const auto ci = static_cast<std::size_t>(canon[i]);
    next.loops[ci] += lg.loops[i];
    next.degree[ci] += lg.degree[i];
    for (const auto& nb : lg.neighbors(i)) {
      const int cj = canon[static_cast<std::size_t>(nb.node)];
      if (static_cast<std::size_t>(cj) == ci) {
        next.loops[ci] += nb.weight;
      } else {
        links[ci][cj] += nb.weight;
      }
    }
  }
  next.offsets.assign(k + 1, 0);
  for (std::size_t c = 0; c < k; ++c) {
    for (const auto& [d, w] : links[c]) next.adjacency.push_back({d, w});
    next.offsets[c + 1] = next.adjacency.size();
  }
  return next;
}

Assignment louvain_once(const WeightedGraph& g, Rng& rng) {
  const double two_m = 2.0 * g.total_weight();
  LevelGraph level = from_graph(g);
  Assignment node_module(g.node_count());
  std::iota(node_module.begin(), node_module.end(), 0);

  while (true) {
    std::vector<int> community(level.n);
    std::iota(community.begin(), community.end(), 0);
    if (!move_nodes(level, two_m, community, rng)) break;
    LevelGraph next = aggregate(level, community);
    for (int& c : node_module) c = community[static_cast<std::size_t>(c)];
    if (next.n == level.n) break;
    level = std::move(next);
  }
  return node_module;
}

}  // namespace

Partition detect_modules(const WeightedGraph& g, std::uint64_t seed, int restarts) {
  const std::size_t n = g.node_count();
  Partition best;
  if (!(g.total_weight() > 0.0)) {
    best.assignment.resize(n);
    std::iota(best.assignment.begin(), best.assignment.end(), 0);
    best.q = 0.0;
    return best;
  }
  bool have = false;
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    Rng rng = make_rng(seed, {static_cast<std::uint64_t>(r)});
    Assignment candidate = louvain_once(g, rng);
    const double q = modularity(g, candidate);
    if (!have || q > best.q) {
      best.assignment = std::move(candidate);
      best.q = q;
      have = true;
    }
  }
  best.assignment = relabel_by_size(best.assignment);
  return best;
}

Assignment align_labels(std::span<const int> assignment, std::span<const int> reference,
                        std::optional<int> first_fresh) {
  if (assignment.size() != reference.size()) throw Error("align_labels: node counts differ");
  const Assignment a = canonical_labels(assignment);
  const Assignment r = canonical_labels(reference);
  const std::size_t ka = a.empty() ? 0 : static_cast<std::size_t>(*std::max_element(a.begin(), a.end())) + 1;
  const std::size_t kr = r.empty() ? 0 : static_cast<std::size_t>(*std::max_element(r.begin(), r.end())) + 1;

  // canonical label -> original reference label
  std::vector<int> ref_label(kr, 0);
  for (std::size_t i = 0; i < r.size(); ++i) ref_label[static_cast<std::size_t>(r[i])] = reference[i];

  std::map<std::pair<int, int>, std::size_t> overlap;
  for (std::size_t i = 0; i < a.size(); ++i) ++overlap[{a[i], r[i]}];
  struct Cell {
    std::size_t count;
    int from;
    int to;
  };
  std::vector<Cell> cells;
  cells.reserve(overlap.size());
  for (const auto& [key, count] : overlap) cells.push_back({count, key.first, key.second});
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) {
    if (x.count != y.count) return x.count > y.count;
    if (x.from != y.from) return x.from < y.from;
    return x.to < y.to;
  });

  std::vector<int> mapped(ka, -1);
  std::vector<bool> used(kr, false);
  for (const auto& cell : cells) {
    if (mapped[static_cast<std::size_t>(cell.from)] >= 0 || used[static_cast<std::size_t>(cell.to)]) continue;
    mapped[static_cast<std::size_t>(cell.from)] = ref_label[static_cast<std::size_t>(cell.to)];
    used[static_cast<std::size_t>(cell.to)] = true;
  }
  int fresh = first_fresh.value_or(
      reference.empty() ? 0 : *std::max_element(reference.begin(), reference.end()) + 1);
  for (auto& m : mapped) {
    if (m < 0) m = fresh++;
  }
  Assignment out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = mapped[static_cast<std::size_t>(a[i])];
  return out;
}

double match_fraction(std::span<const int> assignment, std::span<const int> reference) {
  if (reference.empty()) return 1.0;
  const Assignment aligned = align_labels(assignment, reference);
  std::size_t same = 0;
  for (std::size_t i = 0; i < aligned.size(); ++i) same += aligned[i] == reference[i];
  return static_cast<double>(same) / static_cast<double>(reference.size());
}

Consensus consensus_from_partitions(std::vector<Partition> members) {
  if (members.empty()) throw Error("consensus: ensemble is empty");
  const std::size_t n = members.front().assignment.size();
  for (const auto& p : members) {
    if (p.assignment.size() != n) throw Error("consensus: members differ in node count");
  }
  std::size_t ref = 0;
  for (std::size_t k = 1; k < members.size(); ++k) {
    if (members[k].q > members[ref].q) ref = k;
  }
  const Assignment reference = canonical_labels(members[ref].assignment);
  int next_fresh = reference.empty() ? 0 : *std::max_element(reference.begin(), reference.end()) + 1;

  std::vector<std::map<int, std::size_t>> votes(n);
  for (const auto& member : members) {
    Assignment aligned = align_labels(member.assignment, reference, next_fresh);
    for (std::size_t i = 0; i < n; ++i) {
      ++votes[i][aligned[i]];
      next_fresh = std::max(next_fresh, aligned[i] + 1);
    }
  }

  Consensus out;
  Assignment winner(n);
  out.confidence.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    int best = 0;
    std::size_t best_count = 0;
    for (const auto& [label, count] : votes[i]) {  // ascending label: ties keep the lowest
      if (count > best_count) {
        best = label;
        best_count = count;
      }
    }
    winner[i] = best;
    out.confidence[i] = static_cast<double>(best_count) / static_cast<double>(members.size());
  }
  out.partition.assignment = relabel_by_size(winner);
  out.members = std::move(members);
  return out;
}

Consensus consensus_partition(const GraphEnsemble& ensemble, std::uint64_t seed, int restarts,
                              unsigned threads) {
  if (ensemble.graphs.empty()) throw Error("consensus: ensemble is empty");
  std::vector<Partition> members(ensemble.graphs.size());
  parallel_for(members.size(), threads, [&](std::size_t k, unsigned) {
    members[k] = detect_modules(ensemble.graphs[k], derive_seed(seed, {0x4c56, k}), restarts);
  });
  Consensus out = consensus_from_partitions(std::move(members));
  double q_sum = 0.0;
  std::size_t counted = 0;
  for (const auto& g : ensemble.graphs) {
    if (g.total_weight() > 0.0) {
      q_sum += modularity(g, out.partition.assignment);
      ++counted;
    }
  }
  out.partition.q = counted ? q_sum / static_cast<double>(counted) : 0.0;
  return out;
}

double nmi(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error("nmi: partitions cover different node counts");
  if (a.empty()) return 1.0;
  const double n = static_cast<double>(a.size());
  std::map<int, double> na, nb;
  std::map<std::pair<int, int>, double> nab;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na[a[i]] += 1.0;
    nb[b[i]] += 1.0;
    nab[{a[i], b[i]}] += 1.0;
  }
  auto entropy = [n](const std::map<int, double>& counts) {
    double h = 0.0;
    for (const auto& [label, c] : counts) h -= (c / n) * std::log(c / n);
    return h;
  };
  const double ha = entropy(na);
  const double hb = entropy(nb);
  if (ha + hb == 0.0) return 1.0;
  double mi = 0.0;
  for (const auto& [key, c] : nab) {
    mi += (c / n) * std::log(c * n / (na[key.first] * nb[key.second]));
  }
  return std::clamp(2.0 * mi / (ha + hb), 0.0, 1.0);
}

WeightedGraph random_modular_baseline(const Partition& reference, const WeightedGraph& g,
                                      std::uint64_t seed) {
  const std::size_t n = g.node_count();
  if (reference.assignment.size() != n) throw Error("baseline: partition does not match graph");
  const auto sizes = reference.module_sizes();
  if (sizes.empty() && n > 0) throw Error("baseline: reference has no module");

  std::size_t intra_pairs = 0;
  for (auto s : sizes) intra_pairs += s * (s - 1) / 2;
  const std::size_t all_pairs = n * (n - 1) / 2;
  const std::size_t inter_pairs = all_pairs - intra_pairs;
  std::size_t intra_edges = 0;
  for (const auto& e : g.edges()) {
    intra_edges += reference.assignment[static_cast<std::size_t>(e.source)] ==
                   reference.assignment[static_cast<std::size_t>(e.target)];
  }
  const std::size_t inter_edges = g.edge_count() - intra_edges;
  const double p_in = intra_pairs ? static_cast<double>(intra_edges) / static_cast<double>(intra_pairs) : 0.0;
  const double p_out = inter_pairs ? static_cast<double>(inter_edges) / static_cast<double>(inter_pairs) : 0.0;

  Rng rng(seed);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  shuffle(std::span(perm), rng);
  std::vector<int> planted(n);
  std::size_t pos = 0;
  for (std::size_t m = 0; m < sizes.size(); ++m) {
    for (std::size_t c = 0; c < sizes[m]; ++c) planted[perm[pos++]] = static_cast<int>(m);
  }

  std::vector<Edge> edges;
  const auto& source_edges = g.edges();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = planted[i] == planted[j] ? p_in : p_out;
      if (uniform01(rng) < p) {
        const double w = source_edges[uniform_index(rng, source_edges.size())].weight;
        edges.push_back({static_cast<int>(i), static_cast<int>(j), w});
      }
    }
  }
  return WeightedGraph(n, std::move(edges));
}

NmiSummary nmi_vs_random(std::span<const WeightedGraph> graphs, std::span<const Partition> partitions,
                         std::uint64_t seed, int restarts, unsigned threads) {
  if (graphs.size() != partitions.size()) throw Error("nmi_vs_random: graph/partition count mismatch");
  std::vector<double> scores(graphs.size(), 0.0);
  parallel_for(graphs.size(), threads, [&](std::size_t k, unsigned) {
    WeightedGraph baseline = random_modular_baseline(partitions[k], graphs[k], derive_seed(seed, {0x424c, k}));
    Partition found = detect_modules(baseline, derive_seed(seed, {0x424d, k}), restarts);
    scores[k] = nmi(found.assignment, partitions[k].assignment);
  });
  NmiSummary summary;
  summary.samples = scores.size();
  if (scores.empty()) return summary;
  summary.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
  if (scores.size() > 1) {
    double ss = 0.0;
    for (double s : scores) ss += (s - summary.mean) * (s - summary.mean);
    summary.stddev = std::sqrt(ss / static_cast<double>(scores.size() - 1));
  }
  return summary;
}

ValidationReport validate(const WeightedGraph& g, const Partition& p) {
  if (p.assignment.size() != g.node_count()) throw Error("validate: partition does not match graph");
  ValidationReport report;
  const GraphStats stats = graph_stats(g);
  report.links = stats.links;
  report.k_max = stats.max_degree;
  report.sqrt_2l = std::sqrt(2.0 * static_cast<double>(stats.links));
  report.suitable = report.k_max < report.sqrt_2l;
  const auto internal = module_internal_links(g, p.assignment);
  std::size_t internal_total = 0;
  const std::size_t k = p.module_count();
  for (std::size_t s = 0; s < k; ++s) {
    const std::size_t l = s < internal.size() ? internal[s] : 0;
    internal_total += l;
    report.resolution.push_back(
        {static_cast<int>(s), l, static_cast<double>(l) >= report.sqrt_2l});
  }
  report.inter_module_links = stats.links - internal_total;
  return report;
}

nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::json j;
  j["suitability"] = {{"k_max", report.k_max}, {"sqrt_2L", report.sqrt_2l}, {"pass", report.suitable}};
  j["links"] = report.links;
  j["inter_module_links"] = report.inter_module_links;
  auto& res = j["resolution"] = nlohmann::json::array();
  for (const auto& r : report.resolution) {
    res.push_back({{"module", r.module + 1},
                   {"l_s", r.internal_links},
                   {"sqrt_2L", report.sqrt_2l},
                   {"self_consistent", r.self_consistent}});
  }
  if (report.nmi_vs_random) {
    j["nmi_vs_random"] = {{"mean", report.nmi_vs_random->mean},
                          {"stddev", report.nmi_vs_random->stddev},
                          {"ensemble_size", report.nmi_vs_random->samples}};
  } else {
    j["nmi_vs_random"] = nullptr;
  }
  return j;
}

void write_partition_csv(std::ostream& out, const Partition& p, std::span<const double> confidence,
                         std::span<const int> risk_ids) {
  csv::write_row(out, {"risk_id", "module_id", "confidence"});
  for (std::size_t i = 0; i < p.assignment.size(); ++i) {
    const double conf = i < confidence.size() ? confidence[i] : 1.0;
    csv::write_row(out, {std::to_string(risk_ids[i]), std::to_string(p.assignment[i] + 1),
                         csv::format_double(conf)});
  }
}

}  // namespace risknet
