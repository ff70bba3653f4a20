#include "risknet/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "risknet/csv.hpp"
#include "risknet/diagnostics.hpp"
#include "risknet/parallel.hpp"
#include "risknet/random.hpp"

namespace risknet {

WeightedGraph::WeightedGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  for (auto& e : edges_) {
    if (e.source > e.target) std::swap(e.source, e.target);
    if (e.source < 0 || static_cast<std::size_t>(e.target) >= n_) {
      throw Error("edge (" + std::to_string(e.source) + "," + std::to_string(e.target) +
                  ") out of range for " + std::to_string(n_) + " nodes");
    }
    if (e.source == e.target) throw Error("self-loop on node " + std::to_string(e.source));
    if (!(e.weight > 0.0 && e.weight <= 1.0)) {
      throw Error("edge weight " + csv::format_double(e.weight) + " outside (0, 1]");
    }
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& x, const Edge& y) {
    return std::pair(x.source, x.target) < std::pair(y.source, y.target);
  });
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k].source == edges_[k - 1].source && edges_[k].target == edges_[k - 1].target) {
      throw Error("duplicate edge (" + std::to_string(edges_[k].source) + "," +
                  std::to_string(edges_[k].target) + ")");
    }
  }

  std::vector<std::size_t> count(n_, 0);
  for (const auto& e : edges_) {
    ++count[static_cast<std::size_t>(e.source)];
    ++count[static_cast<std::size_t>(e.target)];
  }
  offsets_.assign(n_ + 1, 0);
  for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] = offsets_[i] + count[i];
  adjacency_.resize(offsets_[n_]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  degree_.assign(n_, 0.0);
  for (const auto& e : edges_) {
    const auto s = static_cast<std::size_t>(e.source);
    const auto t = static_cast<std::size_t>(e.target);
    adjacency_[fill[s]++] = {e.target, e.weight};
    adjacency_[fill[t]++] = {e.source, e.weight};
    degree_[s] += e.weight;
    degree_[t] += e.weight;
    total_weight_ += e.weight;
  }
  for (std::size_t i = 0; i < n_; ++i) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]),
              [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
  }
}

WeightedGraph sample_graph(const SimilarityMatrix& sim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges;
  const std::size_t n = sim.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = sim(i, j);
      if (uniform01(rng) < s) {
        edges.push_back({static_cast<int>(i), static_cast<int>(j), s});
      }
    }
  }
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph similarity_graph(const SimilarityMatrix& sim) {
  std::vector<Edge> edges;
  const std::size_t n = sim.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (sim(i, j) > 0.0) edges.push_back({static_cast<int>(i), static_cast<int>(j), sim(i, j)});
    }
  }
  return WeightedGraph(n, std::move(edges));
}

std::uint64_t member_seed(std::uint64_t base_seed, std::size_t index) {
  return derive_seed(base_seed, {0x6e65, static_cast<std::uint64_t>(index)});
}

GraphEnsemble sample_ensemble(const SimilarityMatrix& sim, std::size_t size,
                              std::uint64_t base_seed, unsigned threads) {
  if (size < 1) throw Error("sample_ensemble: size must be at least 1");
  GraphEnsemble ensemble;
  ensemble.measure = sim.measure();
  ensemble.base_seed = base_seed;
  ensemble.graphs.resize(size);
  parallel_for(size, threads, [&](std::size_t k, unsigned) {
    ensemble.graphs[k] = sample_graph(sim, member_seed(base_seed, k));
  });
  return ensemble;
}

GraphStats graph_stats(const WeightedGraph& g) {
  GraphStats stats;
  stats.links = g.edge_count();
  stats.total_weight = g.total_weight();
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    stats.max_degree = std::max(stats.max_degree, g.weighted_degree(i));
  }
  return stats;
}

void write_edge_list_csv(std::ostream& out, const WeightedGraph& g, std::span<const int> risk_ids) {
  csv::write_row(out, {"source", "target", "weight"});
  for (const auto& e : g.edges()) {
    csv::write_row(out, {std::to_string(risk_ids[static_cast<std::size_t>(e.source)]),
                         std::to_string(risk_ids[static_cast<std::size_t>(e.target)]),
                         csv::format_double(e.weight)});
  }
}

namespace {

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

}  // namespace

void write_graphml(std::ostream& out, const WeightedGraph& g, std::span<const NodeAttributes> nodes) {
  if (nodes.size() != g.node_count()) throw Error("write_graphml: attribute count mismatch");
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
         "  <key id=\"risk_id\" for=\"node\" attr.name=\"risk_id\" attr.type=\"int\"/>\n"
         "  <key id=\"title\" for=\"node\" attr.name=\"title\" attr.type=\"string\"/>\n"
         "  <key id=\"firm_id\" for=\"node\" attr.name=\"firm_id\" attr.type=\"string\"/>\n"
         "  <key id=\"module\" for=\"node\" attr.name=\"module\" attr.type=\"int\"/>\n"
         "  <key id=\"independent_impact\" for=\"node\" attr.name=\"independent_impact\" attr.type=\"string\"/>\n"
         "  <key id=\"systemic_class\" for=\"node\" attr.name=\"systemic_class\" attr.type=\"string\"/>\n"
         "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
         "  <graph id=\"risk_network\" edgedefault=\"undirected\">\n";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& a = nodes[i];
    out << "    <node id=\"n" << i << "\">\n"
        << "      <data key=\"risk_id\">" << a.risk_id << "</data>\n"
        << "      <data key=\"title\">" << xml_escape(a.title) << "</data>\n"
        << "      <data key=\"firm_id\">" << xml_escape(a.firm_id) << "</data>\n";
    if (a.module) out << "      <data key=\"module\">" << *a.module << "</data>\n";
    if (!a.independent_impact.empty()) {
      out << "      <data key=\"independent_impact\">" << xml_escape(a.independent_impact)
          << "</data>\n";
    }
    if (!a.systemic_class.empty()) {
      out << "      <data key=\"systemic_class\">" << xml_escape(a.systemic_class) << "</data>\n";
    }
    out << "    </node>\n";
  }
  std::size_t k = 0;
  for (const auto& e : g.edges()) {
    out << "    <edge id=\"e" << k++ << "\" source=\"n" << e.source << "\" target=\"n" << e.target
        << "\">\n      <data key=\"weight\">" << csv::format_double(e.weight) << "</data>\n    </edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
}

void write_expected_weight_csv(std::ostream& out, const SimilarityMatrix& sim,
                               std::span<const int> risk_ids) {
  std::vector<std::string> fields{"risk_id"};
  for (int id : risk_ids) fields.push_back(std::to_string(id));
  csv::write_row(out, fields);
  for (std::size_t i = 0; i < sim.size(); ++i) {
    fields.clear();
    fields.push_back(std::to_string(risk_ids[i]));
    for (std::size_t j = 0; j < sim.size(); ++j) {
      fields.push_back(csv::format_double(sim(i, j) * sim(i, j)));
    }
    csv::write_row(out, fields);
  }
}

}  // namespace risknet
