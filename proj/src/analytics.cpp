#include "risknet/analytics.hpp"

#include <algorithm>
#include <ostream>

#include "risknet/csv.hpp"
#include "risknet/diagnostics.hpp"

namespace risknet {

HorizonTable horizon_table(const RiskRegister& reg, std::span<const int> assignment) {
  if (assignment.size() != reg.size()) throw Error("horizon_table: partition does not cover the register");
  HorizonTable table;
  for (int c : assignment) table.module_count = std::max(table.module_count, static_cast<std::size_t>(c) + 1);

  const auto& firms = reg.firms();
  std::vector<HorizonRow> rows(firms.size());
  for (std::size_t f = 0; f < firms.size(); ++f) {
    rows[f].firm = firms[f];
    rows[f].module_counts.assign(table.module_count, 0);
  }
  for (std::size_t i = 0; i < reg.size(); ++i) {
    auto& row = rows[reg.firm_index()[i]];
    ++row.risk_count;
    ++row.module_counts[static_cast<std::size_t>(assignment[i])];
  }
  for (auto& row : rows) {
    if (row.risk_count == 0) {
      warn("firm " + row.firm + " reported no risks; excluded from the horizon table");
      continue;
    }
    row.percent.resize(table.module_count);
    for (std::size_t m = 0; m < table.module_count; ++m) {
      row.percent[m] = 100.0 * static_cast<double>(row.module_counts[m]) / static_cast<double>(row.risk_count);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<CoverageGap> coverage_gaps(const HorizonTable& table) {
  std::vector<CoverageGap> gaps;
  gaps.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    CoverageGap gap{row.firm, {}};
    for (std::size_t m = 0; m < row.module_counts.size(); ++m) {
      if (row.module_counts[m] == 0) gap.missing_modules.push_back(static_cast<int>(m));
    }
    gaps.push_back(std::move(gap));
  }
  return gaps;
}

void write_horizon_markdown(std::ostream& out, const HorizonTable& table) {
  out << "| Firm |";
  for (std::size_t m = 0; m < table.module_count; ++m) out << " Module " << m + 1 << " |";
  out << "\n|---|";
  for (std::size_t m = 0; m < table.module_count; ++m) out << "---:|";
  out << '\n';
  for (const auto& row : table.rows) {
    out << "| " << row.firm << " |";
    for (double p : row.percent) out << ' ' << csv::format_fixed(p, 1) << " |";
    out << '\n';
  }
}

void write_horizon_csv(std::ostream& out, const HorizonTable& table) {
  std::vector<std::string> fields{"firm_id", "risk_count"};
  for (std::size_t m = 0; m < table.module_count; ++m) fields.push_back("module_" + std::to_string(m + 1));
  csv::write_row(out, fields);
  for (const auto& row : table.rows) {
    fields = {row.firm, std::to_string(row.risk_count)};
    for (double p : row.percent) fields.push_back(csv::format_fixed(p, 1));
    csv::write_row(out, fields);
  }
}

nlohmann::json to_json(const HorizonTable& table) {
  nlohmann::json j;
  j["module_count"] = table.module_count;
  auto& rows = j["firms"] = nlohmann::json::array();
  const auto gaps = coverage_gaps(table);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::vector<int> missing;
    for (int m : gaps[r].missing_modules) missing.push_back(m + 1);
    rows.push_back({{"firm_id", row.firm},
                    {"risk_count", row.risk_count},
                    {"module_counts", row.module_counts},
                    {"percent", row.percent},
                    {"uncovered_modules", missing}});
  }
  return j;
}

LiabilityNetwork liability_network(const RiskRegister& reg, const CascadeTotals& totals) {
  if (totals.node_count != reg.size()) throw Error("liability_network: cascade totals do not match register");
  LiabilityNetwork net;
  net.firms = reg.firms();
  const std::size_t f = net.firms.size();
  const std::size_t n = reg.size();
  net.risk_counts.assign(f, 0);
  for (std::size_t i = 0; i < n; ++i) ++net.risk_counts[reg.firm_index()[i]];

  std::vector<std::uint64_t> events(f * f, 0);
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t fu = reg.firm_index()[u];
    for (std::size_t v = 0; v < n; ++v) {
      events[fu * f + reg.firm_index()[v]] += totals.triggers[u * n + v];
    }
  }
  net.weights.assign(f * f, 0.0);
  net.in_degree.assign(f, 0.0);
  net.out_degree.assign(f, 0.0);
  const double runs = static_cast<double>(std::max<std::size_t>(totals.runs, 1));
  for (std::size_t i = 0; i < f; ++i) {
    if (net.risk_counts[i] == 0) continue;
    for (std::size_t j = 0; j < f; ++j) {
      const double w = static_cast<double>(events[i * f + j]) / runs / static_cast<double>(net.risk_counts[i]);
      net.weights[i * f + j] = w;
      if (i != j) {
        net.out_degree[i] += w;
        net.in_degree[j] += w;
      }
    }
  }
  return net;
}

nlohmann::json to_json(const LiabilityNetwork& net) {
  nlohmann::json j;
  const std::size_t f = net.firms.size();
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (std::size_t i = 0; i < f; ++i) {
    nodes.push_back({{"firm_id", net.firms[i]},
                     {"risk_count", net.risk_counts[i]},
                     {"in_degree", net.in_degree[i]},
                     {"out_degree", net.out_degree[i]},
                     {"within_firm_weight", net.weight(i, i)}});
  }
  auto& links = j["links"] = nlohmann::json::array();
  for (std::size_t a = 0; a < f; ++a) {
    for (std::size_t b = 0; b < f; ++b) {
      if (a != b && net.weight(a, b) > 0.0) {
        links.push_back({{"source", net.firms[a]}, {"target", net.firms[b]}, {"weight", net.weight(a, b)}});
      }
    }
  }
  return j;
}

void write_liability_csv(std::ostream& out, const LiabilityNetwork& net) {
  csv::write_row(out, {"source", "target", "weight"});
  const std::size_t f = net.firms.size();
  for (std::size_t a = 0; a < f; ++a) {
    for (std::size_t b = 0; b < f; ++b) {
      if (a != b && net.weight(a, b) > 0.0) {
        csv::write_row(out, {net.firms[a], net.firms[b], csv::format_double(net.weight(a, b))});
      }
    }
  }
}

std::vector<EmergingRiskRow> emerging_risk_report(const CascadeSummary& summary, const RiskRegister& reg,
                                                  std::size_t top_k) {
  const std::size_t n = reg.size();
  if (summary.rank.size() != n) throw Error("emerging_risk_report: summary does not match register");
  if (top_k > n) {
    warn("requested top " + std::to_string(top_k) + " risks but the register has " + std::to_string(n) +
         "; clamping");
    top_k = n;
  }
  std::vector<std::size_t> by_rank(n);
  for (std::size_t i = 0; i < n; ++i) by_rank[static_cast<std::size_t>(summary.rank[i] - 1)] = i;
  std::vector<EmergingRiskRow> rows;
  rows.reserve(top_k);
  for (std::size_t r = 0; r < top_k; ++r) {
    const std::size_t i = by_rank[r];
    const auto& risk = reg[i];
    rows.push_back({summary.rank[i], risk.risk_id, risk.title, risk.firm_id, summary.mean_impact[i],
                    summary.systemic_class[i], risk.independent_impact,
                    compare_impacts(summary.systemic_class[i], risk.independent_impact)});
  }
  return rows;
}

void write_emerging_csv(std::ostream& out, std::span<const EmergingRiskRow> rows) {
  csv::write_row(out, {"rank", "risk_id", "title", "firm_id", "mean_systemic_impact", "systemic_class",
                       "independent_impact", "mismatch"});
  for (const auto& r : rows) {
    csv::write_row(out, {std::to_string(r.rank), std::to_string(r.risk_id), r.title, r.firm_id,
                         csv::format_double(r.mean_impact), std::string(to_string(r.systemic_class)),
                         std::string(to_string(r.independent_impact)), std::string(to_string(r.mismatch))});
  }
}

nlohmann::json to_json(std::span<const EmergingRiskRow> rows) {
  auto j = nlohmann::json::array();
  for (const auto& r : rows) {
    j.push_back({{"rank", r.rank},
                 {"risk_id", r.risk_id},
                 {"title", r.title},
                 {"firm_id", r.firm_id},
                 {"mean_systemic_impact", r.mean_impact},
                 {"systemic_class", to_string(r.systemic_class)},
                 {"independent_impact", to_string(r.independent_impact)},
                 {"mismatch", to_string(r.mismatch)}});
  }
  return j;
}

MeasureAnalysis analyze_measure(const RiskRegister& reg, Measure m, const PipelineConfig& config) {
  if (reg.empty()) throw InputError("register has no risks");
  MeasureAnalysis out;
  out.measure = m;
  out.similarity = similarity_matrix(reg, m);
  out.ensemble = sample_ensemble(out.similarity, config.ensemble_size, config.seed, config.threads);
  out.consensus = consensus_partition(out.ensemble, derive_seed(config.seed, {1}), config.restarts, config.threads);

  CascadeConfig cc;
  cc.runs = config.cascade_runs;
  cc.base_seed = config.seed;
  cc.mode = config.mode;
  cc.threads = config.threads;
  out.cascades = simulate_cascades(out.similarity, cc);
  out.summary = summarize(out.cascades, reg, cc);
  out.mismatch = mismatch_table(out.summary.systemic_class, reg);
  return out;
}

RobustnessReport robustness_suite(const RiskRegister& reg, std::span<const Measure> measures,
                                  const PipelineConfig& config, int sensitivity_trials) {
  std::vector<Measure> order{Measure::Cosine};
  for (Measure m : measures) {
    if (std::find(order.begin(), order.end(), m) == order.end()) order.push_back(m);
  }
  RobustnessReport report;
  report.vector_length = static_cast<int>(std::max<std::size_t>(reg.tag_count(), 1));
  Assignment reference;
  for (Measure m : order) {
    MeasureAnalysis run = analyze_measure(reg, m, config);
    MeasureOutcome outcome;
    outcome.measure = m;
    outcome.mismatch = run.mismatch;
    outcome.assignment = run.consensus.partition.assignment;
    outcome.module_count = run.consensus.partition.module_count();
    if (m == Measure::Cosine) reference = outcome.assignment;
    outcome.match_fraction = match_fraction(outcome.assignment, reference);
    report.outcomes.push_back(std::move(outcome));
    report.curves.push_back(
        {m, sensitivity_curve(report.vector_length, m, sensitivity_trials, derive_seed(config.seed, {3}))});
  }
  return report;
}

void write_mismatch_csv(std::ostream& out, const RobustnessReport& report) {
  csv::write_row(out, {"measure", "systemic_ge_independent", "systemic_lt_independent"});
  for (const auto& o : report.outcomes) {
    csv::write_row(out, {std::string(to_string(o.measure)),
                         std::to_string(o.mismatch.systemic_at_least_independent),
                         std::to_string(o.mismatch.systemic_below_independent)});
  }
}

void write_match_csv(std::ostream& out, const RobustnessReport& report) {
  csv::write_row(out, {"measure", "match_fraction", "module_count"});
  for (const auto& o : report.outcomes) {
    csv::write_row(out, {std::string(to_string(o.measure)), csv::format_double(o.match_fraction),
                         std::to_string(o.module_count)});
  }
}

void write_sensitivity_csv(std::ostream& out, const RobustnessReport& report) {
  csv::write_row(out, {"measure", "step", "fraction_shared", "mean_similarity"});
  for (const auto& curve : report.curves) {
    for (const auto& p : curve.points) {
      csv::write_row(out, {std::string(to_string(curve.measure)), std::to_string(p.step),
                           csv::format_double(static_cast<double>(p.step) / report.vector_length),
                           csv::format_double(p.mean_similarity)});
    }
  }
}

nlohmann::json to_json(const RobustnessReport& report) {
  nlohmann::json j;
  j["vector_length"] = report.vector_length;
  auto& measures = j["measures"] = nlohmann::json::array();
  for (const auto& o : report.outcomes) {
    measures.push_back({{"measure", to_string(o.measure)},
                        {"systemic_ge_independent", o.mismatch.systemic_at_least_independent},
                        {"systemic_lt_independent", o.mismatch.systemic_below_independent},
                        {"match_fraction", o.match_fraction},
                        {"module_count", o.module_count}});
  }
  return j;
}

}  // namespace risknet
