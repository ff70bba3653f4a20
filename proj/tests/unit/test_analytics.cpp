#include <doctest.h>

#include <cmath>
#include <sstream>

#include "risknet/analytics.hpp"
#include "risknet/diagnostics.hpp"

using namespace risknet;

namespace {

RiskRegister make_register(const std::vector<std::string>& firms, const std::vector<Impact>& impacts = {}) {
  std::vector<RiskRecord> risks;
  for (std::size_t i = 0; i < firms.size(); ++i) {
    risks.push_back({static_cast<int>(i + 1), "risk " + std::to_string(i + 1), firms[i],
                     impacts.empty() ? Impact::Low : impacts[i], {1}});
  }
  return RiskRegister({"t"}, std::move(risks));
}

}  // namespace

TEST_CASE("horizon table percentages") {
  // firm A: 5 risks in modules 0,0,2,2,4 ; firm B: 1 risk in module 1
  const auto reg = make_register({"A", "A", "B", "A", "A", "A"});
  const Assignment modules{0, 0, 1, 2, 2, 4};
  const auto table = horizon_table(reg, modules);
  CHECK(table.module_count == 5);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].firm == "A");
  CHECK(table.rows[0].percent == std::vector<double>{40.0, 0.0, 40.0, 0.0, 20.0});
  CHECK(table.rows[1].percent == std::vector<double>{0.0, 100.0, 0.0, 0.0, 0.0});

  const auto gaps = coverage_gaps(table);
  CHECK(gaps[0].missing_modules == std::vector<int>{1, 3});
  CHECK(gaps[1].missing_modules == std::vector<int>{0, 2, 3, 4});

  std::ostringstream md;
  write_horizon_markdown(md, table);
  CHECK(md.str().find("| A | 40.0 | 0.0 | 40.0 | 0.0 | 20.0 |") != std::string::npos);
  std::ostringstream csv_out;
  write_horizon_csv(csv_out, table);
  CHECK(csv_out.str().find("B,1,0.0,100.0,0.0,0.0,0.0\n") != std::string::npos);
  const auto j = to_json(table);
  CHECK(j["firms"][0]["uncovered_modules"] == nlohmann::json::array({2, 4}));
}

TEST_CASE("horizon table rounding to one decimal") {
  // 14 risks: 5 / 0 / 5 / 0 / 4 gives 35.7, 0.0, 35.7, 0.0, 28.6 once rounded
  std::vector<std::string> firms(14, "A");
  Assignment modules;
  for (int m : {0, 2}) modules.insert(modules.end(), 5, m);
  modules.insert(modules.end(), 4, 4);
  const auto table = horizon_table(make_register(firms), modules);
  std::ostringstream md;
  write_horizon_markdown(md, table);
  CHECK(md.str().find("| A | 35.7 | 0.0 | 35.7 | 0.0 | 28.6 |") != std::string::npos);
}

TEST_CASE("horizon percentages sum to 100 for every firm") {
  SyntheticSpec spec;
  spec.firms = 9;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    spec.seed = seed;
    const auto syn = synthesize_register(spec);
    const auto table = horizon_table(syn.reg, syn.planted);
    for (const auto& row : table.rows) {
      double sum = 0.0;
      for (double p : row.percent) sum += p;
      CHECK(std::abs(sum - 100.0) < 1e-9);
    }
  }
}

TEST_CASE("single firm, single module") {
  const auto table = horizon_table(make_register({"Z", "Z", "Z"}), Assignment{0, 0, 0});
  CHECK(table.rows[0].percent == std::vector<double>{100.0});
  CHECK(coverage_gaps(table)[0].missing_modules.empty());
}

TEST_CASE("liability network normalization") {
  // firm A reports risks 0 and 1; risk 0 triggers risk 2 (firm B) with certainty
  const auto reg = make_register({"A", "A", "B"});
  SimilarityMatrix sim(3, Measure::Cosine);
  sim.set(0, 2, 1.0);
  CascadeConfig cfg;
  cfg.runs = 50;
  const auto totals = simulate_cascades(sim, cfg);
  const auto net = liability_network(reg, totals);
  REQUIRE(net.firms == std::vector<std::string>{"A", "B"});
  // per run: 0 -> 2 once (seed 0) ; 2 -> 0 once (seed 2)
  CHECK(net.weight(0, 1) == doctest::Approx(0.5));
  CHECK(net.weight(1, 0) == doctest::Approx(1.0));
  CHECK(net.out_degree[0] == doctest::Approx(0.5));
  CHECK(net.in_degree[0] == doctest::Approx(1.0));
  const auto j = to_json(net);
  CHECK(j["links"].size() == 2);
  std::ostringstream out;
  write_liability_csv(out, net);
  CHECK(out.str() == "source,target,weight\nA,B,0.5\nB,A,1\n");
}

TEST_CASE("single-firm register has no inter-firm links") {
  const auto reg = make_register({"A", "A", "A"});
  SimilarityMatrix sim(3, Measure::Cosine);
  sim.set(0, 1, 1.0);
  sim.set(1, 2, 1.0);
  CascadeConfig cfg;
  cfg.runs = 5;
  const auto net = liability_network(reg, simulate_cascades(sim, cfg));
  CHECK(to_json(net)["links"].empty());
  CHECK(net.weight(0, 0) > 0.0);  // within-firm weight is still reported
  CHECK(net.out_degree[0] == 0.0);
}

TEST_CASE("liability out-weights are bounded by trigger totals") {
  SyntheticSpec spec;
  spec.risks_per_module = 4;
  spec.firms = 4;
  spec.noise_rate = 0.1;
  const auto syn = synthesize_register(spec);
  const auto sim = similarity_matrix(syn.reg, Measure::Cosine);
  CascadeConfig cfg;
  cfg.runs = 30;
  const auto totals = simulate_cascades(sim, cfg);
  const auto net = liability_network(syn.reg, totals);
  const std::size_t n = syn.reg.size();
  for (std::size_t f = 0; f < net.firms.size(); ++f) {
    std::uint64_t events = 0;
    for (std::size_t u = 0; u < n; ++u) {
      if (syn.reg.firm_index()[u] != f) continue;
      for (std::size_t v = 0; v < n; ++v) events += totals.triggers[u * n + v];
    }
    const double bound = static_cast<double>(events) / 30.0 / static_cast<double>(net.risk_counts[f]);
    CHECK(net.out_degree[f] <= bound + 1e-12);
    for (std::size_t g = 0; g < net.firms.size(); ++g) {
      CHECK(std::isfinite(net.weight(f, g)));
      CHECK(net.weight(f, g) >= 0.0);
    }
  }
}

TEST_CASE("emerging risk report") {
  const auto reg = make_register({"A", "B", "C"}, {Impact::Low, Impact::High, Impact::Medium});
  CascadeSummary s;
  s.mean_impact = {1.0, 9.0, 4.0};
  s.rank = {3, 1, 2};
  s.systemic_class = {Impact::Low, Impact::High, Impact::Medium};
  const auto rows = emerging_risk_report(s, reg, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].risk_id == 2);
  CHECK(rows[1].risk_id == 3);
  CHECK(rows[0].mismatch == Mismatch::Equal);
  CHECK(emerging_risk_report(s, reg, 0).empty());

  std::vector<std::string> warnings;
  ScopedWarningHandler guard([&](std::string_view w) { warnings.emplace_back(w); });
  CHECK(emerging_risk_report(s, reg, 10).size() == 3);
  CHECK(warnings.size() == 1);

  std::ostringstream out;
  write_emerging_csv(out, rows);
  CHECK(out.str().find("1,2,risk 2,B,9,High,High,equal") != std::string::npos);
}

TEST_CASE("robustness suite on a planted register") {
  SyntheticSpec spec;
  spec.noise_rate = 0.05;
  spec.seed = 4;
  const auto syn = synthesize_register(spec);
  PipelineConfig cfg;
  cfg.ensemble_size = 30;
  cfg.cascade_runs = 40;
  cfg.restarts = 3;
  cfg.seed = 2;
  const std::vector<Measure> measures{Measure::Cosine, Measure::Dice, Measure::LanceWilliams};
  const auto report = robustness_suite(syn.reg, measures, cfg, 10);
  REQUIRE(report.outcomes.size() == 3);
  CHECK(report.outcomes[0].measure == Measure::Cosine);
  CHECK(report.outcomes[0].match_fraction == 1.0);
  CHECK(report.outcomes[1].match_fraction > 0.95);
  // identical similarity matrices give identical downstream results
  CHECK(report.outcomes[1].assignment == report.outcomes[2].assignment);
  CHECK(report.outcomes[1].mismatch == report.outcomes[2].mismatch);
  for (const auto& o : report.outcomes) {
    CHECK(o.mismatch.systemic_at_least_independent + o.mismatch.systemic_below_independent == syn.reg.size());
  }
  REQUIRE(report.curves.size() == 3);
  CHECK(report.curves[0].points.back().mean_similarity == 1.0);

  const auto only_cosine = robustness_suite(syn.reg, std::vector<Measure>{}, cfg, 2);
  REQUIRE(only_cosine.outcomes.size() == 1);
  CHECK(only_cosine.outcomes[0].match_fraction == 1.0);

  std::ostringstream mismatch, match, sens;
  write_mismatch_csv(mismatch, report);
  write_match_csv(match, report);
  write_sensitivity_csv(sens, report);
  CHECK(mismatch.str().starts_with("measure,systemic_ge_independent,systemic_lt_independent\ncosine,"));
  CHECK(match.str().find("lancewilliams,") != std::string::npos);
  CHECK(sens.str().find("dice,20,1,1\n") != std::string::npos);
}

TEST_CASE("the full pipeline recovers planted classes") {
  PipelineConfig cfg;
  cfg.ensemble_size = 100;
  cfg.cascade_runs = 50;
  cfg.seed = 1;

  SUBCASE("two blocks of twenty risks, twelve tags each") {
    SyntheticSpec spec;
    spec.num_modules = 2;
    spec.risks_per_module = 20;
    spec.tags_per_module = 12;
    spec.noise_rate = 0.05;
    spec.seed = 7;
    const auto syn = synthesize_register(spec);
    const auto run = analyze_measure(syn.reg, Measure::Cosine, cfg);
    CHECK(nmi(run.consensus.partition.assignment, syn.planted) >= 0.9);
  }

  SUBCASE("five blocks at noise 0.05: confident consensus") {
    SyntheticSpec spec;
    spec.noise_rate = 0.05;
    spec.seed = 7;
    const auto syn = synthesize_register(spec);
    const auto run = analyze_measure(syn.reg, Measure::Cosine, cfg);
    CHECK(nmi(run.consensus.partition.assignment, syn.planted) >= 0.9);
    CHECK(run.consensus.partition.module_count() == 5);
    double mean = 0.0;
    for (double c : run.consensus.confidence) mean += c;
    CHECK(mean / static_cast<double>(run.consensus.confidence.size()) > 0.9);
  }
}
