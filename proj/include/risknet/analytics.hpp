#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "risknet/cascade.hpp"
#include "risknet/community.hpp"
#include "risknet/register.hpp"
#include "risknet/similarity.hpp"

namespace risknet {

// ---------------------------------------------------------------------------
// Horizon scanning

struct HorizonRow {
  std::string firm;
  std::size_t risk_count = 0;
  std::vector<std::size_t> module_counts;
  /// Unrounded percentages of the firm's risks per module.
  std::vector<double> percent;
};

struct HorizonTable {
  std::size_t module_count = 0;
  std::vector<HorizonRow> rows;  ///< sorted by firm label
};

HorizonTable horizon_table(const RiskRegister& reg, std::span<const int> assignment);

struct CoverageGap {
  std::string firm;
  std::vector<int> missing_modules;  ///< 0-based labels
};

std::vector<CoverageGap> coverage_gaps(const HorizonTable& table);

/// Percentages rounded to one decimal place, modules numbered from 1.
void write_horizon_markdown(std::ostream& out, const HorizonTable& table);
void write_horizon_csv(std::ostream& out, const HorizonTable& table);
nlohmann::json to_json(const HorizonTable& table);

// ---------------------------------------------------------------------------
// Liability network

struct LiabilityNetwork {
  std::vector<std::string> firms;
  std::vector<std::size_t> risk_counts;
  /// Row-major firms x firms: mean direct triggering events per run from
  /// firm i's risks to firm j's risks, divided by firm i's risk count.
  /// The diagonal holds within-firm weights and is not part of the graph.
  std::vector<double> weights;
  std::vector<double> in_degree;   ///< weighted, self-links excluded
  std::vector<double> out_degree;  ///< weighted, self-links excluded

  double weight(std::size_t from, std::size_t to) const { return weights[from * firms.size() + to]; }
};

/// Counts direct triggering events only; multi-hop attribution is not made.
LiabilityNetwork liability_network(const RiskRegister& reg, const CascadeTotals& totals);

nlohmann::json to_json(const LiabilityNetwork& net);
/// source,target,weight for every inter-firm link with positive weight.
void write_liability_csv(std::ostream& out, const LiabilityNetwork& net);

// ---------------------------------------------------------------------------
// Emerging risks

struct EmergingRiskRow {
  int rank = 0;
  int risk_id = 0;
  std::string title;
  std::string firm_id;
  double mean_impact = 0.0;
  Impact systemic_class = Impact::Low;
  Impact independent_impact = Impact::Low;
  Mismatch mismatch = Mismatch::Equal;
};

/// Top `top_k` risks by systemic rank; top_k above n is clamped with a warning.
std::vector<EmergingRiskRow> emerging_risk_report(const CascadeSummary& summary, const RiskRegister& reg,
                                                  std::size_t top_k);

void write_emerging_csv(std::ostream& out, std::span<const EmergingRiskRow> rows);
nlohmann::json to_json(std::span<const EmergingRiskRow> rows);

// ---------------------------------------------------------------------------
// Whole-pipeline run for one similarity measure, and the robustness harness

struct PipelineConfig {
  std::size_t ensemble_size = 1000;
  std::size_t cascade_runs = 1000;
  int restarts = 10;
  std::uint64_t seed = 0;
  EnsembleMode mode = EnsembleMode::Resample;
  unsigned threads = 1;
};

struct MeasureAnalysis {
  Measure measure = Measure::Cosine;
  SimilarityMatrix similarity;
  GraphEnsemble ensemble;
  Consensus consensus;
  CascadeTotals cascades;
  CascadeSummary summary;
  MismatchCounts mismatch;
};

/// similarity -> ensemble -> consensus modules -> cascades -> classes.
/// Resample-mode cascade run r reuses ensemble member r's seed.
MeasureAnalysis analyze_measure(const RiskRegister& reg, Measure m, const PipelineConfig& config);

struct MeasureOutcome {
  Measure measure = Measure::Cosine;
  MismatchCounts mismatch;
  /// Share of risks whose aligned consensus module equals the Cosine one.
  double match_fraction = 0.0;
  std::size_t module_count = 0;
  Assignment assignment;
};

struct SensitivityCurve {
  Measure measure = Measure::Cosine;
  std::vector<SensitivityPoint> points;
};

struct RobustnessReport {
  std::vector<MeasureOutcome> outcomes;  ///< Cosine first
  std::vector<SensitivityCurve> curves;
  int vector_length = 0;
};

/// Cosine is always run (as the reference) even if absent from `measures`.
RobustnessReport robustness_suite(const RiskRegister& reg, std::span<const Measure> measures,
                                  const PipelineConfig& config, int sensitivity_trials = 100);

void write_mismatch_csv(std::ostream& out, const RobustnessReport& report);
void write_match_csv(std::ostream& out, const RobustnessReport& report);
void write_sensitivity_csv(std::ostream& out, const RobustnessReport& report);
nlohmann::json to_json(const RobustnessReport& report);

}  // namespace risknet
