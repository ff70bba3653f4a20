#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "risknet/analytics.hpp"

namespace risknet {

struct RunConfig {
  std::filesystem::path input;
  Measure measure = Measure::Cosine;
  std::size_t ensemble_size = 1000;
  std::size_t cascade_runs = 1000;
  int restarts = 10;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  unsigned threads = 1;
  EnsembleMode mode = EnsembleMode::Resample;
  std::size_t top_k = 5;
  /// Ensemble member written as the sample network.
  std::size_t export_member = 0;
  /// Baseline comparisons for the NMI check; 0 skips it.
  std::size_t baseline_samples = 1000;
  int sensitivity_trials = 100;

  PipelineConfig pipeline() const;
  /// Throws InputError when a count is zero or a member index is out of range.
  void check() const;
};

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Runs the full single-measure analysis and writes every artifact plus
/// manifest.json into config.out. Returns the manifest. Errors are
/// rethrown with the failing stage prefixed to the message. Progress goes
/// to `log` when non-null.
nlohmann::json run_analyze(const RunConfig& config, std::ostream* log = nullptr);

/// Robustness harness over `measures`; writes mismatch, match and
/// sensitivity CSVs, a JSON report and manifest.json.
nlohmann::json run_robustness(const RunConfig& config, const std::vector<Measure>& measures,
                              std::ostream* log = nullptr);

struct WhatIfResult {
  int risk_id = 0;
  double mean_impact = 0.0;
  std::size_t runs = 0;
};

/// Mean cascade size of one seed risk under the configured measure/mode.
WhatIfResult run_single_cascade(const RunConfig& config, int risk_id);

}  // namespace risknet
