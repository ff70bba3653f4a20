#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "risknet/register.hpp"

namespace risknet {

/// Type 1 (positive-match only) binary similarity measures.
enum class Measure : std::uint8_t { Cosine, Dice, Jaccard, LanceWilliams, Sorgenfrei, MinimalTest };

inline constexpr std::array<Measure, 6> kAllMeasures = {
    Measure::Cosine,     Measure::Dice,       Measure::Jaccard,
    Measure::LanceWilliams, Measure::Sorgenfrei, Measure::MinimalTest};

/// CLI spelling: cosine, dice, jaccard, lancewilliams, sorgenfrei, mintest.
std::string_view to_string(Measure m);
std::optional<Measure> parse_measure(std::string_view text);

struct MatchCounts {
  int a = 0;  ///< positive in both
  int b = 0;  ///< positive only in the first vector
  int c = 0;  ///< positive only in the second vector

  bool operator==(const MatchCounts&) const = default;
};

/// Throws Error on length mismatch.
MatchCounts match_counts(std::span<const std::uint8_t> u, std::span<const std::uint8_t> v);

/// Similarity from match counts. Returns 0 when either vector has no
/// positive entry (a+b == 0 or a+c == 0).
double similarity(const MatchCounts& counts, Measure m);
double similarity(std::span<const std::uint8_t> u, std::span<const std::uint8_t> v, Measure m);

/// Symmetric n x n matrix with a zero diagonal.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(std::size_t n, Measure measure);

  std::size_t size() const { return n_; }
  Measure measure() const { return measure_; }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  /// Sets both (i,j) and (j,i). i != j.
  void set(std::size_t i, std::size_t j, double value);

  std::span<const double> row(std::size_t i) const { return {values_.data() + i * n_, n_}; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const SimilarityMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  Measure measure_ = Measure::Cosine;
  std::vector<double> values_;
};

/// Pairwise similarities of all risks. Emits a warning naming each risk
/// that has no positive characteristic.
SimilarityMatrix similarity_matrix(const RiskRegister& reg, Measure m);

/// n x n CSV headered by risk_id, one row per risk.
void write_similarity_csv(std::ostream& out, const SimilarityMatrix& sim,
                          std::span<const int> risk_ids);

struct SensitivityPoint {
  int step = 0;
  double mean_similarity = 0.0;
};

/// Starts from an all-zero vector A and an all-ones vector B of the given
/// length and switches one random 0 entry of A to 1 per step, recording the
/// similarity after each step (step 0 .. length), averaged over trials.
std::vector<SensitivityPoint> sensitivity_curve(int length, Measure m, int trials,
                                                std::uint64_t seed);

}  // namespace risknet
