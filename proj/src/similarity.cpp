#include "risknet/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "risknet/csv.hpp"
#include "risknet/diagnostics.hpp"
#include "risknet/random.hpp"

namespace risknet {

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::Cosine: return "cosine";
    case Measure::Dice: return "dice";
    case Measure::Jaccard: return "jaccard";
    case Measure::LanceWilliams: return "lancewilliams";
    case Measure::Sorgenfrei: return "sorgenfrei";
    case Measure::MinimalTest: return "mintest";
  }
  return "cosine";
}

std::optional<Measure> parse_measure(std::string_view text) {
  for (Measure m : kAllMeasures) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

MatchCounts match_counts(std::span<const std::uint8_t> u, std::span<const std::uint8_t> v) {
  if (u.size() != v.size()) {
    throw Error("match_counts: vectors differ in length (" + std::to_string(u.size()) + " vs " +
                std::to_string(v.size()) + ")");
  }
  MatchCounts mc;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const bool x = u[k] != 0;
    const bool y = v[k] != 0;
    mc.a += x && y;
    mc.b += x && !y;
    mc.c += !x && y;
  }
  return mc;
}

double similarity(const MatchCounts& mc, Measure m) {
  const int a = mc.a, b = mc.b, c = mc.c;
  if (a + b == 0 || a + c == 0) return 0.0;
  const double da = a, db = b, dc = c;
  switch (m) {
    case Measure::Cosine:
      // for binary vectors u.v = a, u.u = a+b, v.v = a+c
      return da / std::sqrt((da + db) * (da + dc));
    case Measure::Dice:
      return 2.0 * da / (2.0 * da + db + dc);
    case Measure::Jaccard:
      return da / (da + db + dc);
    case Measure::LanceWilliams: {
      // 1 - (b+c)/(2a+b+c), with the subtraction done on integers
      const int denom = 2 * a + b + c;
      return static_cast<double>(denom - (b + c)) / static_cast<double>(denom);
    }
    case Measure::Sorgenfrei:
      return da * da / ((da + db) * (da + dc));
    case Measure::MinimalTest: {
      const double total = da + db + dc;
      if (b + c == 0) return 1.0;  // a/(b+c) is +inf, min resolves to a+b+c
      return std::min(da / (db + dc), total) / total;
    }
  }
  return 0.0;
}

double similarity(std::span<const std::uint8_t> u, std::span<const std::uint8_t> v, Measure m) {
  return similarity(match_counts(u, v), m);
}

SimilarityMatrix::SimilarityMatrix(std::size_t n, Measure measure)
    : n_(n), measure_(measure), values_(n * n, 0.0) {}

void SimilarityMatrix::set(std::size_t i, std::size_t j, double value) {
  values_[i * n_ + j] = value;
  values_[j * n_ + i] = value;
}

SimilarityMatrix similarity_matrix(const RiskRegister& reg, Measure m) {
  const std::size_t n = reg.size();
  SimilarityMatrix sim(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ci = reg[i].characteristics;
    if (std::none_of(ci.begin(), ci.end(), [](auto f) { return f != 0; })) {
      warn("risk " + std::to_string(reg[i].risk_id) +
           " has no positive characteristic; its similarities are set to 0");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      sim.set(i, j, similarity(reg[i].characteristics, reg[j].characteristics, m));
    }
  }
  return sim;
}

void write_similarity_csv(std::ostream& out, const SimilarityMatrix& sim,
                          std::span<const int> risk_ids) {
  std::vector<std::string> fields;
  fields.push_back("risk_id");
  for (int id : risk_ids) fields.push_back(std::to_string(id));
  csv::write_row(out, fields);
  for (std::size_t i = 0; i < sim.size(); ++i) {
    fields.clear();
    fields.push_back(std::to_string(risk_ids[i]));
    for (std::size_t j = 0; j < sim.size(); ++j) fields.push_back(csv::format_double(sim(i, j)));
    csv::write_row(out, fields);
  }
}

std::vector<SensitivityPoint> sensitivity_curve(int length, Measure m, int trials,
                                                std::uint64_t seed) {
  if (length < 1) throw Error("sensitivity_curve: length must be at least 1");
  if (trials < 1) throw Error("sensitivity_curve: trials must be at least 1");
  const auto k = static_cast<std::size_t>(length);
  std::vector<double> sums(k + 1, 0.0);
  const std::vector<std::uint8_t> target(k, 1);
  std::vector<std::size_t> order(k);
  for (int t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, {static_cast<std::uint64_t>(t)});
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(std::span(order), rng);
    std::vector<std::uint8_t> probe(k, 0);
    sums[0] += similarity(probe, target, m);
    for (std::size_t step = 0; step < k; ++step) {
      probe[order[step]] = 1;
      sums[step + 1] += similarity(probe, target, m);
    }
  }
  std::vector<SensitivityPoint> curve;
  curve.reserve(k + 1);
  for (std::size_t s = 0; s <= k; ++s) {
    curve.push_back({static_cast<int>(s), sums[s] / trials});
  }
  return curve;
}

}  // namespace risknet
