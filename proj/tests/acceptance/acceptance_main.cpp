// Acceptance harness: one PASS/FAIL/SKIP line per criterion. Exits nonzero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "risknet/analytics.hpp"
#include "risknet/diagnostics.hpp"
#include "risknet/pipeline.hpp"

using namespace risknet;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kIdentityTol = 1e-12;
constexpr double kModularityZeroTol = 1e-12;
constexpr double kClosedFormTol = 1e-9;
constexpr double kStandardErrors = 3.0;
constexpr double kNmiMin = 0.9;
constexpr double kMatchMin = 0.95;
constexpr double kGoldenMeanRel = 0.05;
constexpr double kGoldenNmiAbs = 0.03;

constexpr double kBudget1 = 1.0;
constexpr double kBudget2 = 30.0;
constexpr double kBudget4 = 120.0;
constexpr double kBudget6 = 120.0;

// Planted-partition register and pipeline seeds for criterion 6.
constexpr std::uint64_t kPlantedRegisterSeed = 7;
constexpr std::uint64_t kPlantedPipelineSeed = 1;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Outcome {
  enum Status { Pass, Fail, Skip } status = Pass;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      status = Fail;
      notes.push_back("FAILED " + what);
    }
  }
  void note(const std::string& what) { notes.push_back(what); }
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

WeightedGraph two_cliques() {
  std::vector<Edge> edges;
  for (int base : {0, 4}) {
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) edges.push_back({base + i, base + j, 1.0});
    }
  }
  return WeightedGraph(8, std::move(edges));
}

Outcome measure_identities() {
  Outcome out;
  Stopwatch clock;
  Rng rng(derive_seed(1, {0xac1}));
  constexpr int kPairs = 10000;
  constexpr int kLength = 24;
  int dice_lw = 0, sorg_cos = 0, jaccard_dice = 0;
  std::vector<std::uint8_t> u(kLength), v(kLength);
  for (int p = 0; p < kPairs; ++p) {
    for (int k = 0; k < kLength; ++k) {
      u[k] = uniform01(rng) < 0.5;
      v[k] = uniform01(rng) < 0.5;
    }
    const auto counts = match_counts(u, v);
    const double dice = similarity(counts, Measure::Dice);
    const double cosine = similarity(counts, Measure::Cosine);
    if (dice != similarity(counts, Measure::LanceWilliams)) ++dice_lw;
    if (std::abs(similarity(counts, Measure::Sorgenfrei) - cosine * cosine) >= kIdentityTol) ++sorg_cos;
    if (similarity(counts, Measure::Jaccard) > dice) ++jaccard_dice;
  }
  const double elapsed = clock.seconds();
  out.require(dice_lw == 0, "Dice != Lance-Williams in " + std::to_string(dice_lw) + " pairs");
  out.require(sorg_cos == 0, "Sorgenfrei != Cosine^2 in " + std::to_string(sorg_cos) + " pairs");
  out.require(jaccard_dice == 0, "Jaccard > Dice in " + std::to_string(jaccard_dice) + " pairs");
  out.require(elapsed < kBudget1, "runtime " + fmt(elapsed) + " s >= 1 s");
  out.note(std::to_string(kPairs) + " pairs, " + fmt(elapsed) + " s");
  return out;
}

Outcome modularity_oracle() {
  Outcome out;
  Stopwatch clock;
  Rng rng(derive_seed(2, {0xac2}));
  double worst = 0.0;
  int graphs = 0;
  while (graphs < 100) {
    const std::size_t n = 2 + uniform_index(rng, 30);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (uniform01(rng) < 0.3) edges.push_back({int(i), int(j), 0.01 + 0.99 * uniform01(rng)});
      }
    }
    if (edges.empty()) continue;
    const WeightedGraph g(n, std::move(edges));
    worst = std::max(worst, std::abs(modularity(g, Assignment(n, 0))));
    ++graphs;
  }
  out.require(worst < kModularityZeroTol, "|Q(all-in-one)| reached " + fmt(worst));

  const WeightedGraph g = two_cliques();
  const auto dense = oracle::dense(g);
  double best = -1.0;
  std::vector<std::vector<int>> argmax;
  std::size_t partitions = 0;
  oracle::for_each_partition(8, [&](const std::vector<int>& labels) {
    ++partitions;
    const double q = oracle::modularity(dense, labels);
    if (q > best + 1e-12) {
      best = q;
      argmax = {labels};
    } else if (std::abs(q - best) <= 1e-12) {
      argmax.push_back(labels);
    }
  });
  const std::vector<int> components{0, 0, 0, 0, 1, 1, 1, 1};
  out.require(partitions == 4140, "enumerated " + std::to_string(partitions) + " partitions, expected 4140");
  out.require(std::abs(best - 0.5) < kIdentityTol, "brute-force maximum " + fmt(best));
  out.require(argmax.size() == 1 && argmax[0] == components, "maximizer is not the component partition");

  int found = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto p = detect_modules(g, seed);
    if (canonical_labels(p.assignment) == components && std::abs(p.q - 0.5) < kIdentityTol) ++found;
  }
  out.require(found == 50, "detect_modules found the components in " + std::to_string(found) + "/50 runs");
  const double elapsed = clock.seconds();
  out.require(elapsed < kBudget2, "runtime " + fmt(elapsed) + " s");
  out.note("max Q " + fmt(best) + " over " + std::to_string(partitions) + " partitions, " +
           std::to_string(found) + "/50 seeded runs, " + fmt(elapsed) + " s");
  return out;
}

Outcome validation_conditions() {
  Outcome out;
  const WeightedGraph g = two_cliques();
  const auto p = detect_modules(g, 0);
  const auto r = validate(g, p);
  // each node has three unit-weight neighbors; L = 12 so sqrt(2L) = sqrt(24)
  out.require(r.k_max == 3.0, "k_max " + fmt(r.k_max));
  out.require(r.links == 12, "L " + std::to_string(r.links));
  out.require(std::abs(r.sqrt_2l - std::sqrt(24.0)) < kIdentityTol, "sqrt(2L) " + fmt(r.sqrt_2l));
  out.require(r.suitable, "3 < sqrt(24) not reported as suitable");
  out.require(r.inter_module_links == 0, "inter-module links " + std::to_string(r.inter_module_links));
  out.require(r.resolution.size() == 2, "module count");
  for (const auto& m : r.resolution) {
    out.require(m.internal_links == 6 && m.self_consistent, "module " + std::to_string(m.module + 1));
  }
  out.note("k_max 3, sqrt(2L) " + fmt(r.sqrt_2l) + ", l = 6, 6; published values checked under criterion 9");
  return out;
}

Outcome cascade_oracle() {
  Outcome out;
  Stopwatch clock;
  constexpr int kRuns = 100000;
  const auto graphs = oracle::small_connected_graphs();
  out.require(graphs.size() >= 50, "only " + std::to_string(graphs.size()) + " graphs");
  int misses = 0;
  double worst_z = 0.0;
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    const auto& g = graphs[k];
    const std::size_t seed_node = k % g.node_count();
    const double exact = oracle::expected_reach(g, seed_node);
    Rng rng(derive_seed(4, {0xac4, k}));
    double sum = 0.0, sum_sq = 0.0;
    for (int r = 0; r < kRuns; ++r) {
      const double x = static_cast<double>(run_cascade(g, seed_node, rng));
      sum += x;
      sum_sq += x * x;
    }
    const double mean = sum / kRuns;
    const double var = std::max(0.0, (sum_sq - kRuns * mean * mean) / (kRuns - 1));
    const double se = std::sqrt(var / kRuns);
    const double diff = std::abs(mean - exact);
    if (se > 0.0) worst_z = std::max(worst_z, diff / se);
    if (diff > kStandardErrors * se + 1e-12) {
      ++misses;
      out.note("graph " + std::to_string(k) + ": MC " + fmt(mean) + " vs exact " + fmt(exact));
    }
  }
  const double elapsed = clock.seconds();
  out.require(misses == 0, std::to_string(misses) + " graphs outside 3 SE");
  out.require(elapsed < kBudget4, "runtime " + fmt(elapsed) + " s");
  out.note(std::to_string(graphs.size()) + " graphs x " + std::to_string(kRuns) + " runs, max |z| " +
           fmt(worst_z) + ", " + fmt(elapsed) + " s");
  return out;
}

Outcome classifier() {
  Outcome out;
  Rng rng(derive_seed(5, {0xac5}));
  int count_errors = 0, nondeterministic = 0, mismatch_errors = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 60);
    CascadeTotals totals;
    totals.node_count = n;
    totals.runs = 10;
    const std::uint64_t spread = 1 + uniform_index(rng, 5);  // small spread forces ties
    for (std::size_t i = 0; i < n; ++i) totals.materialized.push_back(uniform_index(rng, spread));

    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 1);
    shuffle(std::span(ids), rng);

    ImpactCounts counts;
    counts.high = uniform_index(rng, n + 1);
    counts.medium = uniform_index(rng, n - counts.high + 1);
    counts.low = n - counts.high - counts.medium;

    const auto ranks = rank_by_impact(totals, ids);
    const auto classes = classify(ranks, counts);
    std::size_t h = 0, m = 0, l = 0;
    for (Impact c : classes) (c == Impact::High ? h : c == Impact::Medium ? m : l)++;
    if (h != counts.high || m != counts.medium || l != counts.low) ++count_errors;

    // same risks presented in reverse order must get the same class per id
    CascadeTotals reversed = totals;
    std::reverse(reversed.materialized.begin(), reversed.materialized.end());
    std::vector<int> reversed_ids(ids.rbegin(), ids.rend());
    const auto classes_rev = classify(rank_by_impact(reversed, reversed_ids), counts);
    for (std::size_t i = 0; i < n; ++i) {
      if (classes_rev[n - 1 - i] != classes[i]) {
        ++nondeterministic;
        break;
      }
    }
    if (classify(ranks, counts) != classes) ++nondeterministic;

    std::vector<RiskRecord> risks;
    for (std::size_t i = 0; i < n; ++i) {
      risks.push_back({ids[i], "r", "A", static_cast<Impact>(uniform_index(rng, 3)), {1}});
    }
    const RiskRegister reg({"t"}, std::move(risks));
    const auto mt = mismatch_table(classes, reg);
    if (mt.systemic_at_least_independent + mt.systemic_below_independent != n) ++mismatch_errors;
  }
  out.require(count_errors == 0, std::to_string(count_errors) + " configurations changed class counts");
  out.require(nondeterministic == 0, std::to_string(nondeterministic) + " configurations depend on input order");
  out.require(mismatch_errors == 0, std::to_string(mismatch_errors) + " mismatch tables do not sum to n");
  out.note("1000 configurations");
  return out;
}

Outcome planted_recovery() {
  Outcome out;
  Stopwatch clock;
  SyntheticSpec spec;
  spec.num_modules = 5;
  spec.risks_per_module = 10;
  spec.tags_per_module = 4;
  spec.noise_rate = 0.05;
  spec.seed = kPlantedRegisterSeed;
  const auto syn = synthesize_register(spec);

  PipelineConfig cfg;
  cfg.ensemble_size = 100;
  cfg.seed = kPlantedPipelineSeed;
  const auto report = robustness_suite(syn.reg, kAllMeasures, cfg);
  const double elapsed = clock.seconds();

  const auto& cosine = report.outcomes.at(0);
  const double recovered = nmi(cosine.assignment, syn.planted);
  out.require(recovered >= kNmiMin, "consensus NMI vs planted " + fmt(recovered));

  auto fraction = [&](Measure m) {
    for (const auto& o : report.outcomes) {
      if (o.measure == m) return o.match_fraction;
    }
    return -1.0;
  };
  std::string detail = "NMI " + fmt(recovered);
  for (Measure m : {Measure::Dice, Measure::Jaccard, Measure::LanceWilliams}) {
    out.require(fraction(m) >= kMatchMin, std::string(to_string(m)) + " match " + fmt(fraction(m)));
    detail += ", " + std::string(to_string(m)) + " " + fmt(fraction(m));
  }
  const double minimal = fraction(Measure::MinimalTest);
  detail += ", mintest " + fmt(minimal);
  for (Measure m : {Measure::Dice, Measure::Jaccard, Measure::LanceWilliams}) {
    out.require(minimal < fraction(m), "mintest match " + fmt(minimal) + " not below " +
                                           std::string(to_string(m)) + " " + fmt(fraction(m)));
  }
  out.require(elapsed < kBudget6, "runtime " + fmt(elapsed) + " s");
  out.note(detail + ", " + fmt(elapsed) + " s");
  return out;
}

Outcome sensitivity() {
  Outcome out;
  constexpr int kLength = 24;
  std::vector<std::vector<SensitivityPoint>> curves;
  for (Measure m : kAllMeasures) {
    const auto c = sensitivity_curve(kLength, m, 100, derive_seed(7, {0xac7}));
    out.require(c.size() == kLength + 1, std::string(to_string(m)) + " curve length");
    out.require(c.front().mean_similarity == 0.0, std::string(to_string(m)) + " at step 0");
    out.require(c.back().mean_similarity == 1.0, std::string(to_string(m)) + " at step K");
    curves.push_back(c);
  }
  const auto& cos = curves[static_cast<std::size_t>(Measure::Cosine)];
  const auto& sorg = curves[static_cast<std::size_t>(Measure::Sorgenfrei)];
  double worst_cos = 0.0, worst_sorg = 0.0;
  bool ordered = true;
  for (int t = 0; t <= kLength; ++t) {
    const double x = static_cast<double>(t) / kLength;
    worst_cos = std::max(worst_cos, std::abs(cos[t].mean_similarity - std::sqrt(x)));
    worst_sorg = std::max(worst_sorg, std::abs(sorg[t].mean_similarity - x));
    if (t > 0 && t < kLength && !(sorg[t].mean_similarity < cos[t].mean_similarity)) ordered = false;
  }
  out.require(worst_cos < kClosedFormTol, "cosine deviates from sqrt(t/K) by " + fmt(worst_cos));
  out.require(worst_sorg < kClosedFormTol, "sorgenfrei deviates from t/K by " + fmt(worst_sorg));
  out.require(ordered, "sorgenfrei not below cosine on the interior");
  out.note("max deviation cosine " + fmt(worst_cos) + ", sorgenfrei " + fmt(worst_sorg));
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome out;
  const fs::path dir = fs::temp_directory_path() / "risknet_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  SyntheticSpec spec;
  spec.seed = 8;
  save_register(dir / "register.csv", synthesize_register(spec).reg);

  RunConfig cfg;
  cfg.input = dir / "register.csv";
  cfg.ensemble_size = 50;
  cfg.cascade_runs = 200;
  cfg.baseline_samples = 20;
  cfg.seed = 8;
  cfg.out = dir / "run1";
  run_analyze(cfg);
  cfg.out = dir / "run2";
  run_analyze(cfg);
  const std::string a = slurp(dir / "run1" / "manifest.json");
  const std::string b = slurp(dir / "run2" / "manifest.json");
  out.require(!a.empty() && a == b, "manifests differ");
  out.note("manifest sha256 " + sha256_hex(a).substr(0, 16));
  fs::remove_all(dir);
  return out;
}

bool within_rel(double value, double expected, double rel) {
  return std::abs(value - expected) <= rel * std::abs(expected);
}

Outcome published_goldens() {
  Outcome out;
  const char* env = std::getenv("RISKNET_REFERENCE_DATA");
  if (env == nullptr || !fs::exists(env)) {
    out.status = Outcome::Skip;
    out.note("original register not available (set RISKNET_REFERENCE_DATA)");
    return out;
  }
  const RiskRegister reg = load_register(env);
  PipelineConfig cfg;
  cfg.seed = 1;
  const auto report = robustness_suite(reg, kAllMeasures, cfg);
  const MeasureAnalysis cosine = analyze_measure(reg, Measure::Cosine, cfg);

  auto sizes = cosine.consensus.partition.module_sizes();
  std::sort(sizes.rbegin(), sizes.rend());
  out.require(sizes == std::vector<std::size_t>{47, 35, 25, 21, 16}, "module sizes");

  const std::vector<std::pair<Measure, MismatchCounts>> expected_mismatch{
      {Measure::Cosine, {96, 47}},        {Measure::Dice, {95, 48}},       {Measure::Jaccard, {95, 48}},
      {Measure::LanceWilliams, {95, 48}}, {Measure::Sorgenfrei, {94, 49}}};
  for (const auto& [m, counts] : expected_mismatch) {
    for (const auto& o : report.outcomes) {
      if (o.measure != m) continue;
      out.require(o.mismatch == counts, std::string(to_string(m)) + " mismatch (" +
                                            std::to_string(o.mismatch.systemic_at_least_independent) + ", " +
                                            std::to_string(o.mismatch.systemic_below_independent) + ")");
    }
  }

  const auto idx = reg.index_of(118);
  if (!idx) {
    out.require(false, "risk 118 missing");
  } else {
    const double mean = cosine.summary.mean_impact[*idx];
    out.require(within_rel(mean, 32.9, kGoldenMeanRel), "risk 118 mean " + fmt(mean));
    out.require(cosine.summary.rank[*idx] == 4, "risk 118 rank " + std::to_string(cosine.summary.rank[*idx]));
  }

  const auto horizon = horizon_table(reg, cosine.consensus.partition.assignment);
  const std::vector<double> firm_a{35.7, 0.0, 35.7, 0.0, 28.6};
  bool firm_ok = false;
  for (const auto& row : horizon.rows) {
    if (row.firm != "A" || row.percent.size() != firm_a.size()) continue;
    firm_ok = true;
    for (std::size_t k = 0; k < firm_a.size(); ++k) {
      firm_ok = firm_ok && std::abs(row.percent[k] - firm_a[k]) <= 0.05 + 1e-9;
    }
  }
  out.require(firm_ok, "firm A horizon row");

  const auto& graphs = cosine.ensemble.graphs;
  const auto summary = nmi_vs_random(graphs, cosine.consensus.members, derive_seed(cfg.seed, {2}), cfg.restarts,
                                     cfg.threads);
  out.require(std::abs(summary.mean - 0.0749) <= kGoldenNmiAbs, "NMI vs baseline " + fmt(summary.mean));

  const auto v = validate(graphs.at(0), cosine.consensus.partition);
  out.require(within_rel(v.k_max, 23.88, kGoldenMeanRel), "k_max " + fmt(v.k_max));
  out.require(within_rel(v.sqrt_2l, 54.79, kGoldenMeanRel), "sqrt(2L) " + fmt(v.sqrt_2l));
  const std::vector<double> links{307, 255, 114, 143, 90};
  bool links_ok = v.resolution.size() == links.size();
  for (std::size_t k = 0; links_ok && k < links.size(); ++k) {
    links_ok = within_rel(static_cast<double>(v.resolution[k].internal_links), links[k], kGoldenMeanRel);
  }
  out.require(links_ok, "module internal links");
  return out;
}

}  // namespace

int main() {
  // Warnings from synthetic data are expected and not part of the report.
  set_warning_handler([](std::string_view) {});

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 measure identities", measure_identities},
      {"2 modularity oracle", modularity_oracle},
      {"3 validation conditions", validation_conditions},
      {"4 cascade oracle", cascade_oracle},
      {"5 classifier", classifier},
      {"6 planted-partition recovery", planted_recovery},
      {"7 sensitivity curves", sensitivity},
      {"8 determinism", determinism},
      {"9 published goldens", published_goldens},
  };

  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.status = Outcome::Fail;
      o.note(std::string("exception: ") + e.what());
    }
    const char* tag = o.status == Outcome::Pass ? "PASS" : o.status == Outcome::Fail ? "FAIL" : "SKIP";
    if (o.status == Outcome::Fail) ++failures;
    std::cout << tag << "  " << name;
    for (std::size_t i = 0; i < o.notes.size(); ++i) std::cout << (i ? "; " : " -- ") << o.notes[i];
    std::cout << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
